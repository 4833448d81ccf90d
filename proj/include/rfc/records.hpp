#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace rfc {

// One measurement, one line. The keyed text format is append-only and
// self-describing:
//   record experiment=<name> seed=<u64> sample=<index> \
//     param.<key>=<token> ... scalar.<key>=<%.17g> ... walltime=<seconds>
// Keys are emitted in sorted order, so re-runs are byte-identical except for
// the walltime field.
struct ExperimentRecord {
  std::string experiment;
  std::uint64_t master_seed = 0;
  int sample_index = 0;
  std::map<std::string, std::string> params;
  std::map<std::string, double> scalars;
  double wall_time = 0.0;
};

std::string format_record(const ExperimentRecord& rec);
ExperimentRecord parse_record(const std::string& line);

// Appends one complete line and flushes (crash safety: partial lines are
// never considered records).
void append_record(const std::string& path, const ExperimentRecord& rec);

// Loads all complete record lines; an unterminated trailing line is ignored.
std::vector<ExperimentRecord> load_records(const std::string& path);

// Per-(experiment, scalar) aggregate rows:
//   experiment,scalar,count,mean,variance,min,max
std::string summarize_records_csv(std::span<const ExperimentRecord> records);

// Plot-friendly CSV for one experiment: sample index, every parameter, every
// scalar (union of keys, blank where missing).
std::string plotdata_csv(std::span<const ExperimentRecord> records,
                         const std::string& experiment);

}  // namespace rfc
