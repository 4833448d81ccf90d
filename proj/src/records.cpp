#include "rfc/records.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rfc {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_token(const std::string& s) {
  if (s.empty() || s.find_first_of(" =\n\t") != std::string::npos)
    throw std::invalid_argument("record token must be nonempty and free of "
                                "spaces, '=' and newlines: '" +
                                s + "'");
}

}  // namespace

std::string format_record(const ExperimentRecord& rec) {
  check_token(rec.experiment);
  std::ostringstream out;
  out << "record experiment=" << rec.experiment << " seed=" << rec.master_seed
      << " sample=" << rec.sample_index;
  for (const auto& [k, v] : rec.params) {
    check_token(k);
    check_token(v);
    out << " param." << k << '=' << v;
  }
  for (const auto& [k, v] : rec.scalars) {
    check_token(k);
    out << " scalar." << k << '=' << fmt_double(v);
  }
  out << " walltime=" << fmt_double(rec.wall_time);
  return out.str();
}

ExperimentRecord parse_record(const std::string& line) {
  std::istringstream in(line);
  std::string tag;
  in >> tag;
  if (tag != "record")
    throw std::invalid_argument("parse_record: line does not start with "
                                "'record'");
  ExperimentRecord rec;
  std::string field;
  while (in >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("parse_record: field without '=': " + field);
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    if (key == "experiment")
      rec.experiment = value;
    else if (key == "seed")
      rec.master_seed = std::stoull(value);
    else if (key == "sample")
      rec.sample_index = std::stoi(value);
    else if (key == "walltime")
      rec.wall_time = std::stod(value);
    else if (key.rfind("param.", 0) == 0)
      rec.params[key.substr(6)] = value;
    else if (key.rfind("scalar.", 0) == 0)
      rec.scalars[key.substr(7)] = std::stod(value);
    else
      throw std::invalid_argument("parse_record: unknown field: " + key);
  }
  if (rec.experiment.empty())
    throw std::invalid_argument("parse_record: missing experiment field");
  return rec;
}

void append_record(const std::string& path, const ExperimentRecord& rec) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("append_record: cannot open " + path);
  out << format_record(rec) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("append_record: write failed: " + path);
}

std::vector<ExperimentRecord> load_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_records: cannot open " + path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  std::vector<ExperimentRecord> records;
  std::size_t pos = 0;
  while (pos < content.size()) {
    const std::size_t nl = content.find('\n', pos);
    if (nl == std::string::npos) break;  // incomplete trailing line: ignore
    const std::string line = content.substr(pos, nl - pos);
    pos = nl + 1;
    if (!line.empty()) records.push_back(parse_record(line));
  }
  return records;
}

std::string summarize_records_csv(std::span<const ExperimentRecord> records) {
  struct Agg {
    int count = 0;
    double sum = 0.0, sum_sq = 0.0;
    double min = 0.0, max = 0.0;
  };
  std::map<std::pair<std::string, std::string>, Agg> groups;
  for (const ExperimentRecord& rec : records)
    for (const auto& [k, v] : rec.scalars) {
      Agg& a = groups[{rec.experiment, k}];
      if (a.count == 0) {
        a.min = v;
        a.max = v;
      }
      ++a.count;
      a.sum += v;
      a.sum_sq += v * v;
      a.min = std::min(a.min, v);
      a.max = std::max(a.max, v);
    }

  std::ostringstream out;
  out << "experiment,scalar,count,mean,variance,min,max\n";
  for (const auto& [key, a] : groups) {
    const double mean = a.sum / a.count;
    const double var =
        a.count > 1 ? std::max(0.0, (a.sum_sq - a.sum * mean)) / (a.count - 1)
                    : 0.0;
    out << key.first << ',' << key.second << ',' << a.count << ','
        << fmt_double(mean) << ',' << fmt_double(var) << ','
        << fmt_double(a.min) << ',' << fmt_double(a.max) << '\n';
  }
  return out.str();
}

std::string plotdata_csv(std::span<const ExperimentRecord> records,
                         const std::string& experiment) {
  std::set<std::string> param_keys, scalar_keys;
  std::vector<const ExperimentRecord*> rows;
  for (const ExperimentRecord& rec : records)
    if (rec.experiment == experiment) {
      rows.push_back(&rec);
      for (const auto& [k, v] : rec.params) param_keys.insert(k);
      for (const auto& [k, v] : rec.scalars) scalar_keys.insert(k);
    }

  std::ostringstream out;
  out << "sample";
  for (const std::string& k : param_keys) out << ",param." << k;
  for (const std::string& k : scalar_keys) out << ",scalar." << k;
  out << '\n';
  for (const ExperimentRecord* rec : rows) {
    out << rec->sample_index;
    for (const std::string& k : param_keys) {
      const auto it = rec->params.find(k);
      out << ',' << (it == rec->params.end() ? "" : it->second);
    }
    for (const std::string& k : scalar_keys) {
      const auto it = rec->scalars.find(k);
      out << ',';
      if (it != rec->scalars.end()) out << fmt_double(it->second);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace rfc
