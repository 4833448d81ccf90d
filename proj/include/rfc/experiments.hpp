#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rfc {

// Configuration problems (unknown keys, bad values) are reported with the
// offending key path and map to CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunOutcome {
  int exit_code = 0;  // 0 = invariants passed, 1 = violation
  std::string summary;
  std::string records_path;
  int written = 0;
  int skipped = 0;  // already-complete samples skipped on resumption
};

// Parses and validates the JSON config, runs the named experiment with
// resumption (existing samples in the record file are skipped), appends
// records, and returns the summary.
RunOutcome run_experiment(const std::string& config_path);

struct VerifyOutcome {
  bool ok = false;
  std::string report;
};

// Re-checks record-stream invariants: parsability, unique record identity,
// finite scalars, and the per-experiment pass flags.
VerifyOutcome verify_records_file(const std::string& path);

// ---------------------------------------------------------------------------
// Deterministic suites, shared between the CLI and the acceptance tests.

struct LemmaSuiteResult {
  int height_checked = 0, height_failures = 0;
  int tilt_checked = 0, tilt_skipped = 0, tilt_failures = 0;
  int argmin_checked = 0, argmin_failures = 0;
  int density_checked = 0, density_failures = 0;
  double closed_form_h = 0.0;      // the eta = 0.5, |A-B| = 2 isoceles case
  double closed_form_bound = 0.0;
  bool closed_form_ok = false;
  bool ok() const {
    return height_failures == 0 && tilt_failures == 0 &&
           argmin_failures == 0 && density_failures == 0 && closed_form_ok;
  }
};

// n_height admissible polylines per (eta, |A-B|) cell, n_tilt
// hypothesis-satisfying line pairs, n_argmin averaged-normal argmin
// configurations, n_density sampled (x, r) density checks on eps = 0.05
// ground states at L = 128.
LemmaSuiteResult run_lemma_suite(std::uint64_t seed, int n_height, int n_tilt,
                                 int n_argmin, int n_density);

struct OracleSuiteResult {
  int ground_checked = 0;
  int sr_checked = 0;
  int perimeter_checked = 0;
  double max_energy_diff = 0.0;
  double max_sr_diff = 0.0;
  double max_perimeter_diff = 0.0;
  bool ok = false;  // all diffs <= 1e-9
};

OracleSuiteResult run_oracle_suite(std::uint64_t seed, int n_ground, int n_sr,
                                   int n_perimeter);

}  // namespace rfc
