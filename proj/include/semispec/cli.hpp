#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "semispec/config.hpp"

namespace semispec {

struct ModelCheck {
  std::string model;  // airy, davies, davies_conjugate, tensor
  int index = 0;
  Complex discrete;   // Richardson estimate from n and 2n+1 (raw value for the conjugation check)
  Complex raw;        // value on the n grid
  Complex oracle;
  double abs_error = 0.0;
  double raw_abs_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ModelValidation {
  std::vector<ModelCheck> checks;
  bool all_pass() const;
};

/// Truncated model discretizations against the closed-form spectra. The discrete value
/// is the Richardson combination (4 fine - coarse) / 3 of the grids with n and 2n + 1
/// interior points, which share every coarse node.
ModelValidation validate_models(const ExperimentConfig& cfg);

void write_models_csv(std::ostream& os, const ModelValidation& v);

struct CliRequest {
  std::string command;     // spectrum, sweep, pseudo, decay, models, gl
  std::string subcommand;  // "validate" for models
  std::optional<std::string> config_path;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;  // 0 = auto; falls back to SEMISPEC_THREADS
  std::optional<long> dense_cap;
};

/// Runs one subcommand. Returns the process exit code: 0 success, 1 config error,
/// 2 regime violation, 3 numerical failure. Errors are written to `err` as one JSON
/// object per line.
int run_command(const CliRequest& req, std::ostream& out, std::ostream& err);

}  // namespace semispec
