#pragma once

// Experiment configuration: a flat INI-style text file.
//
//   potential = x^2 + 2*y^2      ; top-level keys, before any section
//   regime = auto                ; auto | airy | morse
//   [domain]
//   x = -1, 1
//   y = -1, 1                    ; optional; present means a rectangle
//   [sweep]
//   hs = 0.02, 0.01, 0.005
//
// Lists are comma separated and may be wrapped in [ ]. Comments start with ; or #.
// Unknown sections or keys are rejected. The full grammar is listed in the README.

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semispec/eigensolve.hpp"
#include "semispec/potentials.hpp"
#include "semispec/pseudospec.hpp"

namespace semispec {

struct ExperimentConfig {
  std::optional<std::string> potential;
  RegimeChoice regime = RegimeChoice::Auto;
  std::optional<Domain> domain;

  std::optional<std::vector<double>> hs;
  int points_per_scale = 10;
  int levels = 2;
  std::size_t n_max = 0;
  double theory_tolerance = 0.05;

  SolverOptions solver;

  std::optional<double> spectrum_h;

  std::optional<double> pseudo_h;
  double pseudo_gamma_factor = 0.8;
  int nu_samples = 201;
  std::optional<Region> pseudo_region;
  int pseudo_nx = 41;
  int pseudo_ny = 41;

  std::optional<double> decay_h;
  int decay_samples = 201;
  std::optional<double> decay_t_max;
  double c0 = 1.0;
  double decay_gamma_factor = 0.8;

  std::vector<double> Rs{20.0, 40.0, 80.0};

  int airy_n = 2000;
  double airy_L = 30.0;
  int airy_count = 3;
  double airy_tol = 1e-4;
  int davies_n = 2000;
  double davies_L = 12.0;
  int davies_count = 5;
  double davies_tol = 1e-6;
  int tensor_n = 119;
  double tensor_L = 6.0;
  int tensor_count = 3;
  double tensor_tol = 1e-3;

  std::string output_dir = "out";

  /// SHA-256 of the raw config text, lowercase hex.
  std::string hash;

  int dim() const;
  /// Parsed potential; throws ConfigError when `potential` is missing.
  PotentialProfile profile() const;
  const Domain& require_domain() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

std::string sha256_hex(const std::string& data);

/// Parses "a", "bi", "a+bi", "a-bi" (i or j suffix).
Complex parse_complex(const std::string& text);

}  // namespace semispec
