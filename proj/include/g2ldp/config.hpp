#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "g2ldp/coefficients.hpp"
#include "g2ldp/controls.hpp"
#include "g2ldp/field.hpp"

namespace g2ldp {

/// Experiment description parsed from the sectioned key=value text format.
/// Parsing is strict: unknown sections or keys raise ConfigError.
struct ExperimentConfig {
  // [fluid]
  double alpha = 1.0;
  double kappa = 1.0;
  double domain_side = kTwoPi;
  int mode_cutoff = 8;

  // [coefficients]
  std::string family = "default";  // default | zero | brownian_diagnostic | jump_diagnostic
  double drift_scale = 0.4;
  double gain_scale = 0.5;
  std::vector<double> jump_scales;     // empty = family defaults
  std::vector<double> jump_couplings;
  std::string gain_field = "profile:1:0.5";  // diagnostic families only
  std::string jump_field = "profile:2:0.5";

  // [controls]
  std::string f_spec = "zero";      // zero | constant:V[:steps] | file:PATH
  std::string g_spec = "one";       // one | constant:V[:steps] | file:PATH
  std::string marks_spec = "uniform:1:1";  // uniform:J:W | file:PATH

  // [solver]
  double dt = 1e-3;
  double horizon = 1.0;
  bool nonlinearity = true;
  double cutoff_level = 0.0;  // 0 disables the cutoff
  double blowup_w = 1e6;
  std::string initial_field = "profile:3:0.4";  // zero | profile:... | single:... | file:PATH

  // [mc]
  std::vector<double> eps_list = {1e-1, 1e-2};
  int paths = 100;
  uint64_t master_seed = 1;
  int trials = 20;
  int budget_m = 1;

  // [study]
  double radius = 0.5;
  std::vector<int> n_list = {1, 4, 16, 64};
  int f_intervals = 8;
  int g_intervals = 1;
  std::vector<double> penalty_schedule = {10.0, 100.0, 1000.0};
  std::vector<int> ray_tags = {1, 2};
  double osc_delta = 0.5;
  double girsanov_shift = 0.5;   // constant psi for girsanov-check
  double girsanov_tilt = 1.5;    // constant phi for girsanov-check
  std::string target_field = "uncontrolled";  // rate subcommand target

  FluidParams fluid() const;
  MarkSpace marks() const;
  CoefficientSet coefficients() const;
  ScalarControl scalar_control() const;
  IntensityControl intensity_control() const;
  SpectralField initial_state() const;
  SpectralField field_from_spec(const std::string& spec) const;

  void validate() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

/// Applies one "section.key=value" override.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

/// Stable hash of the canonical serialization.
uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace g2ldp
