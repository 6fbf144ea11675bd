// Relaxation-limit experiment driver: well-prepared initial data, ε-sweeps
// against a fine-grid limit reference, relative-entropy decay, rate fits, and
// deterministic CSV/report emission.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ekp/chks_solver.hpp"
#include "ekp/ekp_solver.hpp"

namespace ekp {

struct SweepConfig {
  Params params;                      // epsilon ignored; taken from epsilon_list per row
  std::vector<double> epsilon_list;   // strictly decreasing
  std::string r0_profile = "cosine";  // cosine | two-mode | random
  double r0_mean = 1.0;
  double r0_amplitude = 0.3;
  double tau = 0.5;
  int dim = 1;
  int grid_n = 128;
  double dt = 0.0;                    // 0 = choose from the CFL heuristic per ε
  int samples = 50;                   // target number of matched sample times
  std::string output_dir = "out";
  unsigned long seed = 0;
  int threads = 1;

  void validate() const;
};

// Named band-limited initial profile; the seed only enters the random profile.
ScalarField make_profile(const Grid& grid, const std::string& name, double mean, double amplitude,
                         unsigned long seed);

// ρ₀ = r0, m₀ = r0·U(r0): the relative entropy of the result against r0 is
// zero by construction.
State well_prepared_init(const ScalarField& r0, const Params& params);

struct SweepRow {
  double epsilon = 0.0;
  double e_rel_0 = 0.0;
  double e_rel_tau = 0.0;
  double dissipation = 0.0;   // (1/2ε²)∫₀^τ∫ρ|u-U|²
  double wasserstein = 0.0;
  double err_e_l2 = 0.0;      // time-averaged ‖e(r,U)‖_{L²}
  double energy_margin = 0.0;
  double mass_drift = 0.0;
  double min_rho = 0.0;
  double max_rho = 0.0;
  bool failed = false;
  std::string config_hash;
  State final_state;          // for snapshot emission
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms of log-space residuals
};

struct SweepReport {
  SweepConfig config;
  std::string config_hash;
  std::vector<SweepRow> rows;
  std::optional<FitResult> e_rel_fit;  // log E_rel(τ) vs log ε, absent for < 2 rows
  std::optional<FitResult> err_e_fit;
};

SweepReport run_sweep(const SweepConfig& config);

FitResult fit_rate(const std::vector<double>& eps_list, const std::vector<double>& values);

// sweep.csv + config.echo + per-ε final-state snapshots (snapshot_e<i>.csv);
// byte-identical output for identical config and seed.
void emit_report(const SweepReport& report, const std::string& output_dir);

// canonical key=value rendering of a config; its FNV-1a hash tags every row
std::string render_config(const SweepConfig& config);
std::string config_hash(const SweepConfig& config);

// INI-style config with sections [params], [grid], [sweep], [output];
// unknown sections or keys are errors.
SweepConfig parse_sweep_config(const std::string& path);

inline constexpr const char* kSweepCsvHeader =
    "epsilon,E_rel_0,E_rel_tau,dissipation,wasserstein,err_e_l2,energy_margin,mass_drift,min_rho,max_rho";

}  // namespace ekp
