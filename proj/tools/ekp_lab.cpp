// Command-line driver for the relaxation-limit laboratory.
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "ekp/galerkin.hpp"
#include "ekp/harness.hpp"
#include "ekp/poisson.hpp"
#include "ekp/snapshot.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  int threads = 0;           // 0 = keep config value
  long long seed = -1;       // <0 = keep config value
};

ekp::SweepConfig load_config(const CommonOpts& opt) {
  ekp::SweepConfig cfg;
  if (!opt.config_path.empty()) cfg = ekp::parse_sweep_config(opt.config_path);
  if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
  if (opt.threads > 0) cfg.threads = opt.threads;
  if (opt.seed >= 0) cfg.seed = static_cast<unsigned long>(opt.seed);
  return cfg;
}

void add_common(CLI::App* sub, CommonOpts& opt, bool config_required) {
  auto* c = sub->add_option("--config", opt.config_path, "structured text config file");
  if (config_required) c->required();
  sub->add_option("--out", opt.out_dir, "output directory");
  sub->add_option("--threads", opt.threads, "worker threads for sweeps");
  sub->add_option("--seed", opt.seed, "seed for the random initial profile");
}

int print_sweep(const ekp::SweepReport& report) {
  int failed = 0;
  for (const auto& row : report.rows) {
    if (row.failed) {
      std::printf("eps=%-8g FAILED\n", row.epsilon);
      ++failed;
      continue;
    }
    std::printf("eps=%-8g E_rel(0)=%-12.4e E_rel(tau)=%-12.4e dissipation=%-12.4e err_e=%-12.4e\n",
                row.epsilon, row.e_rel_0, row.e_rel_tau, row.dissipation, row.err_e_l2);
  }
  if (report.e_rel_fit)
    std::printf("E_rel(tau) log-log slope: %.3f (residual %.2e)\n", report.e_rel_fit->slope,
                report.e_rel_fit->residual);
  if (report.err_e_fit)
    std::printf("err_e     log-log slope: %.3f (residual %.2e)\n", report.err_e_fit->slope,
                report.err_e_fit->residual);
  std::printf("config hash: %s\n", report.config_hash.c_str());
  return failed == 0 ? 0 : 1;
}

int cmd_sweep(const CommonOpts& opt) {
  const ekp::SweepConfig cfg = load_config(opt);
  const ekp::SweepReport report = ekp::run_sweep(cfg);
  ekp::emit_report(report, cfg.output_dir);
  std::printf("report written to %s\n", cfg.output_dir.c_str());
  return print_sweep(report);
}

int cmd_single(const CommonOpts& opt) {
  ekp::SweepConfig cfg = load_config(opt);
  cfg.epsilon_list = {cfg.params.epsilon};
  const ekp::SweepReport report = ekp::run_sweep(cfg);
  ekp::emit_report(report, cfg.output_dir);
  std::printf("report written to %s\n", cfg.output_dir.c_str());
  return print_sweep(report);
}

int cmd_check_identities(const CommonOpts& opt) {
  const ekp::SweepConfig cfg = load_config(opt);
  const ekp::Grid g = ekp::Grid::make(cfg.dim, cfg.grid_n);
  ekp::Params p = cfg.params;
  if (p.b == 0.0) p.b = -1.0;  // the stress identities need an active coupling
  if (p.c == 0.0) p.c = 0.01;

  double worst = 0.0;
  for (int variant = 0; variant < 5; ++variant) {
    const ekp::ScalarField rho = ekp::make_profile(g, variant % 2 == 0 ? "cosine" : "two-mode", 1.0,
                                                   0.1 + 0.08 * variant, cfg.seed + variant);
    const auto [res_p, res_k] = ekp::identity_residuals(rho, p);
    std::printf("profile %d: poisson-stress residual %.3e, korteweg-stress residual %.3e\n", variant,
                res_p, res_k);
    worst = std::max({worst, res_p, res_k});
  }
  std::printf("max residual: %.3e (%s)\n", worst, worst <= 1e-8 ? "ok" : "FAIL");
  return worst <= 1e-8 ? 0 : 1;
}

int cmd_verify_bounds(const CommonOpts& opt) {
  const ekp::SweepConfig cfg = load_config(opt);
  const ekp::HBoundsReport rep = ekp::verify_h_lower_bounds(cfg.params, 400);
  std::printf("gamma=%g: c3=%.6e (%s)\n", cfg.params.gamma, rep.c3,
              rep.c3_positive ? "positive" : "NOT positive");
  for (std::size_t i = 0; i < rep.deltas.size(); ++i)
    std::printf("  delta=%g: C(delta)=%.6e\n", rep.deltas[i], rep.c_of_delta[i]);
  for (const auto& [rho, r] : rep.violations)
    std::printf("  violation at rho=%g r=%g\n", rho, r);
  return rep.c3_positive && rep.violations.empty() ? 0 : 1;
}

int cmd_galerkin(const CommonOpts& opt) {
  const ekp::SweepConfig cfg = load_config(opt);
  const ekp::Grid g = ekp::Grid::make(1, std::min(cfg.grid_n, 64));
  const ekp::GalerkinBasis basis(g, 4);
  ekp::Params p = cfg.params;
  p.epsilon = cfg.epsilon_list.empty() ? p.epsilon : cfg.epsilon_list.front();

  ekp::GalerkinState init;
  init.rho = ekp::make_profile(g, "cosine", 1.0, 0.2, cfg.seed);
  init.coeffs.assign(std::size_t(basis.size()), 0.0);

  const double mu = 1e-3;
  const auto run = ekp::galerkin_run(basis, init, p, mu, 1e-4, 0.05);
  const auto rep = ekp::galerkin_energy_report(run, p, mu);
  std::printf("modes: %d\n", basis.size());
  std::printf("energy balance residual: %.3e (tol %.3e, %s)\n", rep.balance_residual, rep.tolerance,
              rep.balanced ? "ok" : "FAIL");
  std::printf("mu-dissipation: %.6e\n", rep.mu_dissipation);
  std::printf("sup |rho|: %.6f   int |d_t rho|^2: %.6e\n", rep.sup_rho_inf, rep.int_dt_rho_sq);
  std::printf("sup ((u;u))^1/2: %.6e   sup |grad Phi|_L2: %.6e\n", rep.sup_u_sobolev,
              rep.sup_grad_phi_l2);
  return rep.balanced ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudo-spectral laboratory for the high-friction relaxation limit"};
  app.require_subcommand(1);

  CommonOpts opt;
  auto* sweep = app.add_subcommand("sweep", "run an epsilon sweep against the limit reference");
  add_common(sweep, opt, true);
  auto* single = app.add_subcommand("single", "run one epsilon (from [params] epsilon)");
  add_common(single, opt, true);
  auto* ident = app.add_subcommand("check-identities", "evaluate the stress-tensor identities");
  add_common(ident, opt, false);
  auto* bounds = app.add_subcommand("verify-bounds", "scan the entropy-gap lower bounds");
  add_common(bounds, opt, false);
  auto* gal = app.add_subcommand("galerkin", "run the regularized Galerkin construction demo");
  add_common(gal, opt, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) return cmd_sweep(opt);
    if (single->parsed()) return cmd_single(opt);
    if (ident->parsed()) return cmd_check_identities(opt);
    if (bounds->parsed()) return cmd_verify_bounds(opt);
    if (gal->parsed()) return cmd_galerkin(opt);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  }
  return 0;
}
