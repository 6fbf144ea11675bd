#include "ekp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ekp/poisson.hpp"
#include "ekp/snapshot.hpp"

namespace ekp {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

VectorField velocity_of(const State& st) {
  VectorField u(st.rho.grid);
  for (int a = 0; a < st.rho.grid.dim; ++a)
    for (std::size_t i = 0; i < st.rho.size(); ++i)
      u.comp[a][i] = st.momentum.comp[a][i] / st.rho.values[i];
  return u;
}

VectorField corrector_at(const ScalarField& r, const Params& p) {
  if (p.b != 0.0) return limit_velocity_U(r, solve_poisson(r).phi, p);
  return limit_velocity_U(r, ScalarField(r.grid), p);
}
}  // namespace

void SweepConfig::validate() const {
  if (epsilon_list.empty()) throw std::invalid_argument("sweep: epsilon_list is empty");
  for (std::size_t i = 0; i < epsilon_list.size(); ++i) {
    if (epsilon_list[i] <= 0.0) throw std::invalid_argument("sweep: epsilon must be > 0");
    if (i > 0 && epsilon_list[i] >= epsilon_list[i - 1])
      throw std::invalid_argument("sweep: epsilon_list must be strictly decreasing");
  }
  if (tau <= 0.0) throw std::invalid_argument("sweep: tau must be > 0");
  if (dt < 0.0) throw std::invalid_argument("sweep: dt must be >= 0");
  if (samples < 2) throw std::invalid_argument("sweep: samples must be >= 2");
  if (threads < 1) throw std::invalid_argument("sweep: threads must be >= 1");
  if (r0_mean - std::abs(r0_amplitude) <= 0.0)
    throw std::invalid_argument("sweep: initial profile is not bounded below by a positive constant");
  Params p = params;
  p.epsilon = epsilon_list.front();
  p.validate(dim);
  Grid::make(dim, grid_n);  // validates dim and n
}

ScalarField make_profile(const Grid& grid, const std::string& name, double mean, double amplitude,
                         unsigned long seed) {
  const ScalarField x = coordinate(grid, 0);
  const ScalarField y = grid.dim == 2 ? coordinate(grid, 1) : ScalarField(grid);
  ScalarField pert(grid);

  if (name == "cosine") {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double v = std::cos(two_pi * x.values[i]);
      if (grid.dim == 2) v *= std::cos(two_pi * y.values[i]);
      pert.values[i] = v;
    }
  } else if (name == "two-mode") {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double v = std::cos(two_pi * x.values[i]) + 0.5 * std::sin(2.0 * two_pi * x.values[i]);
      if (grid.dim == 2) v *= std::cos(two_pi * y.values[i]);
      pert.values[i] = v;
    }
  } else if (name == "random") {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int k = 1; k <= 3; ++k) {
      const double ac = unit(rng), as = unit(rng);
      const double bc = grid.dim == 2 ? unit(rng) : 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        double v = ac * std::cos(k * two_pi * x.values[i]) + as * std::sin(k * two_pi * x.values[i]);
        if (grid.dim == 2) v += bc * std::cos(k * two_pi * (x.values[i] + y.values[i]));
        pert.values[i] += v;
      }
    }
  } else {
    throw std::invalid_argument("make_profile: unknown profile '" + name + "'");
  }

  const double peak = max_abs(pert);
  const double scale = peak > 0.0 ? amplitude / peak : 0.0;
  ScalarField out(grid, mean);
  for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] += scale * pert.values[i];
  if (min_value(out) <= 0.0) throw std::invalid_argument("make_profile: profile not strictly positive");
  return out;
}

State well_prepared_init(const ScalarField& r0, const Params& p) {
  if (min_value(r0) <= 0.0)
    throw std::invalid_argument("well_prepared_init: r0 must be bounded below by a positive constant");
  State st;
  st.rho = r0;
  st.momentum = pointwise_mul(r0, corrector_at(r0, p));
  st.time = 0.0;
  return st;
}

namespace {
SweepRow run_row(const SweepConfig& cfg, double eps, const ScalarField& r0, const ScalarField& r0_ref,
                 const std::string& hash) {
  SweepRow row;
  row.epsilon = eps;
  row.config_hash = hash;

  Params p = cfg.params;
  p.epsilon = eps;
  p.validate(cfg.dim);

  const State init = well_prepared_init(r0, p);

  double dt0 = cfg.dt > 0.0 ? cfg.dt : ekp_cfl_dt(init, p);
  long nsteps = std::lround(std::ceil(cfg.tau / dt0));
  const long stride = std::max<long>(1, nsteps / cfg.samples);
  nsteps = stride * ((nsteps + stride - 1) / stride);
  const double dt = cfg.tau / double(nsteps);

  EkpConfig ekp_cfg;
  ekp_cfg.params = p;
  ekp_cfg.dt = dt;
  ekp_cfg.t_end = cfg.tau;
  const EkpRunResult res = ekp_run(init, ekp_cfg, int(stride), int(std::max<long>(stride, nsteps / 10)));
  if (res.aborted) {
    row.failed = true;
    return row;
  }

  // limit reference at double resolution and quarter step, sampled at the
  // same times as the relaxation run
  ChksConfig ref_cfg;
  ref_cfg.params = p;
  ref_cfg.dt = dt / 4.0;
  ref_cfg.t_end = cfg.tau;
  ref_cfg.scheme = ChksScheme::semi_implicit_spectral;
  const ChksRunResult ref = chks_run(r0_ref, ref_cfg, int(4 * stride));
  if (ref.aborted || ref.samples.size() != res.samples.size()) {
    row.failed = true;
    return row;
  }

  const Grid& g = r0.grid;
  const std::size_t nsamp = res.samples.size();
  std::vector<ScalarField> r(nsamp);
  std::vector<VectorField> U(nsamp);
  for (std::size_t k = 0; k < nsamp; ++k) {
    r[k] = restrict_to(ref.samples[k].rho, g);
    U[k] = corrector_at(r[k], p);
  }

  row.e_rel_0 = relative_entropy(res.samples.front(), r.front(), p);
  row.e_rel_tau = relative_entropy(res.samples.back(), r.back(), p);
  row.wasserstein = wasserstein_surrogate(res.samples.back().rho, r.back(), p);

  // trapezoid in time of (1/2ε²)∫ρ|u-U|²
  double prev_rate = 0.0, prev_t = res.samples.front().time;
  for (std::size_t k = 0; k < nsamp; ++k) {
    const State& st = res.samples[k];
    const VectorField u = velocity_of(st);
    ScalarField dens(g);
    for (int a = 0; a < g.dim; ++a)
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double d = u.comp[a][i] - U[k].comp[a][i];
        dens.values[i] += st.rho.values[i] * d * d;
      }
    const double rate = integrate(dens) / (2.0 * eps * eps);
    if (k > 0) row.dissipation += 0.5 * (st.time - prev_t) * (prev_rate + rate);
    prev_rate = rate;
    prev_t = st.time;
  }

  // time-averaged ‖e(r,U)‖_{L²} over interior samples (centered differences)
  const double dt_snap = stride * dt;
  double e_sum = 0.0;
  std::size_t e_count = 0;
  for (std::size_t k = 1; k + 1 < nsamp; ++k) {
    const VectorField e = error_term_e({r[k - 1], r[k], r[k + 1]}, {U[k - 1], U[k], U[k + 1]}, p, dt_snap);
    e_sum += l2_norm(e);
    ++e_count;
  }
  row.err_e_l2 = e_count > 0 ? e_sum / double(e_count) : 0.0;

  row.energy_margin = res.energy_margin;
  row.mass_drift = std::abs(res.records.back().mass - res.records.front().mass);
  row.min_rho = res.records.front().min_rho;
  row.max_rho = res.records.front().max_rho;
  for (const auto& rec : res.records) {
    row.min_rho = std::min(row.min_rho, rec.min_rho);
    row.max_rho = std::max(row.max_rho, rec.max_rho);
  }
  row.final_state = res.samples.back();
  return row;
}
}  // namespace

SweepReport run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  SweepReport report;
  report.config = cfg;
  report.config_hash = config_hash(cfg);

  const Grid g = Grid::make(cfg.dim, cfg.grid_n);
  const Grid g_ref = Grid::make(cfg.dim, 2 * cfg.grid_n);
  const ScalarField r0 = make_profile(g, cfg.r0_profile, cfg.r0_mean, cfg.r0_amplitude, cfg.seed);
  const ScalarField r0_ref = make_profile(g_ref, cfg.r0_profile, cfg.r0_mean, cfg.r0_amplitude, cfg.seed);

  report.rows.resize(cfg.epsilon_list.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cfg.epsilon_list.size()) return;
      try {
        report.rows[i] = run_row(cfg, cfg.epsilon_list[i], r0, r0_ref, report.config_hash);
      } catch (const std::exception&) {
        report.rows[i] = SweepRow{};
        report.rows[i].epsilon = cfg.epsilon_list[i];
        report.rows[i].config_hash = report.config_hash;
        report.rows[i].failed = true;
      }
    }
  };
  if (cfg.threads == 1 || cfg.epsilon_list.size() == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const int nthreads = std::min<int>(cfg.threads, int(cfg.epsilon_list.size()));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<double> eps_ok, erel_ok, erre_ok;
  for (const auto& row : report.rows) {
    if (row.failed) continue;
    eps_ok.push_back(row.epsilon);
    erel_ok.push_back(row.e_rel_tau);
    erre_ok.push_back(row.err_e_l2);
  }
  auto try_fit = [&](const std::vector<double>& vals) -> std::optional<FitResult> {
    if (eps_ok.size() < 2) return std::nullopt;
    for (double v : vals)
      if (v <= 0.0) return std::nullopt;
    return fit_rate(eps_ok, vals);
  };
  report.e_rel_fit = try_fit(erel_ok);
  report.err_e_fit = try_fit(erre_ok);
  return report;
}

FitResult fit_rate(const std::vector<double>& eps_list, const std::vector<double>& values) {
  if (eps_list.size() != values.size()) throw std::invalid_argument("fit_rate: size mismatch");
  if (eps_list.size() < 2) throw std::invalid_argument("fit_rate: need at least two points");
  const std::size_t n = eps_list.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (eps_list[i] <= 0.0 || values[i] <= 0.0)
      throw std::invalid_argument("fit_rate: nonpositive input");
    lx[i] = std::log(eps_list[i]);
    ly[i] = std::log(values[i]);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  FitResult fit;
  const double denom = double(n) * sxx - sx * sx;
  fit.slope = (double(n) * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / double(n);
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.slope * lx[i] + fit.intercept);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / double(n));
  return fit;
}

std::string render_config(const SweepConfig& c) {
  std::ostringstream out;
  out << "[params]\n";
  out << "a=" << format_double(c.params.a) << '\n';
  out << "b=" << format_double(c.params.b) << '\n';
  out << "c=" << format_double(c.params.c) << '\n';
  out << "gamma=" << format_double(c.params.gamma) << '\n';
  out << "epsilon=" << format_double(c.params.epsilon) << '\n';
  out << "[grid]\n";
  out << "dim=" << c.dim << '\n';
  out << "n=" << c.grid_n << '\n';
  out << "[sweep]\n";
  out << "epsilon_list=";
  for (std::size_t i = 0; i < c.epsilon_list.size(); ++i)
    out << format_double(c.epsilon_list[i]) << (i + 1 < c.epsilon_list.size() ? "," : "");
  out << '\n';
  out << "tau=" << format_double(c.tau) << '\n';
  out << "profile=" << c.r0_profile << '\n';
  out << "mean=" << format_double(c.r0_mean) << '\n';
  out << "amplitude=" << format_double(c.r0_amplitude) << '\n';
  out << "dt=" << format_double(c.dt) << '\n';
  out << "samples=" << c.samples << '\n';
  out << "[output]\n";
  out << "dir=" << c.output_dir << '\n';
  out << "seed=" << c.seed << '\n';
  out << "threads=" << c.threads << '\n';
  return out.str();
}

std::string config_hash(const SweepConfig& c) {
  const std::string text = render_config(c);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {
std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}
}  // namespace

SweepConfig parse_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);

  SweepConfig cfg;
  std::string section, line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      if (section != "params" && section != "grid" && section != "sweep" && section != "output")
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    auto unknown = [&]() -> std::runtime_error {
      return std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key '" + key +
                                "' in section [" + section + "]");
    };
    if (section == "params") {
      if (key == "a") cfg.params.a = std::stod(val);
      else if (key == "b") cfg.params.b = std::stod(val);
      else if (key == "c") cfg.params.c = std::stod(val);
      else if (key == "gamma") cfg.params.gamma = std::stod(val);
      else if (key == "epsilon") cfg.params.epsilon = std::stod(val);
      else throw unknown();
    } else if (section == "grid") {
      if (key == "dim") cfg.dim = std::stoi(val);
      else if (key == "n") cfg.grid_n = std::stoi(val);
      else throw unknown();
    } else if (section == "sweep") {
      if (key == "epsilon_list") cfg.epsilon_list = parse_double_list(val);
      else if (key == "tau") cfg.tau = std::stod(val);
      else if (key == "profile") cfg.r0_profile = val;
      else if (key == "mean") cfg.r0_mean = std::stod(val);
      else if (key == "amplitude") cfg.r0_amplitude = std::stod(val);
      else if (key == "dt") cfg.dt = std::stod(val);
      else if (key == "samples") cfg.samples = std::stoi(val);
      else throw unknown();
    } else if (section == "output") {
      if (key == "dir") cfg.output_dir = val;
      else if (key == "seed") cfg.seed = std::stoul(val);
      else if (key == "threads") cfg.threads = std::stoi(val);
      else throw unknown();
    } else {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": key outside any section");
    }
  }
  return cfg;
}

void emit_report(const SweepReport& report, const std::string& output_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(output_dir);

  {
    std::ofstream csv(fs::path(output_dir) / "sweep.csv");
    if (!csv) throw std::runtime_error("emit_report: cannot write sweep.csv");
    csv << kSweepCsvHeader << '\n';
    for (const auto& row : report.rows) {
      if (row.failed) continue;
      csv << format_double(row.epsilon) << ',' << format_double(row.e_rel_0) << ','
          << format_double(row.e_rel_tau) << ',' << format_double(row.dissipation) << ','
          << format_double(row.wasserstein) << ',' << format_double(row.err_e_l2) << ','
          << format_double(row.energy_margin) << ',' << format_double(row.mass_drift) << ','
          << format_double(row.min_rho) << ',' << format_double(row.max_rho) << '\n';
    }
  }
  {
    std::ofstream echo(fs::path(output_dir) / "config.echo");
    if (!echo) throw std::runtime_error("emit_report: cannot write config.echo");
    echo << "# config_hash=" << report.config_hash << '\n';
    echo << render_config(report.config);
    if (report.e_rel_fit)
      echo << "# e_rel_slope=" << format_double(report.e_rel_fit->slope) << '\n';
    if (report.err_e_fit)
      echo << "# err_e_slope=" << format_double(report.err_e_fit->slope) << '\n';
  }
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    if (report.rows[i].failed) continue;
    const auto path = fs::path(output_dir) / ("snapshot_e" + std::to_string(i) + ".csv");
    write_snapshot(path.string(), snapshot_of(report.rows[i].final_state));
  }
}

}  // namespace ekp
