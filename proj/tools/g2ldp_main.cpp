// g2ldp command-line harness: experiment orchestration over the solver and
// study library.  Exit codes: 0 pass, 1 assertion failure, 2 config error.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "g2ldp/config.hpp"
#include "g2ldp/io.hpp"
#include "g2ldp/ldp.hpp"
#include "g2ldp/skeleton.hpp"
#include "g2ldp/stochastic.hpp"
#include "g2ldp/verify.hpp"

namespace fs = std::filesystem;
using namespace g2ldp;

namespace {

constexpr const char* kVersion = "0.1.0";

/// Tracks files created by a subcommand so partial outputs can be removed
/// when the run fails.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  std::string path(const std::string& name) {
    fs::path p = dir_ / name;
    created_.push_back(p);
    return p.string();
  }

  void discard_all() {
    for (const auto& p : created_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }

 private:
  fs::path dir_;
  std::vector<fs::path> created_;
};

void write_manifest(OutputSet& out, const std::string& command, const ExperimentConfig& cfg) {
  std::string p = out.path("manifest.txt");
  std::FILE* f = std::fopen(p.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write manifest");
  auto now = std::chrono::system_clock::now().time_since_epoch();
  std::fprintf(f, "command=%s\n", command.c_str());
  std::fprintf(f, "config_hash=%016llx\n",
               static_cast<unsigned long long>(config_hash(cfg)));
  std::fprintf(f, "master_seed=%llu\n", static_cast<unsigned long long>(cfg.master_seed));
  std::fprintf(f, "version=%s\n", kVersion);
  std::fprintf(f, "timestamp=%lld\n",
               static_cast<long long>(
                   std::chrono::duration_cast<std::chrono::seconds>(now).count()));
  std::fclose(f);
}

void write_summary(OutputSet& out, const std::vector<std::string>& lines) {
  std::string p = out.path("summary.txt");
  std::FILE* f = std::fopen(p.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write summary");
  for (const auto& l : lines) std::fprintf(f, "%s\n", l.c_str());
  std::fclose(f);
}

SkeletonOptions skeleton_options(const ExperimentConfig& cfg, bool store_fields) {
  SkeletonOptions o;
  o.dt = cfg.dt;
  o.store_fields = store_fields;
  o.nonlinearity = cfg.nonlinearity;
  o.cutoff = cfg.cutoff_level > 0.0;
  o.cutoff_level = cfg.cutoff_level;
  o.blowup_w = cfg.blowup_w;
  return o;
}

SpdeOptions spde_options(const ExperimentConfig& cfg, bool store_fields) {
  SpdeOptions o;
  o.dt = cfg.dt;
  o.horizon = cfg.horizon;
  o.seed = cfg.master_seed;
  o.store_fields = store_fields;
  o.nonlinearity = cfg.nonlinearity;
  o.cutoff = cfg.cutoff_level > 0.0;
  o.cutoff_level = cfg.cutoff_level;
  o.blowup_w = cfg.blowup_w;
  return o;
}

// --- subcommand bodies; each returns the exit code -------------------------

int run_skeleton(const ExperimentConfig& cfg, OutputSet& out) {
  ControlPair q{cfg.scalar_control(), cfg.intensity_control()};
  CoefficientSet c = cfg.coefficients();
  FluidParams p = cfg.fluid();
  Trajectory traj = solve_skeleton(cfg.initial_state(), q, c, p, skeleton_options(cfg, true));
  energy_report(traj, q, c, p);
  write_trajectory_csv(out.path("trajectory.csv"), traj);
  write_field_csv(out.path("final_state.csv"), traj.final_state, p.alpha);
  double cost = energy_cost(q.f) + entropy_cost(q.g, c.marks());
  write_summary(out, {"cost=" + format_double(cost),
                      "sup_norm_w=" + format_double(traj.sup_norm_w()),
                      "max_energy_residual=" +
                          format_double(*std::max_element(traj.energy_residual.begin(),
                                                          traj.energy_residual.end()))});
  return 0;
}

int run_simulate(const ExperimentConfig& cfg, OutputSet& out) {
  CoefficientSet c = cfg.coefficients();
  FluidParams p = cfg.fluid();
  ScalarControl f = cfg.scalar_control();
  IntensityControl g = cfg.intensity_control();
  double eps = cfg.eps_list.front();
  SpdePath path =
      solve_spde(cfg.initial_state(), eps, &f, &g, c, p, spde_options(cfg, true));
  write_trajectory_csv(out.path("trajectory.csv"), path.trajectory);
  std::vector<std::vector<double>> rows;
  for (const auto& e : path.events)
    rows.push_back({e.t, double(e.mark + 1), e.w_before, e.w_after});
  write_table_csv(out.path("events.csv"), "t,mark_index,w_norm_before,w_norm_after", rows);
  write_field_csv(out.path("final_state.csv"), path.trajectory.final_state, p.alpha);
  write_summary(out, {"eps=" + format_double(eps),
                      "jumps=" + std::to_string(path.events.size()),
                      "sup_norm_w=" + format_double(path.trajectory.sup_norm_w())});
  return 0;
}

int run_verify_operators(const ExperimentConfig& cfg, OutputSet& out) {
  std::vector<int> cutoffs = {4, 8};
  OperatorSuiteReport rep = verify_operators(cfg.alpha, cfg.domain_side, cutoffs,
                                             std::max(100, cfg.trials), cfg.master_seed);
  std::vector<std::string> lines;
  for (const auto& l : rep.lines) {
    std::string s = std::string(l.pass ? "[PASS] " : "[FAIL] ") + l.name +
                    " value=" + format_double(l.value);
    if (l.bound > 0.0) s += " bound=" + format_double(l.bound);
    if (!l.detail.empty()) s += "  (" + l.detail + ")";
    std::cout << s << "\n";
    lines.push_back(s);
  }
  lines.push_back("runtime_seconds=" + format_double(rep.runtime_seconds));
  write_summary(out, lines);
  return rep.all_pass ? 0 : 1;
}

int run_check_coefficients(const ExperimentConfig& cfg, OutputSet& out) {
  CoefficientSet c = cfg.coefficients();
  FluidParams p = cfg.fluid();
  LipschitzReport lip =
      check_lipschitz(c, p, std::max(100, cfg.trials), cfg.master_seed, cfg.horizon);
  GrowthReport growth =
      check_growth(c, p, std::max(100, cfg.trials), cfg.master_seed, cfg.horizon);
  ExponentialIntegrabilityReport expo =
      check_exponential_integrability(c, 1.0, cfg.horizon);
  bool ok = lip.within_declared(c);
  std::vector<std::string> lines = {
      std::string(ok ? "[PASS]" : "[FAIL]") + " declared-constants family=" + c.name(),
      "ratio_drift=" + format_double(lip.ratio_drift) +
          " declared=" + format_double(c.lip_drift()),
      "ratio_gain=" + format_double(lip.ratio_gain) +
          " declared=" + format_double(c.lip_gain()),
      "ratio_jump=" + format_double(lip.ratio_jump) +
          " declared=" + format_double(c.lip_jump()),
      "env0_excess=" + format_double(lip.env0_excess),
      "env1_excess=" + format_double(lip.env1_excess),
      "growth_q1=" + format_double(growth.ratio_q1),
      "growth_q2=" + format_double(growth.ratio_q2),
      "exp_integrability_0=" + format_double(expo.value0),
      "exp_integrability_1=" + format_double(expo.value1)};
  for (const auto& l : lines) std::cout << l << "\n";
  write_summary(out, lines);
  return ok ? 0 : 1;
}

int run_rate(const ExperimentConfig& cfg, OutputSet& out) {
  CoefficientSet c = cfg.coefficients();
  FluidParams p = cfg.fluid();
  SpectralField x0 = cfg.initial_state();
  EndpointOptions opt;
  opt.horizon = cfg.horizon;
  opt.dt = cfg.dt;
  opt.f_intervals = cfg.f_intervals;
  opt.g_intervals = cfg.g_intervals;
  opt.penalty_schedule = cfg.penalty_schedule;
  opt.nonlinearity = cfg.nonlinearity;

  SpectralField target(p.mode_cutoff, p.domain_side);
  if (cfg.target_field == "uncontrolled") {
    ControlPair q0 = ControlPair::uncontrolled(cfg.horizon, c.marks().size());
    target = solve_skeleton(x0, q0, c, p, skeleton_options(cfg, false)).final_state;
  } else {
    target = cfg.field_from_spec(cfg.target_field);
  }

  RateResult r = rate_endpoint(target, x0, c, p, opt);
  write_scalar_control_csv(out.path("control_f.csv"), r.control.f);
  write_intensity_control_csv(out.path("control_g.csv"), r.control.g);
  write_trajectory_csv(out.path("trajectory.csv"), r.trajectory);
  std::vector<std::vector<double>> rows;
  for (const auto& t : r.trace)
    rows.push_back({double(t.stage), double(t.iter), t.penalty_weight, t.objective, t.cost,
                    t.residual});
  write_table_csv(out.path("trace.csv"), "stage,iter,penalty_weight,objective,cost,residual",
                  rows);
  write_summary(out, {"value=" + format_double(r.value),
                      "terminal_residual=" + format_double(r.terminal_residual),
                      std::string("converged=") + (r.converged ? "yes" : "no")});
  std::cout << "rate value=" << format_double(r.value)
            << " residual=" << format_double(r.terminal_residual) << "\n";
  return 0;
}

int run_mc_y(const ExperimentConfig& cfg, OutputSet& out) {
  CoefficientSet c = cfg.coefficients();
  FluidParams p = cfg.fluid();
  SpectralField x0 = cfg.initial_state();
  ScalarControl f = cfg.scalar_control();
  IntensityControl g = cfg.intensity_control();

  std::vector<std::vector<double>> rows;
  std::vector<double> log_eps, log_est;
  for (std::size_t ei = 0; ei < cfg.eps_list.size(); ++ei) {
    double eps = cfg.eps_list[ei];
    std::vector<double> sup2(cfg.paths, 0.0);
    parallel_for(static_cast<std::size_t>(cfg.paths), [&](std::size_t k) {
      SpdeOptions o = spde_options(cfg, false);
      o.track_convolution = true;
      o.seed = derive_seed(cfg.master_seed, 0x77, (ei << 24) ^ k);
      SpdePath path = solve_spde(x0, eps, &f, &g, c, p, o);
      double s = path.convolution.sup_norm_w();
      sup2[k] = s * s;
    });
    double mean = 0.0;
    for (double s : sup2) mean += s;
    mean /= cfg.paths;
    double var = 0.0;
    for (double s : sup2) var += (s - mean) * (s - mean);
    double se = std::sqrt(var / (cfg.paths - 1) / cfg.paths);
    rows.push_back({eps, mean, se, double(cfg.paths)});
    log_eps.push_back(std::log(eps));
    log_est.push_back(std::log(mean));
  }
  write_table_csv(out.path("y_moments.csv"), "eps,estimator,stderr,n_paths", rows);

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = log_eps.size();
  for (std::size_t i = 0; i < n; ++i) {
    sx += log_eps[i];
    sy += log_est[i];
    sxx += log_eps[i] * log_eps[i];
    sxy += log_eps[i] * log_est[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  bool ok = slope >= 0.8 && slope <= 1.2;
  write_summary(out, {"slope=" + format_double(slope),
                      std::string(ok ? "[PASS]" : "[FAIL]") + " slope within [0.8, 1.2]"});
  std::cout << "noise-component scaling slope=" << format_double(slope) << "\n";
  return ok ? 0 : 1;
}

int run_mc_c2(const ExperimentConfig& cfg, OutputSet& out) {
  CoefficientSet c = cfg.coefficients();
  FluidParams p = cfg.fluid();
  ScalarControl f = cfg.scalar_control();
  IntensityControl g = cfg.intensity_control();
  auto table = small_noise_convergence(&f, &g, cfg.eps_list, cfg.paths, cfg.initial_state(),
                                       c, p, spde_options(cfg, true), cfg.master_seed);
  std::vector<std::vector<double>> rows;
  for (const auto& r : table) rows.push_back({r.eps, r.mean_bounded_dist, r.stderr_});
  write_table_csv(out.path("c2_distance.csv"), "eps,estimator,stderr", rows);
  bool monotone = true;
  for (std::size_t i = 1; i < table.size(); ++i)
    monotone = monotone && table[i].mean_bounded_dist <= table[i - 1].mean_bounded_dist;
  bool small = table.empty() ? false : table.back().mean_bounded_dist <= 0.05;
  write_summary(out,
                {std::string(monotone ? "[PASS]" : "[FAIL]") + " monotone decrease",
                 std::string(small ? "[PASS]" : "[FAIL]") + " final distance <= 0.05",
                 "final=" + format_double(table.empty() ? 1.0 : table.back().mean_bounded_dist)});
  return monotone && small ? 0 : 1;
}

int run_mc_ldp(const ExperimentConfig& cfg, OutputSet& out) {
  CoefficientSet c = cfg.coefficients();
  FluidParams p = cfg.fluid();
  EndpointOptions ropt;
  ropt.horizon = cfg.horizon;
  ropt.dt = cfg.dt;
  ropt.f_intervals = cfg.f_intervals;
  ropt.g_intervals = cfg.g_intervals;
  ropt.penalty_schedule = cfg.penalty_schedule;
  ropt.nonlinearity = cfg.nonlinearity;
  std::vector<SpectralField> rays;
  for (int tag : cfg.ray_tags)
    rays.push_back(smooth_profile_field(p.mode_cutoff, p.domain_side, tag, 1.0));
  if (cfg.family == "brownian_diagnostic")
    rays.push_back(cfg.field_from_spec(cfg.gain_field));
  RareEventStudy study =
      rare_event_study(cfg.radius, cfg.eps_list, cfg.paths, cfg.initial_state(), c, p,
                       spde_options(cfg, false), rays, ropt, cfg.master_seed);
  std::vector<std::vector<double>> rows;
  for (const auto& r : study.rows)
    rows.push_back({r.eps, double(r.hits), double(r.paths), r.p_hat, r.stderr_,
                    r.neg_eps_log_p, r.flagged ? 1.0 : 0.0});
  write_table_csv(out.path("rare_event.csv"),
                  "eps,hits,paths,p_hat,stderr,neg_eps_log_p,flagged", rows);
  write_summary(
      out, {"rate_bound=" + format_double(study.rate_bound),
            "importance_eps=" + format_double(study.importance_eps),
            "importance_p_hat=" + format_double(study.importance_p_hat),
            "importance_variance_ratio=" + format_double(study.importance_variance_ratio)});
  std::cout << "rate_bound=" << format_double(study.rate_bound)
            << " importance_variance_ratio=" << format_double(study.importance_variance_ratio)
            << "\n";
  return 0;
}

int run_girsanov_check(const ExperimentConfig& cfg, OutputSet& out) {
  MarkSpace marks = cfg.marks();
  double eps = cfg.eps_list.front();
  ScalarControl shift = ScalarControl::constant(cfg.girsanov_shift, cfg.horizon);
  IntensityControl tilt =
      IntensityControl::constant(cfg.girsanov_tilt, cfg.horizon, marks.size());

  std::vector<double> wb(cfg.paths), wj(cfg.paths), wboth(cfg.paths);
  parallel_for(static_cast<std::size_t>(cfg.paths), [&](std::size_t k) {
    NoiseRealization noise =
        sample_noise(eps, &tilt, marks, cfg.horizon, cfg.dt,
                     derive_seed(cfg.master_seed, 0x6e, k));
    wb[k] = std::exp(girsanov_log_brownian(shift, noise));
    wj[k] = std::exp(girsanov_log_jump(tilt, marks, noise));
    wboth[k] = wb[k] * wj[k];
  });
  auto mean_se = [&](const std::vector<double>& w) {
    double m = 0.0;
    for (double x : w) m += x;
    m /= w.size();
    double v = 0.0;
    for (double x : w) v += (x - m) * (x - m);
    return std::pair<double, double>(m, std::sqrt(v / (w.size() - 1) / w.size()));
  };
  auto [mb, sb] = mean_se(wb);
  auto [mj, sj] = mean_se(wj);
  auto [mt, st] = mean_se(wboth);
  bool ok = std::abs(mb - 1.0) <= 3.0 * sb && std::abs(mj - 1.0) <= 3.0 * sj &&
            std::abs(mt - 1.0) <= 3.0 * st;
  write_table_csv(out.path("girsanov.csv"), "estimator,mean,stderr",
                  {{0.0, mb, sb}, {1.0, mj, sj}, {2.0, mt, st}});
  write_summary(out, {"brownian_mean=" + format_double(mb) + " se=" + format_double(sb),
                      "jump_mean=" + format_double(mj) + " se=" + format_double(sj),
                      "joint_mean=" + format_double(mt) + " se=" + format_double(st),
                      std::string(ok ? "[PASS]" : "[FAIL]") + " martingale means within 3 se"});
  std::cout << (ok ? "[PASS]" : "[FAIL]") << " girsanov martingale means: " << mb << ", "
            << mj << ", " << mt << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral toolkit for the 2D stochastic second-grade fluid: simulation, "
               "skeleton solves and small-noise rare-event studies"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;

  const std::vector<std::pair<std::string, int (*)(const ExperimentConfig&, OutputSet&)>>
      commands = {{"skeleton", run_skeleton},
                  {"simulate", run_simulate},
                  {"verify-operators", run_verify_operators},
                  {"check-coefficients", run_check_coefficients},
                  {"rate", run_rate},
                  {"mc-y", run_mc_y},
                  {"mc-c2", run_mc_c2},
                  {"mc-ldp", run_mc_ldp},
                  {"girsanov-check", run_girsanov_check}};

  for (const auto& [name, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--set", overrides, "override, section.key=value");
    sub->add_option("--out", out_dir, "output directory");
  }

  CLI11_PARSE(app, argc, argv);

  for (const auto& [name, fn] : commands) {
    if (!app.got_subcommand(name)) continue;
    try {
      ExperimentConfig cfg = load_config(config_path);
      for (const auto& o : overrides) apply_override(cfg, o);
      OutputSet out(out_dir);
      write_manifest(out, name, cfg);
      try {
        return fn(cfg, out);
      } catch (...) {
        out.discard_all();
        throw;
      }
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 2;
}
