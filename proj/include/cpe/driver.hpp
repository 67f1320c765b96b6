#pragma once

#include <cmath>
#include <filesystem>

#include "cpe/analysis.hpp"
#include "cpe/initial.hpp"
#include "cpe/io.hpp"
#include "cpe/physmap.hpp"

namespace cpe {

inline Params<double> params_from_config(const RunConfig& cfg) {
  Params<double> pr;
  pr.dim_h = cfg.dim_h;
  pr.gamma = cfg.gamma;
  pr.g = cfg.g;
  pr.mu = cfg.mu;
  pr.lambda = cfg.lambda;
  pr.variant = cfg.variant;
  pr.validate();
  return pr;
}

inline State<double> build_initial_state(const RunConfig& cfg) {
  const Params<double> pr = params_from_config(cfg);
  const int ny = cfg.dim_h == 2 ? (cfg.ny > 0 ? cfg.ny : cfg.nx) : 1;
  auto grid = make_grid(cfg.dim_h, cfg.nx, ny, cfg.nz, pr.alpha());
  State<double> s = perturbed_ic(grid, pr, cfg.eps, {}, {}, cfg.seed);
  if (cfg.zero_momentum) s = project_zero_momentum(s);
  return s;
}

inline StepConfig<double> step_config_from(const RunConfig& cfg) {
  StepConfig<double> sc;
  sc.dt = cfg.dt;
  sc.scheme = cfg.scheme;
  return sc;
}

// Runs the configured simulation, writing diagnostics.csv, a copy of the
// config, and optional periodic snapshots into out_dir.  Returns the process
// exit code: 0 on completion, 2 when the surface leaves the validity band.
inline int run_simulation(const RunConfig& cfg, const std::string& config_text) {
  namespace fs = std::filesystem;
  State<double> state = build_initial_state(cfg);
  const StepConfig<double> sc = step_config_from(cfg);
  if (!(cfg.t_end > 0)) throw ConfigError("invalid value for key: t_end");
  if (cfg.diag_every < 1) throw ConfigError("invalid value for key: diag_every");
  const long n_steps = std::lround(cfg.t_end / cfg.dt);
  if (n_steps < 1) throw ConfigError("invalid value for key: dt");

  fs::create_directories(cfg.out_dir);
  {
    std::ofstream copy(fs::path(cfg.out_dir) / "config.txt", std::ios::binary);
    copy << config_text;
  }
  std::ofstream csv(fs::path(cfg.out_dir) / "diagnostics.csv", std::ios::binary);
  csv << diag_csv_header() << '\n';
  write_diag_row(csv, collect_diagnostics(state));

  auto snapshot_path = [&](long i) {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%06ld.bin", i);
    return (fs::path(cfg.out_dir) / name).string();
  };
  if (cfg.snapshot_every > 0)
    write_snapshot(snapshot_path(0), state, vertical_velocity(state));

  for (long i = 1; i <= n_steps; ++i) {
    try {
      state = step(state, sc);
    } catch (const ValidityError&) {
      csv.flush();
      return 2;
    }
    if (i % cfg.diag_every == 0 || i == n_steps)
      write_diag_row(csv, collect_diagnostics(state));
    if (cfg.snapshot_every > 0 && (i % cfg.snapshot_every == 0 || i == n_steps))
      write_snapshot(snapshot_path(i), state, vertical_velocity(state));
  }
  return 0;
}

inline int run_icgen(const RunConfig& cfg, const std::string& out_path) {
  State<double> state = build_initial_state(cfg);
  write_snapshot(out_path, state, vertical_velocity(state));
  return 0;
}

namespace detail {

inline void write_verify_row(std::ostream& out, const std::string& check,
                             const std::string& label, double lhs, double rhs,
                             double ratio, int flag) {
  out << check << ',' << label << ',' << format_g17(lhs) << ',' << format_g17(rhs)
      << ',' << format_g17(ratio) << ',' << flag << '\n';
}

}  // namespace detail

// Inequality batteries: closed-form weighted-inequality examples including a
// mandated divergent case, a zero-momentum family for the weighted Poincare
// bound, and the energy-equivalence constant across an amplitude sweep.
inline int run_verify(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  std::ofstream csv(fs::path(cfg.out_dir) / "verify.csv", std::ios::binary);
  csv << "check,label,lhs,rhs,ratio,flag\n";

  using Fn = std::function<double(double)>;
  const Fn linear = [](double s) { return s; };
  const Fn quarter_root = [](double s) { return std::pow(s, 0.25); };

  auto hr = check_hardy<double>(linear, 2.0, 1.0, HardyCase::whole_interval);
  detail::write_verify_row(csv, "hardy", "whole_interval_linear", hr.lhs, hr.rhs,
                           hr.ratio, hr.lhs_divergent || hr.rhs_divergent);
  hr = check_hardy<double>(linear, 0.0, 1.0, HardyCase::zero_trace);
  detail::write_verify_row(csv, "hardy", "zero_trace_linear", hr.lhs, hr.rhs, hr.ratio,
                           hr.lhs_divergent || hr.rhs_divergent);
  hr = check_hardy<double>(linear, 2.0, 1.0, HardyCase::truncated, 0.5);
  detail::write_verify_row(csv, "hardy", "truncated_linear", hr.lhs, hr.rhs, hr.ratio,
                           hr.lhs_divergent || hr.rhs_divergent);
  hr = check_hardy<double>(quarter_root, 0.0, 1.0, HardyCase::zero_trace);
  detail::write_verify_row(csv, "hardy", "quarter_root_divergent", hr.lhs, hr.rhs,
                           hr.ratio, hr.rhs_divergent);

  const Params<double> pr = params_from_config(cfg);
  const int ny = cfg.dim_h == 2 ? (cfg.ny > 0 ? cfg.ny : cfg.nx) : 1;
  auto grid = make_grid(cfg.dim_h, cfg.nx, ny, cfg.nz, pr.alpha());
  for (int s = 1; s <= 20; ++s) {
    State<double> member = perturbed_ic(grid, pr, cfg.eps, {}, {},
                                        cfg.seed + static_cast<std::uint64_t>(s));
    member = project_zero_momentum(member);
    const auto rep = check_poincare(member, vertical_velocity(member), 1.0);
    detail::write_verify_row(csv, "poincare", "member_" + std::to_string(s), rep.lhs,
                             rep.rhs, rep.ratio, 0);
  }

  for (const double eps : {1e-4, 1e-3}) {
    std::vector<State<double>> family;
    for (int s = 1; s <= 5; ++s)
      family.push_back(perturbed_ic(grid, pr, eps, {}, {},
                                    cfg.seed + static_cast<std::uint64_t>(s)));
    const auto rep = check_energy_equivalence(family);
    detail::write_verify_row(csv, "equivalence", "eps_" + format_g17(eps), rep.C,
                             rep.C, 1.0, rep.violation);
  }
  return 0;
}

}  // namespace cpe
