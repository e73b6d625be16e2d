#pragma once

#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include "mwc/analysis.hpp"
#include "mwc/config.hpp"
#include "mwc/error.hpp"
#include "mwc/sim.hpp"
#include "mwc/switching.hpp"

namespace mwc::cli {

struct RunOverrides {
  std::optional<double> horizon;
  std::optional<double> sample_dt;
};

inline const char* holds(bool b) { return b ? "holds" : "violated"; }

/// Validation only. Exit 0 iff graphs and schedule are valid.
inline int cmd_check(const std::string& config_path, std::ostream& out, std::ostream& err) {
  ScenarioConfig c;
  try {
    c = load_config(config_path, /*validate=*/false);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  const ConfigValidation v = validate_config(c);
  if (v.schedule) {
    out << "Assumption 1: " << holds(v.schedule->assumption1) << " (alpha = " << c.schedule.alpha() << ")\n";
    out << "Assumption 2: " << v.schedule->assumption2_note << "\n";
    out << "Assumption 3: " << holds(v.schedule->assumption3) << "\n";
  }
  if (v.ok()) {
    out << "ok: " << c.graphs().size() << " graph(s), " << c.schedule.size() << " segment(s), n = " << c.num_agents
        << ", d = " << c.dimension << "\n";
    return 0;
  }
  for (const auto& issue : v.issues) err << "violation: " << issue << "\n";
  return 1;
}

inline std::string format_block(const Vector& x, int i, int d) {
  std::string s = "[";
  for (int k = 0; k < d; ++k) s += (k ? ", " : "") + format_real(x(i * d + k));
  return s + "]";
}

inline void print_clusters(std::ostream& out, const std::vector<std::vector<int>>& clusters) {
  out << "clusters (" << clusters.size() << "):";
  for (const auto& c : clusters) {
    out << " {";
    for (std::size_t k = 0; k < c.size(); ++k) out << (k ? "," : "") << c[k] + 1;
    out << "}";
  }
  out << "\n";
}

inline Trajectory run_simulation(const ScenarioConfig& c, const RunOverrides& o) {
  const double horizon = o.horizon.value_or(c.horizon());
  const double sample_dt = o.sample_dt.value_or(c.solver.sample_dt);
  if (c.solver.method == "rk4") {
    return simulate_rk4(c.schedule, c.initial_state, horizon, c.solver.step_h, sample_dt, c.tolerances.eig_tol);
  }
  return simulate_exact(c.schedule, c.initial_state, horizon, sample_dt, c.tolerances.eig_tol);
}

/// Writes the trajectory CSV to out_path (or to `out` when empty) and a summary.
inline int cmd_simulate(const std::string& config_path, const std::string& out_path, const RunOverrides& o,
                        std::ostream& out, std::ostream& err) {
  try {
    const ScenarioConfig c = load_config(config_path);
    const Trajectory traj = run_simulation(c, o);
    std::ostream* summary = &out;
    if (out_path.empty()) {
      write_trajectory_csv(out, traj);
      summary = &err;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + out_path);
      write_trajectory_csv(f, traj);
    }
    const Vector& x = traj.final_state();
    *summary << "final state at t = " << format_real(traj.times.back()) << ":\n";
    for (int i = 0; i < c.num_agents; ++i) {
      *summary << "  x_" << i + 1 << " = " << format_block(x, i, c.dimension) << "\n";
    }
    print_clusters(*summary, extract_clusters(x, c.num_agents, c.dimension, c.tolerances.cluster_tol));
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

/// Certification plus steady-state prediction, written as a JSON report.
inline json analyze(const ScenarioConfig& c) {
  CertifyOptions opt;
  opt.eig_tol = c.tolerances.eig_tol;
  opt.ns_eq_tol = c.tolerances.ns_eq_tol;
  const CertificationReport r = certify_cluster_consensus(c.schedule, c.windows.resolve(c.schedule), opt);
  const ConsensusPrediction p =
      predict_steady_state(r.basis(), c.initial_state, c.dimension, c.tolerances.cluster_tol);
  return report_json(r, p, c.tolerances.conv_tol);
}

inline int cmd_analyze(const std::string& config_path, const std::string& out_path, std::ostream& out,
                       std::ostream& err) {
  try {
    const ScenarioConfig c = load_config(config_path);
    const json report = analyze(c);
    const std::string text = report.dump(2) + "\n";
    if (out_path.empty()) {
      out << text;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + out_path);
      f << text;
      out << "certified: " << (report["certified"].get<bool>() ? "true" : "false") << ", m = " << report["m"]
          << ", q_estimate = " << format_real(report["q_estimate"].get<double>()) << ", kind = "
          << report["kind"].get<std::string>() << "\n";
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mwc::cli
