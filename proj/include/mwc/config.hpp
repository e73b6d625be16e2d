#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mwc/analysis.hpp"
#include "mwc/error.hpp"
#include "mwc/graph.hpp"
#include "mwc/sim.hpp"
#include "mwc/switching.hpp"

namespace mwc {

using json = nlohmann::ordered_json;

struct SolverConfig {
  std::string method = "exact";  // exact | rk4
  double sample_dt = 0.1;
  double step_h = 1e-3;
  std::optional<double> horizon;  // defaults to the schedule duration

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

struct ToleranceConfig {
  double eig_tol = kDefaultEigTol;
  double ns_eq_tol = kDefaultNullSpaceEqTol;
  double cluster_tol = kDefaultClusterTol;
  double conv_tol = kDefaultConvTol;

  friend bool operator==(const ToleranceConfig&, const ToleranceConfig&) = default;
};

struct WindowSpec {
  enum class Kind { Period, Segments, Uniform, List };
  Kind kind = Kind::Period;
  int length = 0;             // Uniform
  std::vector<Window> list;   // List

  std::vector<Window> resolve(const SwitchingSchedule& s) const {
    switch (kind) {
      case Kind::Period: return period_windows(s);
      case Kind::Segments: return uniform_windows(s, 1);
      case Kind::Uniform: return uniform_windows(s, length);
      case Kind::List: return list;
    }
    return {};
  }

  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

struct ScenarioConfig {
  int dimension = 0;
  int num_agents = 0;
  SwitchingSchedule schedule;  // owns the graph catalog; graph labels are the ids
  Vector initial_state;
  SolverConfig solver;
  ToleranceConfig tolerances;
  WindowSpec windows;

  const std::vector<MatrixWeightedGraph>& graphs() const { return schedule.graphs(); }
  double horizon() const { return solver.horizon.value_or(schedule.duration()); }

  friend bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
    return a.dimension == b.dimension && a.num_agents == b.num_agents && a.schedule == b.schedule &&
           a.initial_state == b.initial_state && a.solver == b.solver && a.tolerances == b.tolerances &&
           a.windows == b.windows;
  }
};

namespace detail {

[[noreturn]] inline void invalid(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ValidationError, field + ": " + what);
}

inline const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) invalid(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) invalid(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

template <typename T>
T as(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    invalid(path, e.what());
  }
}

inline double as_real(const json& j, const std::string& path) {
  if (!j.is_number()) invalid(path, "expected a number");
  return j.get<double>();
}

inline int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) invalid(path, "expected an integer");
  return j.get<int>();
}

inline MatrixWeightedGraph parse_graph(const json& jg, int n, int d, const std::string& path) {
  const std::string id = as<std::string>(field(jg, "id", path), path + ".id");
  MatrixWeightedGraph g(n, d, id);
  const json& edges = field(jg, "edges", path);
  if (!edges.is_array()) invalid(path + ".edges", "expected an array");
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string ep = path + ".edges[" + std::to_string(k) + "]";
    const int i = as_int(field(edges[k], "i", ep), ep + ".i");
    const int j = as_int(field(edges[k], "j", ep), ep + ".j");
    if (i < 1 || i > n || j < 1 || j > n) invalid(ep, "node ids must lie in 1.." + std::to_string(n));
    const json& w = field(edges[k], "weight", ep);
    if (!w.is_array() || static_cast<int>(w.size()) != d) invalid(ep + ".weight", "expected a " + std::to_string(d) + "x" + std::to_string(d) + " array");
    Matrix m(d, d);
    for (int r = 0; r < d; ++r) {
      if (!w[r].is_array() || static_cast<int>(w[r].size()) != d) invalid(ep + ".weight", "row " + std::to_string(r) + " must have " + std::to_string(d) + " entries");
      for (int c = 0; c < d; ++c) m(r, c) = as_real(w[r][c], ep + ".weight");
    }
    g.add_edge(i - 1, j - 1, std::move(m));
  }
  return g;
}

inline SwitchingSchedule parse_schedule(const json& js, std::vector<MatrixWeightedGraph> graphs) {
  const std::string type = as<std::string>(field(js, "type", "schedule"), "schedule.type");
  std::map<std::string, int> ids;
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    if (!ids.emplace(graphs[k].label(), static_cast<int>(k)).second) {
      invalid("graphs[" + std::to_string(k) + "].id", "duplicate id '" + graphs[k].label() + "'");
    }
  }
  auto lookup = [&](const json& j, const std::string& path) {
    const auto id = as<std::string>(j, path);
    auto it = ids.find(id);
    if (it == ids.end()) invalid(path, "unknown graph '" + id + "'");
    return it->second;
  };
  if (type == "generated") {
    const json& gen = field(js, "generator", "schedule");
    const auto name = as<std::string>(field(gen, "name", "schedule.generator"), "schedule.generator.name");
    const auto which = parse_generator(name);
    if (!which) invalid("schedule.generator.name", "unknown generator '" + name + "'");
    const json& params = field(gen, "params", "schedule.generator");
    const int base = lookup(field(params, "base", "schedule.generator.params"), "schedule.generator.params.base");
    const int k = as_int(field(params, "K", "schedule.generator.params"), "schedule.generator.params.K");
    if (k < 1) invalid("schedule.generator.params.K", "must be >= 1");
    return SwitchingSchedule::generated(graphs[base], *which, k);
  }
  if (type != "periodic" && type != "explicit") invalid("schedule.type", "expected periodic|explicit|generated");
  const json& pattern = field(js, "pattern", "schedule");
  if (!pattern.is_array()) invalid("schedule.pattern", "expected an array");
  std::vector<Segment> segments;
  for (std::size_t k = 0; k < pattern.size(); ++k) {
    const std::string sp = "schedule.pattern[" + std::to_string(k) + "]";
    double scale = 1.0;
    if (auto it = pattern[k].find("scale"); it != pattern[k].end()) scale = as_real(*it, sp + ".scale");
    if (!(scale > 0)) invalid(sp + ".scale", "must be positive");
    segments.push_back({lookup(field(pattern[k], "graph", sp), sp + ".graph"),
                        as_real(field(pattern[k], "dwell", sp), sp + ".dwell"), scale});
  }
  const double alpha = as_real(field(js, "alpha", "schedule"), "schedule.alpha");
  if (type == "explicit") return SwitchingSchedule::explicit_schedule(std::move(graphs), std::move(segments), alpha);
  const int reps = as_int(field(js, "repetitions", "schedule"), "schedule.repetitions");
  if (reps < 1) invalid("schedule.repetitions", "must be >= 1");
  return SwitchingSchedule::periodic(std::move(graphs), std::move(segments), reps, alpha);
}

inline WindowSpec parse_windows(const json& jw) {
  WindowSpec w;
  if (jw.is_string()) {
    const auto s = jw.get<std::string>();
    if (s == "period") return w;
    if (s == "segments") {
      w.kind = WindowSpec::Kind::Segments;
      return w;
    }
    invalid("windows", "expected \"period\", \"segments\", {\"length\": k} or a list of [start, end]");
  }
  if (jw.is_object()) {
    w.kind = WindowSpec::Kind::Uniform;
    w.length = as_int(field(jw, "length", "windows"), "windows.length");
    if (w.length < 1) invalid("windows.length", "must be >= 1");
    return w;
  }
  if (!jw.is_array()) invalid("windows", "unsupported window specification");
  w.kind = WindowSpec::Kind::List;
  for (std::size_t k = 0; k < jw.size(); ++k) {
    const std::string path = "windows[" + std::to_string(k) + "]";
    if (!jw[k].is_array() || jw[k].size() != 2) invalid(path, "expected [start, end]");
    w.list.push_back({as_int(jw[k][0], path), as_int(jw[k][1], path)});
  }
  return w;
}

inline std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace detail

struct ConfigValidation {
  std::vector<std::string> issues;
  std::optional<ScheduleValidation> schedule;

  bool ok() const { return issues.empty(); }
};

/// Graph, schedule and initial-state checks, itemized rather than thrown.
inline ConfigValidation validate_config(const ScenarioConfig& c) {
  ConfigValidation v;
  if (c.num_agents < 2) v.issues.push_back("num_agents: need at least two agents");
  if (c.initial_state.size() != static_cast<Eigen::Index>(c.dimension) * c.num_agents) {
    v.issues.push_back("initial_state: length " + std::to_string(c.initial_state.size()) + " != d*n = " +
                       std::to_string(c.dimension * c.num_agents));
  }
  v.schedule = validate_schedule(c.schedule, c.tolerances.eig_tol);
  for (const auto& issue : v.schedule->issues) {
    v.issues.push_back(std::string(to_string(issue.code)) + ": " + issue.message);
  }
  if (c.solver.method != "exact" && c.solver.method != "rk4") {
    v.issues.push_back("solver.method: expected exact|rk4, got '" + c.solver.method + "'");
  }
  if (!(c.solver.sample_dt > 0)) v.issues.push_back("solver.sample_dt: must be positive");
  if (!(c.solver.step_h > 0)) v.issues.push_back("solver.step_h: must be positive");
  if (c.solver.horizon && !(*c.solver.horizon > 0)) v.issues.push_back("solver.horizon: must be positive");
  if (v.schedule->ok() && c.windows.kind == WindowSpec::Kind::List) {
    for (const auto& w : c.windows.list) {
      if (w.end <= w.start || w.start < 0 || w.end > c.schedule.size()) {
        v.issues.push_back("windows: [" + std::to_string(w.start) + "," + std::to_string(w.end) +
                           ") is not a window of the schedule");
      }
    }
  }
  return v;
}

/// Parses config JSON. With validate = true every check of validate_config
/// must pass or a ValidationError is thrown naming the first problem.
inline ScenarioConfig parse_config(const std::string& text, bool validate = true) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(detail::line_of(text, e.byte)) + ": " + e.what());
  }
  ScenarioConfig c;
  c.dimension = detail::as_int(detail::field(j, "dimension", ""), "dimension");
  c.num_agents = detail::as_int(detail::field(j, "num_agents", ""), "num_agents");
  if (c.dimension < 1) detail::invalid("dimension", "must be >= 1");
  if (c.num_agents < 1) detail::invalid("num_agents", "must be >= 1");
  const json& jgraphs = detail::field(j, "graphs", "");
  if (!jgraphs.is_array() || jgraphs.empty()) detail::invalid("graphs", "expected a nonempty array");
  std::vector<MatrixWeightedGraph> graphs;
  for (std::size_t k = 0; k < jgraphs.size(); ++k) {
    graphs.push_back(detail::parse_graph(jgraphs[k], c.num_agents, c.dimension, "graphs[" + std::to_string(k) + "]"));
  }
  c.schedule = detail::parse_schedule(detail::field(j, "schedule", ""), std::move(graphs));
  const auto x0 = detail::as<std::vector<double>>(detail::field(j, "initial_state", ""), "initial_state");
  c.initial_state = Eigen::Map<const Vector>(x0.data(), static_cast<Eigen::Index>(x0.size()));
  if (auto it = j.find("solver"); it != j.end()) {
    const json& s = *it;
    if (s.contains("method")) c.solver.method = detail::as<std::string>(s["method"], "solver.method");
    if (s.contains("sample_dt")) c.solver.sample_dt = detail::as_real(s["sample_dt"], "solver.sample_dt");
    if (s.contains("step_h")) c.solver.step_h = detail::as_real(s["step_h"], "solver.step_h");
    if (s.contains("horizon")) c.solver.horizon = detail::as_real(s["horizon"], "solver.horizon");
  }
  if (auto it = j.find("tolerances"); it != j.end()) {
    const json& t = *it;
    if (t.contains("eig_tol")) c.tolerances.eig_tol = detail::as_real(t["eig_tol"], "tolerances.eig_tol");
    if (t.contains("ns_eq_tol")) c.tolerances.ns_eq_tol = detail::as_real(t["ns_eq_tol"], "tolerances.ns_eq_tol");
    if (t.contains("cluster_tol")) c.tolerances.cluster_tol = detail::as_real(t["cluster_tol"], "tolerances.cluster_tol");
    if (t.contains("conv_tol")) c.tolerances.conv_tol = detail::as_real(t["conv_tol"], "tolerances.conv_tol");
  }
  if (auto it = j.find("windows"); it != j.end()) c.windows = detail::parse_windows(*it);
  if (validate) {
    const ConfigValidation v = validate_config(c);
    if (!v.ok()) throw Error(ErrorCode::ValidationError, v.issues.front());
  }
  return c;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ScenarioConfig load_config(const std::string& path, bool validate = true) {
  return parse_config(read_file(path), validate);
}

inline json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

inline json graph_json(const MatrixWeightedGraph& g) {
  json edges = json::array();
  for (const auto& e : g.edges()) {
    edges.push_back({{"i", e.i + 1}, {"j", e.j + 1}, {"weight", matrix_json(e.weight)}});
  }
  return {{"id", g.label()}, {"edges", std::move(edges)}};
}

inline json config_json(const ScenarioConfig& c) {
  json j;
  j["dimension"] = c.dimension;
  j["num_agents"] = c.num_agents;
  const auto& s = c.schedule;
  json graphs = json::array();
  for (const auto& g : s.graphs()) graphs.push_back(graph_json(g));
  j["graphs"] = std::move(graphs);
  json js;
  if (s.mode() == ScheduleMode::Generated) {
    js["type"] = "generated";
    js["generator"] = {{"name", generator_name(s.generator())},
                       {"params", {{"base", s.graphs().front().label()}, {"K", s.intervals()}}}};
  } else {
    js["type"] = s.mode() == ScheduleMode::Periodic ? "periodic" : "explicit";
    json pattern = json::array();
    for (const auto& seg : s.pattern()) {
      json entry = {{"graph", s.graphs()[seg.graph].label()}, {"dwell", seg.dwell}};
      if (seg.scale != 1.0) entry["scale"] = seg.scale;
      pattern.push_back(std::move(entry));
    }
    js["pattern"] = std::move(pattern);
    if (s.mode() == ScheduleMode::Periodic) js["repetitions"] = s.repetitions();
    js["alpha"] = s.alpha();
  }
  j["schedule"] = std::move(js);
  j["initial_state"] = vector_json(c.initial_state);
  json solver = {{"method", c.solver.method}, {"sample_dt", c.solver.sample_dt}, {"step_h", c.solver.step_h}};
  if (c.solver.horizon) solver["horizon"] = *c.solver.horizon;
  j["solver"] = std::move(solver);
  j["tolerances"] = {{"eig_tol", c.tolerances.eig_tol},
                     {"ns_eq_tol", c.tolerances.ns_eq_tol},
                     {"cluster_tol", c.tolerances.cluster_tol},
                     {"conv_tol", c.tolerances.conv_tol}};
  switch (c.windows.kind) {
    case WindowSpec::Kind::Period: j["windows"] = "period"; break;
    case WindowSpec::Kind::Segments: j["windows"] = "segments"; break;
    case WindowSpec::Kind::Uniform: j["windows"] = {{"length", c.windows.length}}; break;
    case WindowSpec::Kind::List: {
      json list = json::array();
      for (const auto& w : c.windows.list) list.push_back({w.start, w.end});
      j["windows"] = std::move(list);
      break;
    }
  }
  return j;
}

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Header t,x_1_1,...,x_n_d then one row per sample, 17 significant digits.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t";
  for (int i = 1; i <= traj.n; ++i) {
    for (int k = 1; k <= traj.d; ++k) out << ",x_" << i << "_" << k;
  }
  out << "\n";
  for (std::size_t s = 0; s < traj.size(); ++s) {
    out << format_real(traj.times[s]);
    const Vector& x = traj.states[s];
    for (Eigen::Index k = 0; k < x.size(); ++k) out << "," << format_real(x(k));
    out << "\n";
  }
}

inline json nodes_json(const std::vector<int>& nodes) {
  json a = json::array();
  for (int v : nodes) a.push_back(v + 1);
  return a;
}

inline json clusters_json(const std::vector<std::vector<int>>& clusters) {
  json a = json::array();
  for (const auto& c : clusters) a.push_back(nodes_json(c));
  return a;
}

/// Analysis report: certification fields, per-window integral graphs, basis and x*.
inline json report_json(const CertificationReport& r, const ConsensusPrediction& p, double conv_tol) {
  json j;
  j["certified"] = r.certified;
  j["window_nullspaces_equal"] = r.window_nullspaces_equal;
  j["m"] = r.m;
  j["q_estimate"] = r.q_estimate;
  if (r.q_estimate > 0 && r.q_estimate < 1) {
    j["decay_horizon_windows"] = std::log(conv_tol) / std::log(std::sqrt(r.q_estimate));
  } else {
    j["decay_horizon_windows"] = nullptr;
  }
  j["mu"] = r.mu;
  if (r.balance) {
    j["balance"] = {{"V1", nodes_json(r.balance->v1())}, {"V2", nodes_json(r.balance->v2())}};
  } else {
    j["balance"] = nullptr;
  }
  j["pn_spanning_tree"] = r.pn_spanning_tree;
  json windows = json::array();
  for (const auto& w : r.windows) {
    json edges = json::array();
    for (const auto& e : checked_edges(w.integral.graph)) {
      edges.push_back({{"i", e.i + 1},
                       {"j", e.j + 1},
                       {"class", to_string(e.cls)},
                       {"weight", matrix_json(e.weight.matrix())}});
    }
    windows.push_back({{"start", w.integral.window.start},
                       {"end", w.integral.window.end},
                       {"null_dim", w.basis.dim()},
                       {"mu", w.mu},
                       {"nullspace_distance_to_previous", w.distance_to_previous},
                       {"pn_spanning_tree", w.pn_spanning_tree},
                       {"edges", std::move(edges)}});
  }
  j["windows"] = std::move(windows);
  json basis = json::array();
  for (Eigen::Index k = 0; k < p.basis.dim(); ++k) basis.push_back(vector_json(p.basis.vector(k)));
  j["basis"] = std::move(basis);
  j["kind"] = to_string(p.kind);
  j["x_star"] = vector_json(p.steady_state);
  j["clusters"] = clusters_json(p.clusters);
  return j;
}

}  // namespace mwc
