#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mwc/error.hpp"
#include "mwc/graph.hpp"
#include "mwc/matalg.hpp"

namespace mwc {

/// One dwell interval: graph `graph` of the catalog, weights multiplied by `scale`.
struct Segment {
  int graph = 0;
  double dwell = 1.0;
  double scale = 1.0;

  friend bool operator==(const Segment&, const Segment&) = default;
};

enum class ScheduleMode { Explicit, Periodic, Generated };

/// Generated schedules built from a single base graph with unit dwells.
enum class Generator {
  Remark3Decay,   // weights scaled by 1/k^2 on [k-1, k)
  Remark3Growth,  // weights scaled by k on [k-1, k)
};

inline const char* generator_name(Generator g) {
  return g == Generator::Remark3Decay ? "remark3_decay" : "remark3_growth";
}

inline std::optional<Generator> parse_generator(const std::string& name) {
  if (name == "remark3_decay") return Generator::Remark3Decay;
  if (name == "remark3_growth") return Generator::Remark3Growth;
  return std::nullopt;
}

/**
 * Piecewise-constant switching signal over a finite catalog of graphs.
 *
 * Periodic schedules keep only one period and expand it on demand; generated
 * schedules compute each segment from its index. Switch times are prefix sums
 * of the dwells starting at t_0 = 0.
 */
class SwitchingSchedule {
 public:
  static SwitchingSchedule explicit_schedule(std::vector<MatrixWeightedGraph> graphs, std::vector<Segment> segments,
                                             double alpha) {
    SwitchingSchedule s;
    s.mode_ = ScheduleMode::Explicit;
    s.graphs_ = std::move(graphs);
    s.pattern_ = std::move(segments);
    s.repetitions_ = 1;
    s.alpha_ = alpha;
    s.init_prefix();
    return s;
  }

  static SwitchingSchedule periodic(std::vector<MatrixWeightedGraph> graphs, std::vector<Segment> pattern,
                                    int repetitions, double alpha) {
    if (repetitions < 1) throw Error(ErrorCode::InvalidArgument, "repetitions must be >= 1");
    SwitchingSchedule s;
    s.mode_ = ScheduleMode::Periodic;
    s.graphs_ = std::move(graphs);
    s.pattern_ = std::move(pattern);
    s.repetitions_ = repetitions;
    s.alpha_ = alpha;
    s.init_prefix();
    return s;
  }

  static SwitchingSchedule generated(MatrixWeightedGraph base, Generator gen, int intervals) {
    if (intervals < 1) throw Error(ErrorCode::InvalidArgument, "generated schedules need K >= 1");
    SwitchingSchedule s;
    s.mode_ = ScheduleMode::Generated;
    s.graphs_.push_back(std::move(base));
    s.generator_ = gen;
    s.intervals_ = intervals;
    s.alpha_ = 1.0;
    s.repetitions_ = 1;
    return s;
  }

  ScheduleMode mode() const { return mode_; }
  const std::vector<MatrixWeightedGraph>& graphs() const { return graphs_; }
  const std::vector<Segment>& pattern() const { return pattern_; }
  int repetitions() const { return repetitions_; }
  double alpha() const { return alpha_; }
  Generator generator() const { return generator_; }
  int intervals() const { return intervals_; }

  int n() const { return graphs_.empty() ? 0 : graphs_.front().n(); }
  int d() const { return graphs_.empty() ? 0 : graphs_.front().d(); }
  int order() const { return n() * d(); }

  int size() const {
    if (mode_ == ScheduleMode::Generated) return intervals_;
    return static_cast<int>(pattern_.size()) * repetitions_;
  }

  int period_length() const {
    return mode_ == ScheduleMode::Periodic ? static_cast<int>(pattern_.size()) : size();
  }

  Segment segment(int k) const {
    if (k < 0 || k >= size()) {
      throw Error(ErrorCode::IndexOutOfRange, "segment " + std::to_string(k) + " of " + std::to_string(size()));
    }
    if (mode_ == ScheduleMode::Generated) {
      const double idx = k + 1.0;
      return {0, 1.0, generator_ == Generator::Remark3Decay ? 1.0 / (idx * idx) : idx};
    }
    return pattern_[k % pattern_.size()];
  }

  /// t_k; switch_time(size()) is the end of the schedule.
  double switch_time(int k) const {
    if (k < 0 || k > size()) throw Error(ErrorCode::IndexOutOfRange, "switch time " + std::to_string(k));
    if (mode_ == ScheduleMode::Generated) return k;
    const int p = static_cast<int>(pattern_.size());
    if (p == 0) return 0.0;
    return (k / p) * prefix_.back() + prefix_[k % p];
  }

  double duration() const { return switch_time(size()); }

  friend bool operator==(const SwitchingSchedule& a, const SwitchingSchedule& b) {
    return a.mode_ == b.mode_ && a.graphs_ == b.graphs_ && a.pattern_ == b.pattern_ &&
           a.repetitions_ == b.repetitions_ && a.alpha_ == b.alpha_ && a.generator_ == b.generator_ &&
           a.intervals_ == b.intervals_;
  }

 private:
  void init_prefix() {
    prefix_.assign(pattern_.size() + 1, 0.0);
    for (std::size_t k = 0; k < pattern_.size(); ++k) prefix_[k + 1] = prefix_[k] + pattern_[k].dwell;
  }

  ScheduleMode mode_ = ScheduleMode::Explicit;
  std::vector<MatrixWeightedGraph> graphs_;
  std::vector<Segment> pattern_;
  std::vector<double> prefix_;
  int repetitions_ = 1;
  double alpha_ = 1.0;
  Generator generator_ = Generator::Remark3Decay;
  int intervals_ = 0;
};

struct ScheduleValidation {
  std::vector<ValidationIssue> issues;
  bool assumption1 = false;  // dwell >= alpha > 0
  bool assumption2 = false;  // finite catalog, every graph recurs within the horizon
  bool assumption3 = false;  // dwells from a finite set
  std::string assumption2_note;

  bool ok() const { return issues.empty(); }

  [[noreturn]] void raise() const {
    throw Error(issues.front().code, "schedule: " + issues.front().message);
  }
};

inline ScheduleValidation validate_schedule(const SwitchingSchedule& s, double eig_tol = kDefaultEigTol) {
  ScheduleValidation r;
  if (s.graphs().empty() || s.size() == 0) {
    r.issues.push_back({ErrorCode::EmptySchedule, -1, -1, "schedule has no graphs or no segments"});
    return r;
  }
  for (const auto& g : s.graphs()) {
    if (g.n() != s.n() || g.d() != s.d()) {
      r.issues.push_back({ErrorCode::DimensionMismatch, -1, -1,
                          "graph " + g.label() + " has (n,d) = (" + std::to_string(g.n()) + "," +
                              std::to_string(g.d()) + "), expected (" + std::to_string(s.n()) + "," +
                              std::to_string(s.d()) + ")"});
    }
    for (auto issue : validate_graph(g, eig_tol).issues) {
      issue.message = "graph " + g.label() + ": " + issue.message;
      r.issues.push_back(std::move(issue));
    }
  }
  if (!(s.alpha() > 0)) {
    r.issues.push_back({ErrorCode::DwellTooShort, -1, -1, "alpha must be positive"});
  }
  std::vector<bool> used(s.graphs().size(), false);
  std::vector<double> dwells;
  const int checked = s.mode() == ScheduleMode::Periodic ? s.period_length() : s.size();
  for (int k = 0; k < checked; ++k) {
    const Segment seg = s.segment(k);
    if (seg.graph < 0 || seg.graph >= static_cast<int>(s.graphs().size())) {
      r.issues.push_back({ErrorCode::UnknownGraph, -1, -1, "segment " + std::to_string(k) + " references graph " +
                                                                std::to_string(seg.graph)});
      continue;
    }
    used[seg.graph] = true;
    if (!(seg.dwell > 0) || seg.dwell < s.alpha()) {
      r.issues.push_back({ErrorCode::DwellTooShort, -1, -1,
                          "segment " + std::to_string(k) + " dwell " + std::to_string(seg.dwell) + " < alpha " +
                              std::to_string(s.alpha())});
    }
    if (std::find(dwells.begin(), dwells.end(), seg.dwell) == dwells.end()) dwells.push_back(seg.dwell);
  }
  r.assumption1 = std::none_of(r.issues.begin(), r.issues.end(),
                               [](const auto& i) { return i.code == ErrorCode::DwellTooShort; });
  if (s.mode() == ScheduleMode::Generated) {
    r.assumption2 = false;
    r.assumption2_note = "violated (infinite catalog: every interval uses a differently scaled graph)";
  } else {
    r.assumption2 = std::all_of(used.begin(), used.end(), [](bool u) { return u; });
    r.assumption2_note = r.assumption2 ? (s.mode() == ScheduleMode::Periodic
                                              ? "holds (finite catalog, every graph recurs each period)"
                                              : "holds within the horizon (finite catalog, every graph appears)")
                                       : "violated (some catalog graph never appears)";
  }
  r.assumption3 = r.assumption1 && !dwells.empty();
  return r;
}

/// Segment indices [start, end), end exclusive.
struct Window {
  int start = 0;
  int end = 0;

  friend bool operator==(const Window&, const Window&) = default;
};

inline void check_window(const SwitchingSchedule& s, const Window& w) {
  if (w.end <= w.start) {
    throw Error(ErrorCode::EmptyWindow, "window [" + std::to_string(w.start) + "," + std::to_string(w.end) + ")");
  }
  if (w.start < 0 || w.end > s.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "window [" + std::to_string(w.start) + "," + std::to_string(w.end) +
                                                ") outside schedule of " + std::to_string(s.size()) + " segments");
  }
}

/// One window per period (periodic) or a single window over everything.
inline std::vector<Window> period_windows(const SwitchingSchedule& s) {
  std::vector<Window> ws;
  const int p = s.period_length();
  for (int k = 0; k + p <= s.size(); k += p) ws.push_back({k, k + p});
  return ws;
}

/// Consecutive windows of `length` segments; a shorter tail is dropped.
inline std::vector<Window> uniform_windows(const SwitchingSchedule& s, int length) {
  if (length < 1) throw Error(ErrorCode::InvalidArgument, "window length must be >= 1");
  std::vector<Window> ws;
  for (int k = 0; k + length <= s.size(); k += length) ws.push_back({k, k + length});
  return ws;
}

/**
 * Validated edges, Laplacian and its eigendecomposition for every catalog
 * graph. Segment Laplacians are scale * L(graph), so one decomposition per
 * graph serves every dwell.
 */
class LaplacianCache {
 public:
  explicit LaplacianCache(const SwitchingSchedule& s, double eig_tol = kDefaultEigTol) : eig_tol_(eig_tol) {
    for (const auto& g : s.graphs()) {
      if (g.n() != s.n() || g.d() != s.d()) {
        throw Error(ErrorCode::DimensionMismatch, "graph " + g.label() + " does not match the schedule's (n,d)");
      }
      auto edges = checked_edges(g, eig_tol);
      BlockLaplacian l = laplacian_of(g.n(), g.d(), edges);
      eigen_.push_back(SymEigen::of(l.matrix));
      require_psd(eigen_.back(), eig_tol, "Laplacian");
      edges_.push_back(std::move(edges));
      laplacians_.push_back(std::move(l));
    }
  }

  double eig_tol() const { return eig_tol_; }
  const std::vector<EdgeWeight>& edges(int g) const { return edges_.at(g); }
  const BlockLaplacian& laplacian(int g) const { return laplacians_.at(g); }
  const SymEigen& eigen(int g) const { return eigen_.at(g); }
  const std::vector<BlockLaplacian>& laplacians() const { return laplacians_; }

 private:
  double eig_tol_;
  std::vector<std::vector<EdgeWeight>> edges_;
  std::vector<BlockLaplacian> laplacians_;
  std::vector<SymEigen> eigen_;
};

struct IntegralNetwork {
  Window window;
  MatrixWeightedGraph graph;
  BlockLaplacian laplacian;
};

/// Time-averaged network over the window: A~ = (1/T) sum_k scale_k A^k dt_k.
inline IntegralNetwork integral_network(const SwitchingSchedule& s, const LaplacianCache& cache, const Window& w) {
  check_window(s, w);
  struct Accum {
    Matrix sum;
    int sign = 0;
  };
  std::map<std::pair<int, int>, Accum> acc;
  const double span = s.switch_time(w.end) - s.switch_time(w.start);
  for (int k = w.start; k < w.end; ++k) {
    const Segment seg = s.segment(k);
    const double factor = seg.scale * seg.dwell / span;
    for (const auto& e : cache.edges(seg.graph)) {
      auto [it, fresh] = acc.try_emplace({e.i, e.j});
      Accum& a = it->second;
      if (fresh) a.sum = Matrix::Zero(s.d(), s.d());
      const int sign = e.sign();
      if (a.sign != 0 && a.sign != sign) {
        throw Error(ErrorCode::SignInconsistentEdge,
                    "edge " + edge_name(e.i, e.j) + " changes sign inside window [" + std::to_string(w.start) +
                        "," + std::to_string(w.end) + ")");
      }
      a.sign = sign;
      a.sum += factor * e.weight.matrix();
    }
  }
  MatrixWeightedGraph avg(s.n(), s.d(), "integral[" + std::to_string(w.start) + "," + std::to_string(w.end) + ")");
  std::vector<EdgeWeight> kept;
  for (auto& [key, a] : acc) {
    SymMatrix weight = SymMatrix::symmetrized(a.sum);
    const Definiteness cls = classify_definiteness(weight, cache.eig_tol());
    if (cls == Definiteness::Zero) continue;
    avg.add_edge(key.first, key.second, weight.matrix());
    kept.push_back({key.first, key.second, std::move(weight), cls});
  }
  BlockLaplacian l = laplacian_of(s.n(), s.d(), kept);
  return {w, std::move(avg), std::move(l)};
}

inline IntegralNetwork integral_network(const SwitchingSchedule& s, const Window& w,
                                        double eig_tol = kDefaultEigTol) {
  return integral_network(s, LaplacianCache(s, eig_tol), w);
}

struct StateTransition {
  Window window;
  Matrix matrix;
};

/// Phi(t_end, t_start) = e^{-L^{end-1} dt} ... e^{-L^{start} dt}.
inline StateTransition state_transition(const SwitchingSchedule& s, const LaplacianCache& cache, const Window& w) {
  check_window(s, w);
  Matrix phi = Matrix::Identity(s.order(), s.order());
  for (int k = w.start; k < w.end; ++k) {
    const Segment seg = s.segment(k);
    phi = matrix_exp_neg(cache.eigen(seg.graph), seg.scale * seg.dwell).matrix() * phi;
  }
  return {w, std::move(phi)};
}

inline StateTransition state_transition(const SwitchingSchedule& s, const Window& w,
                                        double eig_tol = kDefaultEigTol) {
  return state_transition(s, LaplacianCache(s, eig_tol), w);
}

/// One time-invariant bipartition that balances every graph of the catalog, if any.
inline std::optional<Bipartition> simultaneous_structural_balance(const std::vector<MatrixWeightedGraph>& catalog,
                                                                  double eig_tol = kDefaultEigTol) {
  if (catalog.empty()) return std::nullopt;
  const int n = catalog.front().n();
  std::map<std::pair<int, int>, int> signs;
  for (const auto& g : catalog) {
    if (g.n() != n || g.d() != catalog.front().d()) {
      throw Error(ErrorCode::DimensionMismatch, "catalog graphs must share (n,d)");
    }
    for (const auto& e : checked_edges(g, eig_tol)) {
      auto [it, fresh] = signs.try_emplace({e.i, e.j}, e.sign());
      if (!fresh && it->second != e.sign()) return std::nullopt;
    }
  }
  std::vector<SignedEdge> edges;
  for (const auto& [key, sign] : signs) edges.push_back({key.first, key.second, sign});
  return two_color_signed(n, edges);
}

}  // namespace mwc
