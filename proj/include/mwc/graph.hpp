#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "mwc/error.hpp"
#include "mwc/matalg.hpp"

namespace mwc {

/// Raw edge as supplied by the user; nodes are 0-based and stored with i <= j.
struct Edge {
  int i = 0;
  int j = 0;
  Matrix weight;
};

/**
 * Undirected graph on n agents whose edge weights are d x d matrices.
 *
 * The graph stores edges as given. Nothing is rejected at insertion time except
 * out-of-range nodes and wrongly sized weights; everything else (self loops,
 * indefinite or asymmetric weights, duplicates) is reported by validate_graph().
 */
class MatrixWeightedGraph {
 public:
  MatrixWeightedGraph() = default;
  MatrixWeightedGraph(int n, int d, std::string label = {}) : n_(n), d_(d), label_(std::move(label)) {
    if (n < 1 || d < 1) throw Error(ErrorCode::InvalidArgument, "graph needs n >= 1 and d >= 1");
  }

  MatrixWeightedGraph& add_edge(int i, int j, Matrix weight) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_) {
      throw Error(ErrorCode::NodeOutOfRange,
                  "edge (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") with n = " +
                      std::to_string(n_));
    }
    if (weight.rows() != d_ || weight.cols() != d_) {
      throw Error(ErrorCode::DimensionMismatch, "edge weight must be " + std::to_string(d_) + "x" +
                                                     std::to_string(d_));
    }
    if (i > j) std::swap(i, j);
    edges_.push_back({i, j, std::move(weight)});
    return *this;
  }

  int n() const { return n_; }
  int d() const { return d_; }
  int order() const { return n_ * d_; }
  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }
  const std::vector<Edge>& edges() const { return edges_; }

  const Edge* find_edge(int i, int j) const {
    if (i > j) std::swap(i, j);
    for (const auto& e : edges_) {
      if (e.i == i && e.j == j) return &e;
    }
    return nullptr;
  }

  friend bool operator==(const MatrixWeightedGraph& a, const MatrixWeightedGraph& b) {
    if (a.n_ != b.n_ || a.d_ != b.d_ || a.label_ != b.label_ || a.edges_.size() != b.edges_.size()) {
      return false;
    }
    for (std::size_t k = 0; k < a.edges_.size(); ++k) {
      const auto& x = a.edges_[k];
      const auto& y = b.edges_[k];
      if (x.i != y.i || x.j != y.j || x.weight != y.weight) return false;
    }
    return true;
  }

 private:
  int n_ = 0;
  int d_ = 0;
  std::string label_;
  std::vector<Edge> edges_;
};

/// A validated edge: symmetric, sign-definite, nonzero.
struct EdgeWeight {
  int i = 0;
  int j = 0;
  SymMatrix weight;
  Definiteness cls = Definiteness::Zero;

  int sign() const { return sign_of(cls); }
  SymMatrix abs_weight() const { return static_cast<double>(sign()) * weight; }
};

struct ValidationIssue {
  ErrorCode code;
  int i = -1;
  int j = -1;
  std::string message;
};

struct GraphValidation {
  std::vector<ValidationIssue> issues;
  std::vector<EdgeWeight> edges;  // only the edges that passed

  bool ok() const { return issues.empty(); }

  [[noreturn]] void raise(const std::string& context) const {
    const auto& first = issues.front();
    throw Error(first.code, context + ": " + first.message);
  }
};

inline std::string edge_name(int i, int j) {
  return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

inline GraphValidation validate_graph(const MatrixWeightedGraph& g, double eig_tol = kDefaultEigTol,
                                      double sym_tol = kDefaultSymTol) {
  GraphValidation report;
  if (g.n() < 2) {
    report.issues.push_back({ErrorCode::InvalidArgument, -1, -1, "a network needs at least two agents"});
  }
  std::vector<std::pair<int, int>> seen;
  for (const auto& e : g.edges()) {
    const std::string name = edge_name(e.i, e.j);
    if (e.i == e.j) {
      report.issues.push_back({ErrorCode::SelfLoop, e.i, e.j, "self loop at node " + std::to_string(e.i + 1)});
      continue;
    }
    if (std::find(seen.begin(), seen.end(), std::pair{e.i, e.j}) != seen.end()) {
      report.issues.push_back({ErrorCode::DuplicateEdge, e.i, e.j, "edge " + name + " listed twice"});
      continue;
    }
    seen.emplace_back(e.i, e.j);
    const double asym = (e.weight - e.weight.transpose()).cwiseAbs().maxCoeff();
    if (asym > sym_tol) {
      report.issues.push_back({ErrorCode::NonSymmetric, e.i, e.j, "weight of edge " + name + " is not symmetric"});
      continue;
    }
    SymMatrix w(e.weight, sym_tol);
    const Definiteness cls = classify_definiteness(w, eig_tol);
    if (cls == Definiteness::Indefinite) {
      report.issues.push_back({ErrorCode::IndefiniteWeight, e.i, e.j, "weight of edge " + name + " is indefinite"});
      continue;
    }
    if (cls == Definiteness::Zero) {
      report.issues.push_back({ErrorCode::ZeroWeight, e.i, e.j, "weight of edge " + name + " is zero"});
      continue;
    }
    report.edges.push_back({e.i, e.j, std::move(w), cls});
  }
  return report;
}

inline std::vector<EdgeWeight> checked_edges(const MatrixWeightedGraph& g, double eig_tol = kDefaultEigTol) {
  auto report = validate_graph(g, eig_tol);
  if (!report.ok()) report.raise(g.label().empty() ? "graph" : "graph " + g.label());
  return std::move(report.edges);
}

struct BlockLaplacian {
  int n = 0;
  int d = 0;
  SymMatrix matrix;

  auto block(int i, int j) const { return matrix.matrix().block(i * d, j * d, d, d); }
};

/// L = D - A with D_i = sum_j |A_ij|.
inline BlockLaplacian laplacian_of(int n, int d, const std::vector<EdgeWeight>& edges) {
  Matrix l = Matrix::Zero(n * d, n * d);
  for (const auto& e : edges) {
    const Matrix abs_w = e.abs_weight().matrix();
    l.block(e.i * d, e.i * d, d, d) += abs_w;
    l.block(e.j * d, e.j * d, d, d) += abs_w;
    l.block(e.i * d, e.j * d, d, d) -= e.weight.matrix();
    l.block(e.j * d, e.i * d, d, d) -= e.weight.matrix();
  }
  return {n, d, SymMatrix(std::move(l))};
}

inline BlockLaplacian laplacian(const MatrixWeightedGraph& g, double eig_tol = kDefaultEigTol) {
  return laplacian_of(g.n(), g.d(), checked_edges(g, eig_tol));
}

inline double quadratic_form(const BlockLaplacian& l, const Vector& x) {
  if (x.size() != l.matrix.order()) {
    throw Error(ErrorCode::DimensionMismatch, "state has length " + std::to_string(x.size()) + ", expected " +
                                                   std::to_string(l.matrix.order()));
  }
  return x.dot(l.matrix.matrix() * x);
}

/// Union-find with path halving and union by size.
class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n), size_(n, 1), components_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    --components_;
    return true;
  }

  int components() const { return components_; }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
  int components_;
};

/// Reachability over the unweighted edge skeleton.
inline bool is_connected(const MatrixWeightedGraph& g) {
  const int n = g.n();
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : g.edges()) {
    if (e.i == e.j) continue;
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }
  std::vector<bool> seen(n, false);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  int reached = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == n;
}

struct SpanningTree {
  bool exists = false;
  std::vector<std::pair<int, int>> edges;  // 0-based witness, n - 1 entries when exists
};

/// Spanning tree using only positive or negative definite edges.
inline SpanningTree has_positive_negative_spanning_tree(const MatrixWeightedGraph& g,
                                                        double eig_tol = kDefaultEigTol) {
  SpanningTree tree;
  if (g.n() < 2) return tree;
  DisjointSets sets(g.n());
  for (const auto& e : checked_edges(g, eig_tol)) {
    if (is_definite(e.cls) && sets.unite(e.i, e.j)) tree.edges.emplace_back(e.i, e.j);
  }
  tree.exists = sets.components() == 1;
  if (!tree.exists) tree.edges.clear();
  return tree;
}

/// Node signs sigma_i in {+1, -1}; V1 holds the +1 nodes.
struct Bipartition {
  std::vector<int> sigma;

  int n() const { return static_cast<int>(sigma.size()); }

  std::vector<int> part(int s) const {
    std::vector<int> nodes;
    for (int i = 0; i < n(); ++i) {
      if (sigma[i] == s) nodes.push_back(i);
    }
    return nodes;
  }
  std::vector<int> v1() const { return part(1); }
  std::vector<int> v2() const { return part(-1); }

  /// C = blockdiag(sigma_i I_d), stored as its diagonal.
  Vector gauge_diagonal(int d) const {
    Vector c(n() * d);
    for (int i = 0; i < n(); ++i) c.segment(i * d, d).setConstant(sigma[i]);
    return c;
  }

  friend bool operator==(const Bipartition&, const Bipartition&) = default;
};

struct SignedEdge {
  int i = 0;
  int j = 0;
  int sign = 1;
};

/**
 * Two-colors nodes so that sigma_i sigma_j equals the sign of every edge.
 * Components are colored independently with their lowest node fixed at +1.
 * Returns nullopt when some cycle has negative sign product.
 */
inline std::optional<Bipartition> two_color_signed(int n, const std::vector<SignedEdge>& edges) {
  std::vector<std::vector<std::pair<int, int>>> adj(n);
  for (const auto& e : edges) {
    adj[e.i].emplace_back(e.j, e.sign);
    adj[e.j].emplace_back(e.i, e.sign);
  }
  Bipartition b{std::vector<int>(n, 0)};
  for (int root = 0; root < n; ++root) {
    if (b.sigma[root] != 0) continue;
    b.sigma[root] = 1;
    std::queue<int> frontier;
    frontier.push(root);
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      for (auto [v, s] : adj[u]) {
        const int want = b.sigma[u] * s;
        if (b.sigma[v] == 0) {
          b.sigma[v] = want;
          frontier.push(v);
        } else if (b.sigma[v] != want) {
          return std::nullopt;
        }
      }
    }
  }
  return b;
}

inline std::optional<Bipartition> structural_balance(const MatrixWeightedGraph& g,
                                                     double eig_tol = kDefaultEigTol) {
  std::vector<SignedEdge> signed_edges;
  for (const auto& e : checked_edges(g, eig_tol)) signed_edges.push_back({e.i, e.j, e.sign()});
  return two_color_signed(g.n(), signed_edges);
}

/// Replaces every weight A_ij by sigma_i sigma_j A_ij.
inline MatrixWeightedGraph gauge_transform(const MatrixWeightedGraph& g, const Bipartition& b) {
  if (b.n() != g.n()) {
    throw Error(ErrorCode::DimensionMismatch, "bipartition covers " + std::to_string(b.n()) + " nodes, graph has " +
                                                   std::to_string(g.n()));
  }
  MatrixWeightedGraph out(g.n(), g.d(), g.label());
  for (const auto& e : g.edges()) {
    out.add_edge(e.i, e.j, static_cast<double>(b.sigma[e.i] * b.sigma[e.j]) * e.weight);
  }
  return out;
}

}  // namespace mwc
