#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "mwc/error.hpp"
#include "mwc/matalg.hpp"
#include "mwc/switching.hpp"

namespace mwc {

inline constexpr double kDefaultConvTol = 1e-6;

struct Trajectory {
  int n = 0;
  int d = 0;
  std::vector<double> times;
  std::vector<Vector> states;

  const Vector& final_state() const { return states.back(); }
  std::size_t size() const { return times.size(); }
};

namespace detail {

inline void check_run(const SwitchingSchedule& s, const Vector& x0, double horizon, double sample_dt) {
  if (x0.size() != s.order()) {
    throw Error(ErrorCode::DimensionMismatch, "x0 has length " + std::to_string(x0.size()) + ", expected " +
                                                   std::to_string(s.order()));
  }
  if (!(horizon > 0)) throw Error(ErrorCode::HorizonNonPositive, "horizon = " + std::to_string(horizon));
  if (!(sample_dt > 0)) throw Error(ErrorCode::InvalidArgument, "sample_dt must be positive");
  const double end = s.duration();
  if (horizon > end + 1e-9 * std::max(1.0, end)) {
    throw Error(ErrorCode::HorizonBeyondSchedule,
                "horizon " + std::to_string(horizon) + " exceeds schedule duration " + std::to_string(end));
  }
}

/**
 * Walks the sample grid {j * sample_dt} merged with every switch instant up to
 * the horizon. For each segment calls begin(k, t_k) once, then stop(t) for
 * each sample time inside (t_k, min(t_{k+1}, horizon)].
 */
template <typename Begin, typename Stop>
void walk_samples(const SwitchingSchedule& s, double horizon, double sample_dt, Begin&& begin, Stop&& stop) {
  const double eps = 1e-9 * std::max(1.0, horizon);
  for (int k = 0; k < s.size(); ++k) {
    const double t0 = s.switch_time(k);
    if (t0 >= horizon - eps) break;
    const double t1 = std::min(s.switch_time(k + 1), horizon);
    begin(k, t0);
    auto j = static_cast<long long>(std::floor(t0 / sample_dt)) + 1;
    for (double g = j * sample_dt; g < t1 - eps; g = (++j) * sample_dt) {
      if (g > t0 + eps) stop(g);
    }
    stop(t1);
  }
}

}  // namespace detail

/**
 * Exact propagation of x' = -L(t) x: inside dwell k the state is
 * e^{-L^k (t - t_k)} x(t_k). One eigendecomposition per catalog graph is
 * reused for every dwell on that graph.
 */
inline Trajectory simulate_exact(const SwitchingSchedule& s, const Vector& x0, double horizon, double sample_dt,
                                 double eig_tol = kDefaultEigTol) {
  detail::check_run(s, x0, horizon, sample_dt);
  const LaplacianCache cache(s, eig_tol);
  Trajectory traj{s.n(), s.d(), {0.0}, {x0}};
  Vector x = x0;
  Vector modal;
  const SymEigen* eig = nullptr;
  double scale = 1.0;
  double seg_start = 0.0;
  detail::walk_samples(
      s, horizon, sample_dt,
      [&](int k, double t0) {
        const Segment seg = s.segment(k);
        eig = &cache.eigen(seg.graph);
        scale = seg.scale;
        seg_start = t0;
        x = traj.states.back();
        modal = eig->vectors.transpose() * x;
      },
      [&](double t) {
        const Vector beta = (-(eig->values.cwiseMax(0.0)) * (scale * (t - seg_start))).array().exp().matrix();
        traj.times.push_back(t);
        traj.states.push_back(eig->vectors * beta.cwiseProduct(modal));
      });
  return traj;
}

/**
 * Classical fixed-step RK4 on the same sample grid as simulate_exact. Steps
 * never straddle a sample time or switch instant: each gap is split into
 * ceil(gap / step_h) equal steps, so the effective step never exceeds step_h.
 */
inline Trajectory simulate_rk4(const SwitchingSchedule& s, const Vector& x0, double horizon, double step_h,
                               double sample_dt, double eig_tol = kDefaultEigTol) {
  detail::check_run(s, x0, horizon, sample_dt);
  if (!(step_h > 0)) throw Error(ErrorCode::InvalidArgument, "step_h must be positive");
  const LaplacianCache cache(s, eig_tol);
  Trajectory traj{s.n(), s.d(), {0.0}, {x0}};
  Matrix gen;
  double now = 0.0;
  detail::walk_samples(
      s, horizon, sample_dt,
      [&](int k, double t0) {
        const Segment seg = s.segment(k);
        gen = -seg.scale * cache.laplacian(seg.graph).matrix.matrix();
        now = t0;
      },
      [&](double t) {
        Vector x = traj.states.back();
        const double gap = t - now;
        const auto steps = std::max<long long>(1, static_cast<long long>(std::ceil(gap / step_h - 1e-9)));
        const double h = gap / static_cast<double>(steps);
        for (long long i = 0; i < steps; ++i) {
          const Vector k1 = gen * x;
          const Vector k2 = gen * (x + 0.5 * h * k1);
          const Vector k3 = gen * (x + 0.5 * h * k2);
          const Vector k4 = gen * (x + h * k3);
          x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        now = t;
        traj.times.push_back(t);
        traj.states.push_back(std::move(x));
      });
  return traj;
}

struct Remark3Result {
  SwitchingSchedule schedule;
  Trajectory trajectory;
  Vector predicted_limit;
};

/**
 * Runs x' = -c(t) L x with c = 1/floor(t+1)^2 (decay) or floor(t+1) (growth)
 * for K unit intervals. The decay limit keeps a trace of every nonzero mode,
 * e^{-(sum_{k<=K} 1/k^2) L} x0, whereas growth collapses onto null(L).
 */
inline Remark3Result run_remark3_scenario(Generator which, const MatrixWeightedGraph& base, int intervals,
                                          const Vector& x0, double sample_dt = 1.0, double eig_tol = kDefaultEigTol) {
  SwitchingSchedule s = SwitchingSchedule::generated(base, which, intervals);
  Trajectory traj = simulate_exact(s, x0, s.duration(), sample_dt, eig_tol);
  const BlockLaplacian l = laplacian(base, eig_tol);
  Vector limit;
  if (which == Generator::Remark3Decay) {
    double total = 0.0;
    for (int k = intervals; k >= 1; --k) total += 1.0 / (static_cast<double>(k) * k);
    limit = matrix_exp_neg(l.matrix, total, eig_tol).matrix() * x0;
  } else {
    limit = projector(null_space(l.matrix, eig_tol)).matrix() * x0;
  }
  return {std::move(s), std::move(traj), std::move(limit)};
}

struct ConvergenceMonitor {
  Vector reference;
  std::vector<double> times;
  std::vector<double> deviations;  // V(t) = ||x(t) - reference||^2
  double threshold = 0.0;          // V is converged once <= threshold
  std::optional<double> converged_at;
  bool non_increasing = true;
  double decay_rate = 0.0;  // estimated ||omega|| contraction per unit time

  double rate_per_window(double window_length) const { return std::pow(decay_rate, window_length); }
};

/// conv_tol is scaled by ||x(0)|| (used as is when x(0) = 0).
inline ConvergenceMonitor monitor_convergence(const Trajectory& traj, const Vector& reference,
                                              double conv_tol = kDefaultConvTol) {
  if (traj.states.empty() || reference.size() != traj.states.front().size()) {
    throw Error(ErrorCode::DimensionMismatch, "reference does not match trajectory state size");
  }
  ConvergenceMonitor mon;
  mon.reference = reference;
  mon.times = traj.times;
  const double x0_norm = traj.states.front().norm();
  const double tol = conv_tol * (x0_norm > 0 ? x0_norm : 1.0);
  mon.threshold = tol * tol;
  for (const auto& x : traj.states) mon.deviations.push_back((x - reference).squaredNorm());
  for (std::size_t k = 0; k < mon.deviations.size(); ++k) {
    if (!mon.converged_at && mon.deviations[k] <= mon.threshold) mon.converged_at = mon.times[k];
    if (k > 0 && mon.deviations[k] > mon.deviations[k - 1] + 1e-10) mon.non_increasing = false;
  }
  // Fit over the stretch where V is still above round-off.
  constexpr double kFloor = 1e-28;
  std::size_t last = 0;
  while (last + 1 < mon.deviations.size() && mon.deviations[last + 1] > kFloor) ++last;
  if (last > 0 && mon.deviations.front() > kFloor && mon.times[last] > 0) {
    mon.decay_rate = std::pow(mon.deviations[last] / mon.deviations.front(), 0.5 / mon.times[last]);
  }
  return mon;
}

}  // namespace mwc
