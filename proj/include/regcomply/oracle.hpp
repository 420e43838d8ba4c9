#pragma once

// Brute-force evaluators used to arbitrate the closed forms and supremum
// evaluators at small sizes. None of them use the support or ordering
// reductions of rip.hpp: they search raw magnitude vectors and filter them
// with the descent-set membership predicate.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "regcomply/core.hpp"
#include "regcomply/geometry.hpp"
#include "regcomply/parallel.hpp"
#include "regcomply/random.hpp"
#include "regcomply/rip.hpp"
#include "regcomply/sampler.hpp"

namespace regcomply::oracle {

struct AreaEstimate {
  double area = 0.0;       // steradians
  double std_error = 0.0;  // steradians, 1 sigma
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

// Sphere sampling of T(sign * e_axis) for a weight vector in R^3.
inline AreaEstimate brute_cone_area_3d(const WeightVector& w, std::size_t axis, int sign,
                                       std::uint64_t samples, std::uint64_t seed,
                                       std::size_t workers = 0) {
  check_dimension(3, w.size());
  const SignedSupport s = SignedSupport::single(axis, sign);
  s.validate_against(3);
  const auto est = sampler::estimate_cone_fraction(
      [&](std::span<const double> z) { return signed_descent_cone_contains(w, s, z); }, 3,
      samples, seed, workers);
  return {est.estimate * geometry::kFullSphere, est.std_error * geometry::kFullSphere,
          est.samples, est.seed};
}

// Geometric magnitude grid {0} u {min_ratio^(j/(points-1))}, one coordinate
// pinned to 1, followed by an optional (1+1)-evolution-strategy polish of the
// best grid points. Doubling `points - 1` nests the previous grid.
struct GridSpec {
  std::size_t points = 8;
  double min_ratio = 1e-2;
  std::size_t polish_starts = 16;
  std::size_t polish_iters = 2000;
  std::size_t boundary_steps = 24;  // bisection steps pushing each grid point to the boundary
  std::uint64_t seed = 0;
  std::uint64_t max_points = 100'000'000;
  std::size_t workers = 0;

  Vector values() const {
    Vector v{0.0};
    for (std::size_t j = 0; j < points; ++j) {
      const double e = points == 1 ? 0.0 : double(points - 1 - j) / double(points - 1);
      v.push_back(std::pow(min_ratio, e));
    }
    return v;
  }
};

struct BruteResult {
  double value = 0.0;  // max of grid and polish
  Vector witness;
  double grid_value = 0.0;
  std::uint64_t points_evaluated = 0;
};

namespace detail {

// (value desc, witness lexicographic asc)
inline bool better(double v, const Vector& z, double bv, const Vector& bz) {
  if (v != bv) return v > bv;
  return std::lexicographical_compare(z.begin(), z.end(), bz.begin(), bz.end());
}

template <typename Functional>
BruteResult brute_supremum(const WeightVector& w, const SparsityModel& model, const GridSpec& grid,
                           Functional&& functional) {
  check_dimension(model.n(), w.size());
  const std::size_t n = model.n();
  if (n > 6 || model.k() > 2) throw DomainError("brute-force oracle limited to n <= 6, k <= 2");
  if (grid.points < 2 || !(grid.min_ratio > 0.0 && grid.min_ratio < 1.0))
    throw DomainError("grid needs >= 2 points and min_ratio in (0, 1)");

  const Vector vals = grid.values();
  const std::size_t g = vals.size();
  double total = double(n);
  for (std::size_t i = 1; i < n; ++i) total *= double(g);
  if (total > double(grid.max_points))
    throw CapacityError("brute-force grid of " + std::to_string(std::uint64_t(total)) +
                        " points exceeds budget " + std::to_string(grid.max_points));

  auto score = [&](std::span<const double> z) -> double {
    if (!model_descent_set_contains(w, model, z)) return -1.0;
    return functional(z);
  };

  // Task = (pinned coordinate, value of the first free coordinate).
  const std::size_t tasks = n == 1 ? 1 : n * g;
  struct Best {
    double value = -1.0;
    Vector z;
    std::uint64_t evaluated = 0;
  };
  std::vector<Best> best(tasks);
  parallel_for(tasks, grid.workers, [&](std::size_t t) {
    const std::size_t pin = n == 1 ? 0 : t / g;
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < n; ++i)
      if (i != pin) free.push_back(i);
    Vector z(n, 0.0);
    z[pin] = 1.0;
    std::vector<std::size_t> digit(free.size(), 0);
    if (!free.empty()) digit[0] = t % g;
    Best& b = best[t];
    Vector shape(n), ray(n);
    std::vector<std::size_t> rank(n);
    auto offer = [&](const Vector& p) {
      const double v = score(p);
      ++b.evaluated;
      if (v >= 0.0 && (b.z.empty() || better(v, p, b.value, b.z))) {
        b.value = v;
        b.z = p;
      }
      return v >= 0.0;
    };
    while (true) {
      for (std::size_t d = 0; d < free.size(); ++d) z[free[d]] = vals[digit[d]];
      const bool feasible = offer(z);
      if (grid.boundary_steps > 0 && !free.empty()) {
        // Push to the descent-set boundary along the rays that scale the m
        // smallest coordinates, m = 1..n-1 (the pinned coordinate is a max).
        rank.resize(n);
        for (std::size_t d = 0; d < n; ++d) rank[d] = d;
        std::stable_sort(rank.begin(), rank.end(),
                         [&](std::size_t a, std::size_t c) { return z[a] < z[c]; });
        std::erase(rank, pin);
        for (std::size_t m = 1; m <= rank.size(); ++m) {
          if (z[rank[m - 1]] == 0.0) continue;
          auto at = [&](double t) {
            ray = z;
            for (std::size_t r = 0; r < m; ++r) ray[rank[r]] = t * z[rank[r]];
            return model_descent_set_contains(w, model, ray);
          };
          double lo = 0.0, hi = 1.0;
          if (feasible) {
            lo = 1.0;
            hi = 2.0;
            int grow = 0;
            while (at(hi) && ++grow < 30) {
              lo = hi;
              hi *= 2.0;
            }
            if (grow == 30) continue;  // unbounded ray, nothing to push
          } else if (!at(0.0)) {
            continue;
          }
          for (std::size_t it = 0; it < grid.boundary_steps; ++it) {
            const double mid = 0.5 * (lo + hi);
            (at(mid) ? lo : hi) = mid;
          }
          at(lo);
          const double top = *std::max_element(ray.begin(), ray.end());
          if (top <= 0.0) continue;
          for (std::size_t d = 0; d < n; ++d) shape[d] = ray[d] / top;
          offer(shape);
        }
      }
      // odometer over digits 1..end
      std::size_t d = 1;
      while (d < digit.size() && ++digit[d] == g) digit[d++] = 0;
      if (d >= digit.size()) break;
    }
  });

  BruteResult out;
  out.value = -1.0;
  std::vector<std::size_t> order(tasks);
  for (std::size_t t = 0; t < tasks; ++t) {
    order[t] = t;
    out.points_evaluated += best[t].evaluated;
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (best[a].z.empty() || best[b].z.empty()) return !best[a].z.empty() && best[b].z.empty();
    return better(best[a].value, best[a].z, best[b].value, best[b].z);
  });
  if (best[order[0]].z.empty()) throw NumericalError("no feasible grid point");
  out.value = out.grid_value = best[order[0]].value;
  out.witness = best[order[0]].z;

  // Polish the leading distinct grid optima.
  const std::size_t starts = std::min(grid.polish_starts, tasks);
  std::vector<Best> polished(starts);
  parallel_for(starts, grid.workers, [&](std::size_t s) {
    const Best& seed_pt = best[order[s]];
    if (seed_pt.z.empty() || grid.polish_iters == 0) return;
    const CounterRng rng(mix_seed(grid.seed, s));
    Vector x = seed_pt.z, y(n), step(n), seg(n);
    double fx = seed_pt.value, sigma = 0.05;
    for (std::size_t it = 0; it < grid.polish_iters; ++it) {
      if (it % 500 == 0) sigma = 0.05;  // restart the step size
      // Move mix: full Gaussian step, single-coordinate step, zero one
      // coordinate, or copy one coordinate onto another. The last two reach
      // the sparse and tied points where boundary optima tend to sit.
      const auto u = rng.uniform_pair(it, 16);
      const auto pick = rng.uniform_pair(it, 17);
      const std::size_t i = std::min(n - 1, std::size_t(pick[0] * double(n)));
      const std::size_t j = std::min(n - 1, std::size_t(pick[1] * double(n)));
      const int move = std::min(5, int(u[0] * 6.0));
      rng.normals(it, step);
      y = x;
      const double factor = std::exp(sigma * step[0]);
      switch (move) {
        case 0:
          for (std::size_t d = 0; d < n; ++d) y[d] = std::abs(x[d] + sigma * step[d]);
          break;
        case 1: y[i] = std::abs(x[i] + sigma * step[i]); break;
        case 2: y[i] = 0.0; break;
        case 3: y[i] = x[j]; break;
        case 4: {
          // scale a random subset jointly
          const auto mask = std::uint32_t(u[1] * double(1u << n));
          for (std::size_t d = 0; d < n; ++d)
            if (mask >> d & 1u) y[d] = x[d] * factor;
          break;
        }
        default:
          // scale the tie group of coordinate i jointly
          for (std::size_t d = 0; d < n; ++d)
            if (std::abs(x[d] - x[i]) <= 1e-12 * std::max(1.0, x[i])) y[d] = x[d] * factor;
          break;
      }
      const double top = *std::max_element(y.begin(), y.end());
      bool improved = false;
      if (top > 0.0 && y != x) {
        for (double& v : y) v /= top;
        double fy = score(y);
        if (fy < 0.0) {
          // Infeasible: walk back along the segment to the furthest feasible
          // point, where descent-set suprema are attained.
          double lo = 0.0, hi = 1.0;
          for (int b = 0; b < 40; ++b) {
            const double mid = 0.5 * (lo + hi);
            for (std::size_t d = 0; d < n; ++d) seg[d] = x[d] + mid * (y[d] - x[d]);
            (score(seg) >= 0.0 ? lo : hi) = mid;
          }
          for (std::size_t d = 0; d < n; ++d) y[d] = x[d] + lo * (y[d] - x[d]);
          const double top2 = *std::max_element(y.begin(), y.end());
          for (double& v : y) v /= top2;
          fy = score(y);
        }
        if (fy > fx) {
          x = y;
          fx = fy;
          improved = true;
        }
      }
      if (move <= 1 || move >= 4) sigma = improved ? sigma * 1.5 : std::max(sigma * 0.9036, 1e-13);  // 1.5^(-1/4): one-fifth success rule
    }
    polished[s] = {fx, x, 0};
  });
  for (const auto& p : polished)
    if (!p.z.empty() && better(p.value, p.z, out.value, out.witness)) {
      out.value = p.value;
      out.witness = p.z;
    }
  return out;
}

}  // namespace detail

inline BruteResult brute_B_sigma(const WeightVector& w, const SparsityModel& model,
                                 const GridSpec& grid = {}) {
  const std::size_t k = model.k();
  return detail::brute_supremum(w, model, grid,
                                [k](std::span<const double> z) { return rip::B_value(z, k); });
}

inline BruteResult brute_D_sigma(const WeightVector& w, const SparsityModel& model,
                                 const GridSpec& grid = {}) {
  const std::size_t k = model.k();
  return detail::brute_supremum(w, model, grid,
                                [k](std::span<const double> z) { return rip::D_value(z, k); });
}

// Restricted conditioning of M = I - z z^T / ||z||^2 over unit 2k-sparse x,
// from the eigenvalues of the principal submatrices M_SS for every support S.
inline double brute_gamma_projector(std::span<const double> z, const SparsityModel& model) {
  check_dimension(model.n(), z.size());
  const std::size_t n = model.n();
  if (n > 10) throw DomainError("explicit projector oracle limited to n <= 10");
  rip::require_nonzero(z);
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(z.data(), Eigen::Index(n));
  const Eigen::MatrixXd M =
      Eigen::MatrixXd::Identity(Eigen::Index(n), Eigen::Index(n)) - v * v.transpose() / v.squaredNorm();

  const std::size_t s = std::min(2 * model.k(), n);
  double sup = 0.0, inf = std::numeric_limits<double>::infinity();
  for (const auto& support : sampler::detail::combinations(n, s)) {
    Eigen::MatrixXd sub = Eigen::MatrixXd::Zero(Eigen::Index(s), Eigen::Index(s));
    for (std::size_t a = 0; a < s; ++a)
      for (std::size_t b = 0; b < s; ++b)
        sub(Eigen::Index(a), Eigen::Index(b)) = M(Eigen::Index(support[a]), Eigen::Index(support[b]));
    // M is an orthogonal projector, so ||M x||^2 = x^T M x.
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sub, Eigen::EigenvaluesOnly);
    sup = std::max(sup, eig.eigenvalues().maxCoeff());
    inf = std::min(inf, eig.eigenvalues().minCoeff());
  }
  if (inf <= 1e-12 * sup) return rip::kInf;
  return sup / inf;
}

// Standard agreement battery: twelve weight vectors with n <= 6, k <= 2.
struct BatteryCase {
  std::size_t n;
  std::size_t k;
  Vector w;
};

inline std::vector<BatteryCase> standard_battery() {
  return {{3, 1, {1, 1, 1}},
          {3, 1, {1, 1, 0.6}},
          {3, 1, {1, 0.5, 0.5}},
          {4, 1, {1, 1, 1, 1}},
          {4, 1, {1, 0.8, 0.6, 0.4}},
          {4, 2, {1, 0.8, 0.6, 0.4}},
          {5, 2, {1, 0.9, 0.7, 0.5, 0.3}},
          {5, 2, {1, 1, 1, 0.5, 0.5}},
          {6, 1, {1, 0.6, 0.9, 0.55, 0.8, 0.7}},
          {6, 2, {1, 1, 1, 1, 1, 1}},
          {6, 2, {1, 0.9, 0.8, 0.7, 0.6, 0.5}},
          {6, 2, {0.3, 1, 0.7, 0.9, 0.5, 0.8}}};
}

// Relative gap used by the agreement contract; absolute when the oracle is 0.
inline double relative_gap(double evaluator, double oracle_value) {
  if (oracle_value == 0.0) return std::abs(evaluator);
  return std::abs(evaluator - oracle_value) / std::abs(oracle_value);
}


// Cross-checks a B or D report against the brute-force oracle and marks it
// certified when the relative gap is within `tolerance`. Reports whose
// supremum is trivially 0 or closed-form stay certified without a run.
inline void certify_report(rip::ComplianceReport& rep, const WeightVector& w,
                           const SparsityModel& model, const GridSpec& grid = {},
                           double tolerance = 0.02) {
  if (rep.witness.empty()) {
    rep.certified = true;
    return;
  }
  const bool is_b = rep.measure.starts_with("rip-nec");
  const BruteResult r = is_b ? brute_B_sigma(w, model, grid) : brute_D_sigma(w, model, grid);
  rep.oracle_value = r.value;
  rep.certified = relative_gap(rep.supremum, r.value) <= tolerance;
}

}  // namespace regcomply::oracle
