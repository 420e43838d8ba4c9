#pragma once

// The atomic norm generated by unit-norm k-sparse vectors (the k-support norm).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "regcomply/core.hpp"

namespace regcomply {

// Sorted closed form: with a = |z| sorted descending and
// 1-based a_(0) = +inf, pick r in {0..k-1} with
//   a_(k-r-1) > (1/(r+1)) sum_{i >= k-r} a_(i) >= a_(k-r),
// then ||z||^2 = sum_{i < k-r} a_(i)^2 + (sum_{i >= k-r} a_(i))^2 / (r+1).
// k > n is treated as k = n. Returns the squared norm, which is exact for
// flat vectors (L^2 / k).
inline double ksupport_norm_sq(std::span<const double> z, std::size_t k) {
  if (k < 1) throw DomainError("k-support norm needs k >= 1");
  const std::size_t n = z.size();
  if (n == 0) return 0.0;
  k = std::min(k, n);

  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = std::abs(z[i]);
  std::sort(a.begin(), a.end(), std::greater<>());
  if (a[0] == 0.0) return 0.0;

  // suffix[i] = sum_{j >= i} a[j] (0-based)
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + a[i];
  std::vector<double> prefix_sq(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix_sq[i + 1] = prefix_sq[i] + a[i] * a[i];

  const double tol = 1e-14 * suffix[0];
  auto value = [&](std::size_t r) {
    const std::size_t head = k - r - 1;  // number of coordinates kept as l2
    const double t = suffix[head];
    return prefix_sq[head] + t * t / static_cast<double>(r + 1);
  };

  double best_violation = std::numeric_limits<double>::infinity();
  std::size_t best_r = 0;
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t head = k - r - 1;
    const double avg = suffix[head] / static_cast<double>(r + 1);
    const double left = head == 0 ? std::numeric_limits<double>::infinity() : a[head - 1];
    const double right = a[head];
    if (left > avg - tol && avg >= right - tol) return value(r);
    const double violation = std::max(avg - left, right - avg);
    if (violation < best_violation) {
      best_violation = violation;
      best_r = r;
    }
  }
  // Unreachable in exact arithmetic; keep the least-violating split.
  return value(best_r);
}

inline double ksupport_norm(std::span<const double> z, std::size_t k) {
  return std::sqrt(ksupport_norm_sq(z, k));
}

// Independent evaluator of the same norm through the variational form
//   ||z||^2 = min { sum z_i^2 / theta_i : 0 < theta_i <= 1, sum theta_i <= k },
// whose minimizer is theta_i = min(1, t |z_i|) with t set by sum theta_i = k.
// t is found by bisection.
inline double ksupport_norm_oracle(std::span<const double> z, std::size_t k,
                                   double tolerance = 1e-13, int max_iter = 400) {
  if (k < 1) throw DomainError("k-support norm needs k >= 1");
  if (!(tolerance > 0.0)) throw DomainError("tolerance must be positive");
  std::vector<double> a;
  for (double v : z)
    if (v != 0.0) a.push_back(std::abs(v));
  if (a.empty()) return 0.0;
  if (a.size() <= k) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
  }
  const auto mass = [&](double t) {
    double s = 0.0;
    for (double v : a) s += std::min(1.0, t * v);
    return s;
  };
  const double kk = static_cast<double>(k);
  double lo = 0.0;
  double hi = 1.0 / *std::min_element(a.begin(), a.end());  // mass(hi) = |supp| > k
  int it = 0;
  const double rel = std::max(0.1 * tolerance, 4.0 * std::numeric_limits<double>::epsilon());
  for (; it < max_iter && hi - lo > rel * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) < kk ? lo : hi) = mid;
  }
  if (it == max_iter) throw NumericalError("k-support variational bisection did not converge");
  const double t = 0.5 * (lo + hi);
  double s = 0.0;
  for (double v : a) {
    const double theta = std::min(1.0, t * v);
    s += v * v / theta;
  }
  return std::sqrt(s);
}

}  // namespace regcomply
