#pragma once

// Domain types for weighted l1 regularizers over the k-sparse model, and the
// descent-set membership predicates consumed by every other module.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "regcomply/errors.hpp"

namespace regcomply {

using Vector = std::vector<double>;

// Relative slack used by the membership predicates. Witnesses produced by the
// supremum evaluators sit exactly on the descent-set boundary, where the two
// sides of the inequality agree only up to rounding.
inline constexpr double kMembershipRelTol = 1e-12;

// Positive weights normalized so that the largest equals exactly 1.
class WeightVector {
 public:
  static WeightVector ones(std::size_t n) {
    if (n == 0) throw DomainError("weight vector must have at least one entry");
    return WeightVector(Vector(n, 1.0));
  }

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> values() const noexcept { return w_; }
  const Vector& vec() const noexcept { return w_; }

  bool is_uniform() const noexcept {
    return std::all_of(w_.begin(), w_.end(), [](double v) { return v == 1.0; });
  }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  explicit WeightVector(Vector w) : w_(std::move(w)) {}
  Vector w_;

  friend WeightVector normalize_weights(std::span<const double> raw);
};

// raw / max(raw). Rejects empty input and non-positive or non-finite entries.
inline WeightVector normalize_weights(std::span<const double> raw) {
  if (raw.empty()) throw DomainError("weight vector must have at least one entry");
  for (double v : raw) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw DomainError("weights must be finite and strictly positive");
  }
  const double top = *std::max_element(raw.begin(), raw.end());
  Vector w(raw.begin(), raw.end());
  for (double& v : w) v /= top;
  // x / x is exactly 1 in IEEE arithmetic, so the max entry is exactly 1.
  return WeightVector(std::move(w));
}

inline WeightVector normalize_weights(std::initializer_list<double> raw) {
  return normalize_weights(std::span<const double>(raw.begin(), raw.size()));
}

// Ambient dimension n and sparsity k. Theorems about the model need n >= 2k;
// smaller n is accepted but flagged.
class SparsityModel {
 public:
  SparsityModel(std::size_t n, std::size_t k) : n_(n), k_(k) {
    if (n < 1) throw DomainError("model dimension n must be >= 1");
    if (k < 1) throw DomainError("sparsity k must be >= 1");
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  bool below_dimension_condition() const noexcept { return n_ < 2 * k_; }

  friend bool operator==(const SparsityModel&, const SparsityModel&) = default;

 private:
  std::size_t n_;
  std::size_t k_;
};

// Support set with a sign per index; identifies a face of the weighted l1 ball.
class SignedSupport {
 public:
  struct Entry {
    std::size_t index;
    int sign;  // +1 or -1
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  SignedSupport() = default;
  explicit SignedSupport(std::vector<Entry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.index < b.index; });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i].sign != 1 && entries_[i].sign != -1)
        throw DomainError("support signs must be +1 or -1");
      if (i > 0 && entries_[i].index == entries_[i - 1].index)
        throw DomainError("support indices must be distinct");
    }
  }

  static SignedSupport single(std::size_t index, int sign) {
    return SignedSupport({{index, sign}});
  }

  std::span<const Entry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  bool contains(std::size_t i) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [i](const Entry& e) { return e.index == i; });
  }

  void validate_against(std::size_t n) const {
    for (const auto& e : entries_)
      if (e.index >= n) throw DomainError("support index out of range");
  }

  void validate_against(const SparsityModel& model) const {
    validate_against(model.n());
    if (entries_.size() > model.k()) throw DomainError("support larger than sparsity k");
  }

  friend bool operator==(const SignedSupport&, const SignedSupport&) = default;

 private:
  std::vector<Entry> entries_;
};

// Permutation sorting |z_i| in descending order, ties broken by lowest index.
class SortedMagnitudeView {
 public:
  explicit SortedMagnitudeView(std::span<const double> z) : z_(z), order_(z.size()) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(z_[a]) > std::abs(z_[b]);
    });
  }

  std::span<const std::size_t> order() const noexcept { return order_; }

  // Indices of the m largest magnitudes (the whole vector when m >= n).
  std::span<const std::size_t> top(std::size_t m) const noexcept {
    return std::span<const std::size_t>(order_).first(std::min(m, order_.size()));
  }
  std::span<const std::size_t> rest(std::size_t m) const noexcept {
    return std::span<const std::size_t>(order_).subspan(std::min(m, order_.size()));
  }

  // Squared l2 energy on the top-m block and on its complement.
  std::pair<double, double> split_energy(std::size_t m) const {
    double head = 0.0, tail = 0.0;
    for (std::size_t idx : top(m)) head += z_[idx] * z_[idx];
    for (std::size_t idx : rest(m)) tail += z_[idx] * z_[idx];
    return {head, tail};
  }

 private:
  std::span<const double> z_;
  std::vector<std::size_t> order_;
};

inline void check_dimension(std::size_t expected, std::size_t got) {
  if (expected != got) throw DimensionMismatch(expected, got);
}

// ||z||_w = sum_i w_i |z_i|
inline double weighted_l1(std::span<const double> z, const WeightVector& w) {
  check_dimension(w.size(), z.size());
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += w[i] * std::abs(z[i]);
  return s;
}

// Membership in the descent cone at any point with support/sign pattern s:
//   sum_{j not in S} w_j |z_j| <= - sum_{j in S} w_j sigma_j z_j.
inline bool signed_descent_cone_contains(const WeightVector& w, const SignedSupport& s,
                                         std::span<const double> z) {
  check_dimension(w.size(), z.size());
  s.validate_against(w.size());
  const double total = weighted_l1(z, w);
  double off = total;
  double on = 0.0;
  for (const auto& e : s.entries()) {
    off -= w[e.index] * std::abs(z[e.index]);
    on -= w[e.index] * e.sign * z[e.index];
  }
  return off <= on + kMembershipRelTol * total;
}

// Membership in the union of descent cones over all k-sparse points. The best
// support is the top-k of w_i |z_i|; it dominates every other choice because
// ||z||_w is fixed.
inline bool model_descent_set_contains(const WeightVector& w, const SparsityModel& model,
                                       std::span<const double> z) {
  check_dimension(w.size(), z.size());
  check_dimension(model.n(), z.size());
  Vector scaled(z.size());
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    scaled[i] = w[i] * std::abs(z[i]);
    total += scaled[i];
  }
  const SortedMagnitudeView view(scaled);
  double head = 0.0, tail = 0.0;
  for (std::size_t idx : view.top(model.k())) head += scaled[idx];
  for (std::size_t idx : view.rest(model.k())) tail += scaled[idx];
  return head >= tail - kMembershipRelTol * total;
}

// Indices of the k largest weights (ties: lowest index), followed by the
// remaining indices ordered by ascending weight (ties: lowest index).
struct WeightSplit {
  std::vector<std::size_t> top;       // H0, weights descending
  std::vector<std::size_t> rest_asc;  // complement, weights ascending
};

inline WeightSplit split_by_weight(const WeightVector& w, std::size_t k) {
  std::vector<std::size_t> idx(w.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
  const std::size_t kk = std::min(k, idx.size());
  WeightSplit out;
  out.top.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(kk));
  out.rest_asc.assign(idx.begin() + static_cast<std::ptrdiff_t>(kk), idx.end());
  std::stable_sort(out.rest_asc.begin(), out.rest_asc.end(),
                   [&](std::size_t a, std::size_t b) { return w[a] < w[b]; });
  return out;
}

}  // namespace regcomply
