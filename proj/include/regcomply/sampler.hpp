#pragma once

// Monte Carlo estimation of cone fractions of the unit sphere in R^n.
//
// Sample i is a normalized standard Gaussian vector drawn from the counter
// stream (seed, i), so every estimate is a deterministic function of
// (seed, count) and does not depend on the number of workers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "regcomply/core.hpp"
#include "regcomply/parallel.hpp"
#include "regcomply/random.hpp"

namespace regcomply::sampler {

struct EstimateWithError {
  double estimate = 0.0;   // in [0, 1]
  double std_error = 0.0;  // sqrt(p (1 - p) / samples)
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;

  static EstimateWithError from_counts(std::uint64_t hits, std::uint64_t samples,
                                       std::uint64_t seed) {
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples)), samples, seed};
  }

  // 1 - p with the same standard error.
  EstimateWithError complement() const { return {1.0 - estimate, std_error, samples, seed}; }
};

// Uniform points on the unit sphere of R^n, addressed by index.
class SphereSampler {
 public:
  SphereSampler(std::size_t n, std::uint64_t seed) : n_(n), rng_(seed) {
    if (n < 1) throw DomainError("sphere dimension must be >= 1");
  }

  std::size_t dimension() const noexcept { return n_; }

  // Writes sample `index` into out (size n).
  void sample(std::uint64_t index, std::span<double> out) const {
    check_dimension(n_, out.size());
    const std::uint32_t blocks = static_cast<std::uint32_t>((n_ + 1) / 2);
    // A zero Gaussian vector has probability zero; redraw from fresh blocks.
    for (std::uint32_t attempt = 0;; ++attempt) {
      rng_.normals(index, out, attempt * blocks);
      double norm2 = 0.0;
      for (double v : out) norm2 += v * v;
      if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& v : out) v *= inv;
        return;
      }
    }
  }

  Vector operator()(std::uint64_t index) const {
    Vector out(n_);
    sample(index, out);
    return out;
  }

 private:
  std::size_t n_;
  CounterRng rng_;
};

// Materializes samples [0, count) of the stream.
inline std::vector<Vector> sample_sphere(std::size_t n, std::uint64_t count, std::uint64_t seed) {
  if (count < 1) throw DomainError("sample count must be >= 1");
  const SphereSampler s(n, seed);
  std::vector<Vector> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(s(i));
  return out;
}

inline constexpr std::uint64_t kChunk = 8192;

// Hit counts per predicate over samples [0, count). `classify` receives a
// sample and a span of counters to increment. Chunks are fixed-size and summed
// in integer arithmetic, so the totals are exact regardless of workers.
template <typename Classify>
std::vector<std::uint64_t> count_hits(std::size_t n, std::uint64_t count, std::uint64_t seed,
                                      std::size_t slots, Classify&& classify,
                                      std::size_t workers = 0) {
  const SphereSampler s(n, seed);
  const std::uint64_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<std::vector<std::uint64_t>> per_chunk(chunks, std::vector<std::uint64_t>(slots, 0));
  parallel_for(static_cast<std::size_t>(chunks), workers, [&](std::size_t c) {
    Vector z(n);
    auto& counters = per_chunk[c];
    const std::uint64_t lo = c * kChunk, hi = std::min<std::uint64_t>(count, lo + kChunk);
    for (std::uint64_t i = lo; i < hi; ++i) {
      s.sample(i, z);
      classify(std::span<const double>(z), std::span<std::uint64_t>(counters));
    }
  });
  std::vector<std::uint64_t> total(slots, 0);
  for (const auto& v : per_chunk)
    for (std::size_t j = 0; j < slots; ++j) total[j] += v[j];
  return total;
}

using Predicate = std::function<bool(std::span<const double>)>;

// Fraction of the sphere where `predicate` holds, with binomial standard error.
inline EstimateWithError estimate_cone_fraction(const Predicate& predicate, std::size_t n,
                                                std::uint64_t count, std::uint64_t seed,
                                                std::size_t workers = 0) {
  if (count < 1) throw DomainError("sample count must be >= 1");
  const auto hits = count_hits(
      n, count, seed, 1,
      [&](std::span<const double> z, std::span<std::uint64_t> c) {
        if (predicate(z)) ++c[0];
      },
      workers);
  return EstimateWithError::from_counts(hits[0], count, seed);
}

enum class Mode { Uniform, NonUniform };

struct McOptions {
  std::uint64_t count = 1'000'000;
  std::uint64_t seed = 0;
  // Enumerate all signed k-supports while C(n,k) * 2^k stays within this cap.
  std::uint64_t support_cap = 1u << 14;
  // Above the cap, evaluate the top-weight support plus this many random
  // supports instead of failing.
  bool allow_support_sampling = true;
  std::size_t sampled_supports = 64;
  std::size_t workers = 0;
};

struct McResult {
  EstimateWithError compliance;  // 1 - cone fraction
  // NonUniform: the signed support attaining the largest cone.
  std::optional<SignedSupport> worst_support;
  std::size_t supports_evaluated = 0;
  bool supports_enumerated = true;
};

namespace detail {

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > (1ull << 52)) return r;  // large enough to exceed any cap
  }
  return r;
}

inline std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur(k);
  for (std::size_t i = 0; i < k; ++i) cur[i] = i;
  if (k > n) return out;
  while (true) {
    out.push_back(cur);
    std::size_t i = k;
    while (i > 0 && cur[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

}  // namespace detail

// Monte Carlo compliance of ||.||_w for the k-sparse model.
//   Uniform:     1 - P(z in T(Sigma_k))
//   NonUniform:  1 - max over signed k-supports of P(z in T(x_S,sigma))
inline McResult mc_compliance(const WeightVector& w, const SparsityModel& model, Mode mode,
                              const McOptions& opt) {
  check_dimension(model.n(), w.size());
  if (opt.count < 1) throw DomainError("sample count must be >= 1");
  const std::size_t n = model.n();
  const std::size_t k = std::min(model.k(), n);

  if (mode == Mode::Uniform) {
    auto est = estimate_cone_fraction(
        [&](std::span<const double> z) { return model_descent_set_contains(w, model, z); }, n,
        opt.count, opt.seed, opt.workers);
    return {est.complement(), std::nullopt, 0, true};
  }

  // Candidate supports. The largest cone sits on the k largest weights, so that
  // support always comes first.
  const WeightSplit split = split_by_weight(w, k);
  std::vector<std::size_t> top_support = split.top;
  std::sort(top_support.begin(), top_support.end());

  std::vector<std::vector<std::size_t>> supports;
  bool enumerated = true;
  const std::uint64_t n_signed = detail::binomial(n, k) << k;
  if (n_signed <= opt.support_cap) {
    supports = detail::combinations(n, k);
    auto it = std::find(supports.begin(), supports.end(), top_support);
    std::rotate(supports.begin(), it, it + 1);
  } else {
    if (!opt.allow_support_sampling)
      throw CapacityError("signed support enumeration exceeds cap (" +
                          std::to_string(n_signed) + " > " + std::to_string(opt.support_cap) +
                          ") and sampling is disabled");
    enumerated = false;
    supports.push_back(top_support);
    const CounterRng rng(mix_seed(opt.seed, 0x5u));
    for (std::size_t s = 0; s < opt.sampled_supports; ++s) {
      // Partial Fisher-Yates on [0, n).
      std::vector<std::size_t> perm(n);
      for (std::size_t i = 0; i < n; ++i) perm[i] = i;
      for (std::size_t i = 0; i < k; ++i) {
        const double u = rng.uniform(s, static_cast<std::uint32_t>(i));
        const std::size_t j = i + std::min(n - i - 1, static_cast<std::size_t>(u * double(n - i)));
        std::swap(perm[i], perm[j]);
      }
      std::vector<std::size_t> sup(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k));
      std::sort(sup.begin(), sup.end());
      if (std::find(supports.begin(), supports.end(), sup) == supports.end())
        supports.push_back(std::move(sup));
    }
  }

  // Slot layout: support s, sign pattern p (bit b set => sign of support[b] is -1).
  const std::size_t patterns = std::size_t{1} << k;
  const std::size_t slots = supports.size() * patterns;
  std::vector<char> in_support(supports.size() * n, 0);
  for (std::size_t s = 0; s < supports.size(); ++s)
    for (std::size_t idx : supports[s]) in_support[s * n + idx] = 1;

  const auto hits = count_hits(
      n, opt.count, opt.seed, slots,
      [&](std::span<const double> z, std::span<std::uint64_t> counters) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += w[i] * std::abs(z[i]);
        const double slack = kMembershipRelTol * total;
        for (std::size_t s = 0; s < supports.size(); ++s) {
          double on = 0.0;
          bool has_zero = false;
          for (std::size_t idx : supports[s]) {
            on += w[idx] * std::abs(z[idx]);
            has_zero |= (z[idx] == 0.0);
          }
          const double off = total - on;
          if (!has_zero) {
            // Only sigma = -sign(z_S) can satisfy off <= -sum w sigma z.
            if (off > on + slack) continue;
            std::size_t p = 0;
            for (std::size_t b = 0; b < k; ++b)
              if (z[supports[s][b]] > 0.0) p |= (std::size_t{1} << b);
            ++counters[s * patterns + p];
          } else {
            for (std::size_t p = 0; p < patterns; ++p) {
              double rhs = 0.0;
              for (std::size_t b = 0; b < k; ++b) {
                const double sigma = (p >> b) & 1u ? -1.0 : 1.0;
                rhs -= w[supports[s][b]] * sigma * z[supports[s][b]];
              }
              if (off <= rhs + slack) ++counters[s * patterns + p];
            }
          }
        }
      },
      opt.workers);

  std::size_t best = 0;
  for (std::size_t j = 1; j < slots; ++j)
    if (hits[j] > hits[best]) best = j;

  std::vector<SignedSupport::Entry> entries;
  const auto& sup = supports[best / patterns];
  const std::size_t pat = best % patterns;
  for (std::size_t b = 0; b < k; ++b) entries.push_back({sup[b], (pat >> b) & 1u ? -1 : 1});

  McResult out;
  out.compliance = EstimateWithError::from_counts(hits[best], opt.count, opt.seed).complement();
  out.worst_support = SignedSupport(std::move(entries));
  out.supports_evaluated = supports.size();
  out.supports_enumerated = enumerated;
  return out;
}

}  // namespace regcomply::sampler
