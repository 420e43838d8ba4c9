#pragma once

// Maximization of compliance measures over normalized weight vectors, and
// randomized optimality certificates.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regcomply/core.hpp"
#include "regcomply/geometry.hpp"
#include "regcomply/minimize.hpp"
#include "regcomply/parallel.hpp"
#include "regcomply/random.hpp"
#include "regcomply/rip.hpp"
#include "regcomply/sampler.hpp"
#include "regcomply/search_config.hpp"

namespace regcomply::opt {

enum class Measure { U3, NU3, RipNec, RipSuff, McU, McNU };

inline std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::U3: return "U3";
    case Measure::NU3: return "NU3";
    case Measure::RipNec: return "rip-nec";
    case Measure::RipSuff: return "rip-suff";
    case Measure::McU: return "mc-U";
    case Measure::McNU: return "mc-NU";
  }
  return "?";
}

inline Measure parse_measure(std::string_view s) {
  for (Measure m : {Measure::U3, Measure::NU3, Measure::RipNec, Measure::RipSuff, Measure::McU,
                    Measure::McNU})
    if (s == to_string(m)) return m;
  throw ConfigError("unknown measure '" + std::string(s) +
                    "' (expected U3, NU3, rip-nec, rip-suff, mc-U, mc-NU)");
}

inline void check_compatible(Measure m, const SparsityModel& model) {
  if ((m == Measure::U3 || m == Measure::NU3) && (model.n() != 3 || model.k() != 1))
    throw DomainError("measures U3/NU3 are defined for n = 3, k = 1 only");
}

struct Evaluation {
  double value = 0.0;  // larger is better
  Vector witness;      // RIP measures only
};

// rip-nec scores delta_nec = (gamma - 1)/(gamma + 1), rip-suff scores
// delta_suff; Monte Carlo measures reuse cfg.seed for every weight vector.
inline Evaluation evaluate_measure(Measure m, const WeightVector& w, const SparsityModel& model,
                                   const SearchConfig& cfg) {
  check_compatible(m, model);
  check_dimension(model.n(), w.size());
  switch (m) {
    case Measure::U3: return {geometry::compliance_uniform_3d(w), {}};
    case Measure::NU3: return {geometry::compliance_nonuniform_3d(w), {}};
    case Measure::RipNec: {
      auto r = rip::delta_nec(w, model, cfg);
      return {r.value, std::move(r.witness)};
    }
    case Measure::RipSuff: {
      auto r = rip::delta_suff(w, model, cfg);
      return {r.value, std::move(r.witness)};
    }
    case Measure::McU:
    case Measure::McNU: {
      sampler::McOptions o;
      o.count = cfg.samples;
      o.seed = cfg.seed;
      o.workers = cfg.workers;
      const auto mode = m == Measure::McU ? sampler::Mode::Uniform : sampler::Mode::NonUniform;
      return {sampler::mc_compliance(w, model, mode, o).compliance.estimate, {}};
    }
  }
  return {};
}

struct TracePoint {
  std::size_t iteration;
  Vector w;
  double value;
};

struct OptimizationTrace {
  std::string measure;
  WeightVector best_w = WeightVector::ones(1);
  double best_value = -std::numeric_limits<double>::infinity();
  std::vector<TracePoint> history;  // best-so-far improvements, nondecreasing
  std::size_t evaluations = 0;
  bool budget_exhausted = false;
};

namespace detail {

// Free coordinates x in R^(n-1) -> weights (1, clamp(x_i, floor, 1)).
inline Vector weights_from_free(std::span<const double> x, double floor) {
  Vector w(x.size() + 1, 1.0);
  for (std::size_t i = 0; i < x.size(); ++i) w[i + 1] = std::clamp(x[i], floor, 1.0);
  return w;
}

}  // namespace detail

// Coarse grid over normalized weights with w_1 pinned to 1 (permutation and
// scale symmetry), then Nelder-Mead refinement from the best grid cells. The
// all-ones vector is always on the grid.
inline OptimizationTrace optimize_weights(Measure m, const SparsityModel& model,
                                          const SearchConfig& cfg) {
  cfg.validate();
  check_compatible(m, model);
  const std::size_t n = model.n();
  const std::size_t dim = n - 1;

  // Inner evaluations stay single-threaded; the grid is parallel.
  SearchConfig inner = cfg;
  inner.workers = 1;
  inner.restarts = std::max<std::size_t>(1, std::min<std::size_t>(cfg.restarts, 8));

  Vector levels(cfg.grid_steps);
  for (std::size_t i = 0; i < cfg.grid_steps; ++i)
    levels[i] = cfg.grid_steps == 1
                    ? 1.0
                    : cfg.weight_floor + (1.0 - cfg.weight_floor) * double(i) / double(cfg.grid_steps - 1);

  double cells = 1.0;
  for (std::size_t i = 0; i < dim; ++i) cells *= double(levels.size());
  if (cells > 1e6) throw CapacityError("weight grid exceeds 1e6 cells");
  const std::size_t ncells = static_cast<std::size_t>(cells);

  std::vector<Vector> grid_w(ncells);
  std::vector<double> grid_v(ncells);
  parallel_for(ncells, cfg.workers, [&](std::size_t c) {
    Vector x(dim);
    std::size_t rem = c;
    for (std::size_t d = 0; d < dim; ++d) {
      x[d] = levels[rem % levels.size()];
      rem /= levels.size();
    }
    grid_w[c] = detail::weights_from_free(x, cfg.weight_floor);
    grid_v[c] = evaluate_measure(m, normalize_weights(grid_w[c]), model, inner).value;
  });

  OptimizationTrace trace;
  trace.measure = std::string(to_string(m));
  std::size_t iteration = 0;
  auto offer = [&](const Vector& w, double v) {
    ++trace.evaluations;
    ++iteration;
    if (v > trace.best_value ||
        (v == trace.best_value &&
         std::lexicographical_compare(w.begin(), w.end(), trace.best_w.vec().begin(),
                                      trace.best_w.vec().end()))) {
      trace.best_value = v;
      trace.best_w = normalize_weights(w);
      trace.history.push_back({iteration, w, v});
    }
  };
  for (std::size_t c = 0; c < ncells; ++c) offer(grid_w[c], grid_v[c]);

  // Refine from the best few cells.
  std::vector<std::size_t> order(ncells);
  for (std::size_t i = 0; i < ncells; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return grid_v[a] > grid_v[b]; });
  const std::size_t starts = std::min<std::size_t>(ncells, std::max<std::size_t>(1, cfg.restarts / 8));
  std::vector<SimplexResult> refined(starts);
  std::vector<Vector> refined_w(starts);
  std::vector<double> refined_v(starts);
  if (dim > 0) {
    parallel_for(starts, cfg.workers, [&](std::size_t s) {
      const Vector& w0 = grid_w[order[s]];
      const Vector x0(w0.begin() + 1, w0.end());
      // Clamped evaluation plus a quadratic penalty outside [floor, 1], so the
      // simplex contracts onto the box instead of drifting on a plateau.
      auto f = [&](std::span<const double> x) {
        double penalty = 0.0;
        for (double xi : x) {
          const double out = std::max(0.0, cfg.weight_floor - xi) + std::max(0.0, xi - 1.0);
          penalty += out * out;
        }
        return penalty -
               evaluate_measure(m, normalize_weights(detail::weights_from_free(x, cfg.weight_floor)),
                                model, inner)
                   .value;
      };
      const double step = 0.5 * (1.0 - cfg.weight_floor) / double(std::max<std::size_t>(1, cfg.grid_steps - 1));
      refined[s] = nelder_mead(f, x0, step, cfg.tolerance, cfg.max_iters, cfg.tolerance);
      refined_w[s] = detail::weights_from_free(refined[s].x, cfg.weight_floor);
      refined_v[s] = evaluate_measure(m, normalize_weights(refined_w[s]), model, inner).value;
    });
  }
  for (std::size_t s = 0; s < refined_w.size(); ++s) {
    if (refined_w[s].empty()) continue;
    trace.budget_exhausted |= !refined[s].converged;
    offer(refined_w[s], refined_v[s]);
  }
  return trace;
}

struct Violation {
  Vector w;
  double value;
  Vector witness;
};

struct Certificate {
  std::string measure;
  Vector candidate;
  double candidate_value = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double min_margin = std::numeric_limits<double>::infinity();  // candidate - best trial
  std::vector<Violation> violations;
  std::vector<Vector> trial_weights;
  std::vector<double> trial_values;
};

// Random weight vector with entries uniform in [floor, 1], normalized, and at
// least one entry <= max_min so it is separated from the all-ones vector.
inline WeightVector random_weights(std::size_t n, std::uint64_t seed, std::uint64_t index,
                                   double floor = 0.05, double max_min = 0.95) {
  const CounterRng rng(seed, 0x77);
  for (std::uint32_t attempt = 0;; ++attempt) {
    Vector w(n);
    for (std::size_t i = 0; i < n; ++i)
      w[i] = floor + (1.0 - floor) * rng.uniform(index, attempt * std::uint32_t(n) + std::uint32_t(i));
    auto wv = normalize_weights(w);
    if (*std::min_element(wv.vec().begin(), wv.vec().end()) <= max_min || n == 1) return wv;
  }
}

// Samples `trials` random weight vectors and checks that each scores strictly
// below the candidate.
inline Certificate optimality_certificate(Measure m, const WeightVector& candidate,
                                          const SparsityModel& model, std::size_t trials,
                                          std::uint64_t seed, const SearchConfig& cfg = {}) {
  if (trials < 1) throw DomainError("certificate needs at least one trial");
  check_compatible(m, model);
  SearchConfig inner = cfg;
  inner.workers = 1;

  Certificate cert;
  cert.measure = std::string(to_string(m));
  cert.candidate = candidate.vec();
  cert.trials = trials;
  cert.seed = seed;
  cert.candidate_value = evaluate_measure(m, candidate, model, inner).value;

  std::vector<Evaluation> evals(trials);
  cert.trial_weights.resize(trials);
  parallel_for(trials, cfg.workers, [&](std::size_t t) {
    WeightVector w = random_weights(model.n(), seed, t, cfg.weight_floor);
    if (w == candidate) w = random_weights(model.n(), seed, t + trials, cfg.weight_floor);
    cert.trial_weights[t] = w.vec();
    evals[t] = evaluate_measure(m, w, model, inner);
  });
  for (std::size_t t = 0; t < trials; ++t) {
    const double v = evals[t].value;
    cert.trial_values.push_back(v);
    cert.min_margin = std::min(cert.min_margin, cert.candidate_value - v);
    if (!(v < cert.candidate_value))
      cert.violations.push_back({cert.trial_weights[t], v, evals[t].witness});
  }
  return cert;
}

}  // namespace regcomply::opt
