#pragma once

// Thin C++ wrappers over the GSL derivative-free minimizers.

#include <gsl/gsl_errno.h>
#include <gsl/gsl_min.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <type_traits>

#include "regcomply/core.hpp"

namespace regcomply {

namespace detail {

inline void disable_gsl_abort() {
  static const bool once = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)once;
}

template <typename F>
double gsl_multimin_trampoline(const gsl_vector* v, void* params) {
  auto& f = *static_cast<F*>(params);
  const double val = f(std::span<const double>(v->data, v->size));
  return std::isfinite(val) ? val : std::numeric_limits<double>::max();
}

template <typename F>
double gsl_min_trampoline(double x, void* params) {
  return (*static_cast<F*>(params))(x);
}

struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct SimplexDeleter {
  void operator()(gsl_multimin_fminimizer* s) const { gsl_multimin_fminimizer_free(s); }
};
struct MinDeleter {
  void operator()(gsl_min_fminimizer* s) const { gsl_min_fminimizer_free(s); }
};

}  // namespace detail

struct SimplexResult {
  Vector x;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Nelder-Mead (GSL nmsimplex2) minimization of f : span<const double> -> double.
// Stops when the simplex characteristic size drops below size_tol, or when
// value_tol > 0 and the best value moved by at most value_tol * (1 + |f|)
// over the last 10 * (dim + 1) iterations.
template <typename F>
SimplexResult nelder_mead(F&& f, std::span<const double> x0, double step, double size_tol,
                          std::size_t max_iters, double value_tol = 0.0) {
  using Fn = std::remove_reference_t<F>;
  detail::disable_gsl_abort();
  const std::size_t dim = x0.size();
  if (dim == 0) {
    return {Vector{}, f(std::span<const double>{}), 0, true};
  }
  std::unique_ptr<gsl_vector, detail::VectorDeleter> x(gsl_vector_alloc(dim));
  std::unique_ptr<gsl_vector, detail::VectorDeleter> ss(gsl_vector_alloc(dim));
  for (std::size_t i = 0; i < dim; ++i) gsl_vector_set(x.get(), i, x0[i]);
  gsl_vector_set_all(ss.get(), step);

  gsl_multimin_function fn;
  fn.n = dim;
  fn.f = &detail::gsl_multimin_trampoline<Fn>;
  fn.params = const_cast<void*>(static_cast<const void*>(std::addressof(f)));

  std::unique_ptr<gsl_multimin_fminimizer, detail::SimplexDeleter> s(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim));
  gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), ss.get());

  SimplexResult out;
  const std::size_t window = 10 * (dim + 1);
  double anchor = gsl_multimin_fminimizer_minimum(s.get());
  std::size_t anchor_iter = 0;
  for (; out.iterations < max_iters; ++out.iterations) {
    if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), size_tol) == GSL_SUCCESS) {
      out.converged = true;
      break;
    }
    if (value_tol > 0.0) {
      const double cur = gsl_multimin_fminimizer_minimum(s.get());
      if (std::abs(anchor - cur) > value_tol * (1.0 + std::abs(cur))) {
        anchor = cur;
        anchor_iter = out.iterations;
      } else if (out.iterations - anchor_iter >= window) {
        out.converged = true;
        break;
      }
    }
  }
  const gsl_vector* best = gsl_multimin_fminimizer_x(s.get());
  out.x.assign(best->data, best->data + dim);
  out.value = gsl_multimin_fminimizer_minimum(s.get());
  return out;
}

struct ScalarResult {
  double x = 0.0;
  double value = 0.0;
  bool converged = false;
};

// Golden-section minimization on [lo, hi] from an interior guess with
// f(guess) < min(f(lo), f(hi)).
template <typename F>
ScalarResult golden_section(F&& f, double lo, double guess, double hi, double abs_tol,
                            std::size_t max_iters = 500) {
  using Fn = std::remove_reference_t<F>;
  detail::disable_gsl_abort();
  gsl_function fn;
  fn.function = &detail::gsl_min_trampoline<Fn>;
  fn.params = const_cast<void*>(static_cast<const void*>(std::addressof(f)));
  std::unique_ptr<gsl_min_fminimizer, detail::MinDeleter> s(
      gsl_min_fminimizer_alloc(gsl_min_fminimizer_goldensection));
  if (gsl_min_fminimizer_set(s.get(), &fn, guess, lo, hi) != GSL_SUCCESS)
    throw NumericalError("golden-section: guess does not bracket a minimum");
  ScalarResult out;
  for (std::size_t it = 0; it < max_iters; ++it) {
    const int status = gsl_min_fminimizer_iterate(s.get());
    const double a = gsl_min_fminimizer_x_lower(s.get());
    const double b = gsl_min_fminimizer_x_upper(s.get());
    if (status != GSL_SUCCESS) {
      // Function values no longer separate: accept if the bracket is at the
      // sqrt(eps) resolution of a smooth minimum.
      const double floor = 8.0 * std::sqrt(std::numeric_limits<double>::epsilon()) *
                           (1.0 + std::abs(0.5 * (a + b)));
      out.converged = b - a <= std::max(abs_tol, floor);
      break;
    }
    if (gsl_min_test_interval(a, b, abs_tol, 0.0) == GSL_SUCCESS) {
      out.converged = true;
      break;
    }
  }
  out.x = gsl_min_fminimizer_x_minimum(s.get());
  out.value = gsl_min_fminimizer_f_minimum(s.get());
  if (!out.converged) throw NumericalError("golden-section did not converge");
  return out;
}

}  // namespace regcomply
