#pragma once

#include <cstddef>
#include <cstdint>

#include "regcomply/errors.hpp"

namespace regcomply {

// Budgets shared by the supremum evaluators and the weight optimizer.
struct SearchConfig {
  std::size_t restarts = 32;     // multistart local searches
  std::size_t grid_steps = 9;    // weight grid points per free coordinate
  double tolerance = 1e-10;      // simplex size tolerance
  std::size_t max_iters = 2000;  // per local search
  std::uint64_t seed = 0;
  std::uint64_t samples = 200'000;  // Monte Carlo measures only
  double weight_floor = 0.05;       // lower bound on weights during optimization
  std::size_t workers = 0;          // 0: REGCOMPLY_THREADS or hardware concurrency

  void validate() const {
    if (restarts < 1 || grid_steps < 1 || max_iters < 1 || samples < 1)
      throw DomainError("search budgets must be positive");
    if (!(tolerance > 0.0 && tolerance < 1e-2))
      throw DomainError("search tolerance must lie in (0, 1e-2)");
    if (!(weight_floor > 0.0 && weight_floor < 1.0))
      throw DomainError("weight floor must lie in (0, 1)");
  }
};

}  // namespace regcomply
