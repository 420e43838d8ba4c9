#include <gtest/gtest.h>

#include <cmath>

#include "regcomply/errors.hpp"
#include "regcomply/geometry.hpp"
#include "regcomply/optimizer.hpp"

using namespace regcomply;
using namespace regcomply::opt;

namespace {

double max_dev_from_ones(const WeightVector& w) {
  double d = 0.0;
  for (double v : w.vec()) d = std::max(d, std::abs(v - 1.0));
  return d;
}

}  // namespace

TEST(Measure, ParseAndPrint) {
  for (Measure m : {Measure::U3, Measure::NU3, Measure::RipNec, Measure::RipSuff, Measure::McU,
                    Measure::McNU})
    EXPECT_EQ(parse_measure(to_string(m)), m);
  EXPECT_THROW(parse_measure("nope"), ConfigError);
  EXPECT_THROW(check_compatible(Measure::U3, SparsityModel(4, 1)), DomainError);
  EXPECT_THROW(check_compatible(Measure::NU3, SparsityModel(3, 2)), DomainError);
}

TEST(RandomWeights, NormalizedAndSeparated) {
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto w = random_weights(5, 3, i);
    EXPECT_DOUBLE_EQ(*std::max_element(w.vec().begin(), w.vec().end()), 1.0);
    EXPECT_LE(*std::min_element(w.vec().begin(), w.vec().end()), 0.95);
    EXPECT_GE(*std::min_element(w.vec().begin(), w.vec().end()), 0.05 - 1e-12);
  }
  EXPECT_EQ(random_weights(4, 9, 17).vec(), random_weights(4, 9, 17).vec());
  EXPECT_NE(random_weights(4, 9, 17).vec(), random_weights(4, 9, 18).vec());
}

TEST(Optimize, NonUniform3dPicksOnes) {
  const auto tr = optimize_weights(Measure::NU3, SparsityModel(3, 1), {});
  EXPECT_LE(max_dev_from_ones(tr.best_w), 1e-3);
  EXPECT_NEAR(tr.best_value, geometry::compliance_nonuniform_3d(WeightVector::ones(3)), 1e-9);
  EXPECT_FALSE(tr.budget_exhausted);
}

TEST(Optimize, Uniform3dPicksOnes) {
  const auto tr = optimize_weights(Measure::U3, SparsityModel(3, 1), {});
  EXPECT_LE(max_dev_from_ones(tr.best_w), 1e-3);
}

TEST(Optimize, RipSuffPicksOnes) {
  SearchConfig cfg;
  cfg.grid_steps = 5;
  const auto tr = optimize_weights(Measure::RipSuff, SparsityModel(4, 1), cfg);
  EXPECT_LE(max_dev_from_ones(tr.best_w), 1e-3);
  EXPECT_NEAR(tr.best_value, 1 / std::sqrt(2.0), 1e-6);
}

TEST(Optimize, RipNecPicksOnes) {
  SearchConfig cfg;
  cfg.grid_steps = 5;
  const auto tr = optimize_weights(Measure::RipNec, SparsityModel(4, 1), cfg);
  EXPECT_LE(max_dev_from_ones(tr.best_w), 1e-3);
  EXPECT_NEAR(tr.best_value, 5.0 / 7.0, 1e-6);
}

TEST(Optimize, HistoryNondecreasingAndBeatsOnes) {
  SearchConfig cfg;
  cfg.grid_steps = 4;
  const auto tr = optimize_weights(Measure::RipSuff, SparsityModel(5, 2), cfg);
  ASSERT_FALSE(tr.history.empty());
  for (std::size_t i = 1; i < tr.history.size(); ++i) {
    EXPECT_GE(tr.history[i].value, tr.history[i - 1].value);
    EXPECT_GE(tr.history[i].iteration, tr.history[i - 1].iteration);
  }
  EXPECT_EQ(tr.history.back().value, tr.best_value);
  const double ones = evaluate_measure(Measure::RipSuff, WeightVector::ones(5), SparsityModel(5, 2), cfg).value;
  EXPECT_GE(tr.best_value, ones);
  EXPECT_GT(tr.evaluations, 0u);
}

TEST(Optimize, Validation) {
  SearchConfig bad;
  bad.weight_floor = 0.0;
  EXPECT_THROW(optimize_weights(Measure::NU3, SparsityModel(3, 1), bad), DomainError);
  EXPECT_THROW(optimize_weights(Measure::U3, SparsityModel(4, 1), {}), DomainError);
}

TEST(Evaluate, PermutationInvariant) {
  const SparsityModel m(4, 1);
  const auto a = normalize_weights({1, 0.7, 0.5, 0.9});
  const auto b = normalize_weights({0.5, 0.9, 1, 0.7});
  for (Measure ms : {Measure::RipNec, Measure::RipSuff})
    EXPECT_NEAR(evaluate_measure(ms, a, m, {}).value, evaluate_measure(ms, b, m, {}).value, 1e-10);
  const SparsityModel m3(3, 1);
  EXPECT_NEAR(evaluate_measure(Measure::NU3, normalize_weights({1, 0.6, 0.8}), m3, {}).value,
              evaluate_measure(Measure::NU3, normalize_weights({0.8, 1, 0.6}), m3, {}).value, 1e-10);
}

TEST(Certificate, RipNecOnesHasNoViolations) {
  const auto cert = optimality_certificate(Measure::RipNec, WeightVector::ones(4),
                                           SparsityModel(4, 1), 60, 7);
  EXPECT_EQ(cert.trials, 60u);
  EXPECT_EQ(cert.trial_values.size(), 60u);
  EXPECT_TRUE(cert.violations.empty());
  EXPECT_GT(cert.min_margin, 0.0);
  EXPECT_NEAR(cert.candidate_value, 5.0 / 7.0, 1e-9);
}

TEST(Certificate, ReportsViolationsForBadCandidate) {
  const auto cert = optimality_certificate(Measure::NU3, normalize_weights({1, 1, 0.5}),
                                           SparsityModel(3, 1), 50, 1);
  EXPECT_FALSE(cert.violations.empty());
  EXPECT_LT(cert.min_margin, 0.0);
  for (const auto& v : cert.violations) EXPECT_GE(v.value, cert.candidate_value);
}

TEST(Certificate, ReproducibleAndWorkerIndependent) {
  SearchConfig c1, c3;
  c1.workers = 1;
  c3.workers = 3;
  const auto a = optimality_certificate(Measure::RipSuff, WeightVector::ones(4), SparsityModel(4, 1), 12, 5, c1);
  const auto b = optimality_certificate(Measure::RipSuff, WeightVector::ones(4), SparsityModel(4, 1), 12, 5, c3);
  EXPECT_EQ(a.trial_weights, b.trial_weights);
  EXPECT_EQ(a.trial_values, b.trial_values);
  EXPECT_EQ(a.min_margin, b.min_margin);
  EXPECT_THROW(optimality_certificate(Measure::U3, WeightVector::ones(4), SparsityModel(4, 1), 5, 0),
               DomainError);
  EXPECT_THROW(optimality_certificate(Measure::RipSuff, WeightVector::ones(4), SparsityModel(4, 1), 0, 0),
               DomainError);
}
