#include <cmath>

#include <gtest/gtest.h>

#include "optdom/factor.hpp"
#include "optdom/oracle.hpp"

using namespace optdom;

namespace {

FactorOptions options(std::uint64_t seed) {
  FactorOptions o;
  o.ascent.seed = seed;
  return o;
}

MatrixOperator random_nonnegative(Rng& rng, Index rows, Index cols) {
  std::vector<double> a(rows * cols);
  for (double& v : a) v = rng.uniform(0.05, 1.0);
  return MatrixOperator::dense(rows, cols, std::move(a), true);
}

}  // namespace

TEST(BestConstant, IdentityIntoL1) {
  const ConstantEstimate c = best_constant(MatrixOperator::identity(), SpaceSpec::lq(1.0), SpaceSpec::lq(2.0), 4, 4, options(1));
  EXPECT_NEAR(c.value, 2.0, 1e-6);
  for (double x : c.maximizer) EXPECT_NEAR(x, 0.5, 1e-3);
}

TEST(BestConstant, SingleColumnRay) {
  const MatrixOperator h = MatrixOperator::hilbert();
  const double c = best_constant(h, SpaceSpec::lq(2.0), SpaceSpec::lq(3.0), 1, 64, options(2)).value;
  EXPECT_NEAR(c, norm(SpaceSpec::lq(2.0), column(h, 1, 64)), 1e-12);
}

TEST(BestConstant, DomainL1GivesLargestColumn) {
  const MatrixOperator m = MatrixOperator::dense(3, 4, {1, 0, 2, 0.5, 0, 1, 2, 0.5, 1, 1, 0, 0.5}, true);
  double best = 0.0;
  for (Index j = 1; j <= 4; ++j) best = std::max(best, column_norm(m, j, SpaceSpec::lq(2.0), 3, false).lower);
  EXPECT_NEAR(best_constant(m, SpaceSpec::lq(2.0), SpaceSpec::lq(1.0), 4, 3, options(3)).value, best, 1e-9);
}

TEST(BestConstant, AgreesWithGridOracle) {
  Rng rng(41, "factor-grid");
  for (int k = 0; k < 8; ++k) {
    const Index n = 2 + rng.below(3);
    const MatrixOperator m = random_nonnegative(rng, 4, n);
    const double a = best_constant(m, SpaceSpec::lq(1.0), SpaceSpec::lq(2.0), n, 4, options(4)).value;
    const double g = oracle::grid_best_constant(m, SpaceSpec::lq(1.0), SpaceSpec::lq(2.0), n, 4, 32);
    EXPECT_GE(a, 0.99 * g);
  }
}

TEST(Factorability, ClosedFormVerdicts) {
  const std::vector<Index> schedule{2, 4, 8, 16};
  const FactorabilityReport id1 =
      factorability_verdict(MatrixOperator::identity(), SpaceSpec::lq(1.0), 2.0, schedule, 16, options(5));
  EXPECT_EQ(id1.verdict, Verdict::unbounded_evidence);
  EXPECT_NEAR(id1.fit.exponent, 0.5, 0.01);
  const FactorabilityReport id2 =
      factorability_verdict(MatrixOperator::identity(), SpaceSpec::lq(2.0), 2.0, schedule, 16, options(5));
  EXPECT_EQ(id2.verdict, Verdict::bounded_evidence);
  for (const ConstantPoint& c : id2.constants) EXPECT_NEAR(c.estimate.value, 1.0, 1e-9);
  EXPECT_EQ(id2.condition_I.verdict, SeriesVerdict::diverges);
  EXPECT_NE(id2.condition_I.note.find("sufficient only"), std::string::npos);

  const FactorabilityReport d = factorability_verdict(MatrixOperator::diagonal(DiagonalSequence::geometric(0.5)),
                                                      SpaceSpec::lq(1.0), 2.0, schedule, 64, options(6), 64);
  EXPECT_EQ(d.verdict, Verdict::bounded_evidence);
  EXPECT_NEAR(d.constants.back().estimate.value, 1.0 / std::sqrt(3.0), 1e-3);
  EXPECT_EQ(d.condition_I.verdict, SeriesVerdict::converges);
  EXPECT_TRUE(d.condition_I.certified);
}

TEST(FactorProperty, ConstantsAreMonotoneAlongSchedules) {
  const MatrixOperator ms[] = {MatrixOperator::identity(), MatrixOperator::cesaro(), MatrixOperator::hilbert(),
                               MatrixOperator::diagonal(DiagonalSequence::geometric(0.5))};
  for (const MatrixOperator& m : ms) {
    const FactorabilityReport r = factorability_verdict(m, SpaceSpec::lq(2.0), 2.0, {2, 4, 8}, 64, options(7));
    EXPECT_TRUE(r.monotone) << m.name();
    for (std::size_t k = 1; k < r.constants.size(); ++k)
      EXPECT_GE(r.constants[k].estimate.value, r.constants[k - 1].estimate.value) << m.name();
  }
}

TEST(FactorProperty, CertifiedConditionIBoundsTheConstants) {
  const MatrixOperator ms[] = {MatrixOperator::diagonal(DiagonalSequence::geometric(0.5)),
                               MatrixOperator::diagonal(DiagonalSequence::power(-1.0))};
  for (const MatrixOperator& m : ms) {
    const FactorabilityReport r = factorability_verdict(m, SpaceSpec::lq(1.0), 2.0, {2, 4, 8, 16}, 64, options(8), 64);
    ASSERT_TRUE(r.condition_I.certified) << m.name();
    const double h = *r.condition_I.hoelder_constant();
    for (const ConstantPoint& c : r.constants) EXPECT_LE(c.estimate.value, h + 1e-9);
  }
}

TEST(ConditionI, Series) {
  const ConditionIResult d =
      condition_I(MatrixOperator::diagonal(DiagonalSequence::geometric(0.5)), SpaceSpec::lq(1.0), 2.0, 40, 40);
  EXPECT_NEAR(d.partial_lower.back(), 1.0 / 3.0, 1e-9);
  EXPECT_EQ(d.verdict, SeriesVerdict::converges);
  const ConditionIResult id = condition_I(MatrixOperator::identity(), SpaceSpec::lq(2.0), 2.0, 16, 16);
  EXPECT_DOUBLE_EQ(id.partial_lower.back(), 16.0);
  EXPECT_EQ(id.verdict, SeriesVerdict::diverges);
  const ConditionIResult empty = condition_I(MatrixOperator::identity(), SpaceSpec::lq(2.0), 2.0, 0, 16);
  EXPECT_TRUE(empty.partial_lower.empty());
  EXPECT_EQ(empty.verdict, SeriesVerdict::inconclusive);
}

TEST(RowsCondition, Series) {
  MatrixTraits t;
  t.nonnegative = true;
  t.row_extent = [](Index i) { return i; };
  const MatrixOperator rows = MatrixOperator::expression(Expression("(j <= i) * 2^(-i)"), t);
  const RowsConditionResult r = rows_condition(rows, 1.0, 60, 60);
  EXPECT_NEAR(r.partial_sums.back(), 2.0, 1e-9);
  EXPECT_EQ(r.verdict, SeriesVerdict::converges);
  EXPECT_EQ(r.truncated_rows, 0u);

  const RowsConditionResult c = rows_condition(MatrixOperator::cesaro(), 1.0, 32, 32);
  EXPECT_NEAR(c.partial_sums.back(), 32.0, 1e-9);
  EXPECT_EQ(c.verdict, SeriesVerdict::diverges);
  EXPECT_EQ(rows_condition(MatrixOperator::identity(), 2.0, 16, 16).verdict, SeriesVerdict::diverges);

  EXPECT_THROW(rows_condition(MatrixOperator::dense(1, 2, {1.0, -1.0}), 1.0, 2, 2), PreconditionError);
}

TEST(Domination, ClosedForms) {
  const MatrixOperator id = MatrixOperator::identity();
  const DominationCheck c = domination_embedding_check(id, SpaceSpec::lq(1.0), 0.5, 2, 2, options(9));
  EXPECT_NEAR(c.D.value, 2.0, 1e-6);
  EXPECT_NEAR(c.B.value, 2.0, 1e-6);
  EXPECT_TRUE(c.first_half_ok);
  EXPECT_TRUE(c.second_half_ok);

  const DominationCheck one = domination_embedding_check(id, SpaceSpec::lq(1.0), 0.5, 1, 1, options(9));
  EXPECT_NEAR(one.D.value, 1.0, 1e-12);
  EXPECT_NEAR(one.B.value, 1.0, 1e-12);

  Rng rng(42, "factor-r1");
  const MatrixOperator m = random_nonnegative(rng, 4, 4);
  EXPECT_NEAR(power_domination_constant(m, SpaceSpec::lq(2.0), 1.0, 4, 4, options(10)).value, 1.0, 1e-9);
}

TEST(Domination, SingleScaledColumn) {
  const MatrixOperator m = MatrixOperator::diagonal(DiagonalSequence::explicit_values({4.0}));
  const double d = power_domination_constant(m, SpaceSpec::lq(1.0), 0.5, 1, 1, options(11)).value;
  EXPECT_NEAR(d, 4.0, 1e-9);
}

TEST(Domination, AgreesWithGridOracles) {
  Rng rng(43, "factor-domination-grid");
  for (int k = 0; k < 4; ++k) {
    const Index n = 2 + rng.below(2);
    const MatrixOperator m = random_nonnegative(rng, 4, n);
    const double d = power_domination_constant(m, SpaceSpec::lq(2.0), 0.5, n, 4, options(12)).value;
    const double b = embedding_constant(m, SpaceSpec::lq(2.0), 0.5, n, 4, options(12)).value;
    EXPECT_GE(d, 0.99 * oracle::grid_power_domination(m, SpaceSpec::lq(2.0), 0.5, n, 4, 32));
    EXPECT_GE(b, 0.99 * oracle::grid_embedding(m, SpaceSpec::lq(2.0), 0.5, n, 4, 32));
    EXPECT_LE(d, 2.0 * b + kDominationTolerance);
    EXPECT_LE(b, 4.0 * d + kDominationTolerance);
  }
}

TEST(Extension, IntegrateMatchesApply) {
  EXPECT_TRUE(extension_consistency(MatrixOperator::cesaro(), SpaceSpec::lq(2.0), FiniteVector{}, 8));
  EXPECT_TRUE(extension_consistency(MatrixOperator::hilbert(), SpaceSpec::lq(2.0), FiniteVector::unit(3), 8));
  Rng rng(44, "factor-extension");
  for (int k = 0; k < 100; ++k) {
    std::vector<double> f(1 + rng.below(10));
    for (double& v : f) v = rng.uniform(-2.0, 2.0);
    const FiniteVector x = FiniteVector::from_dense(std::span<const double>(f));
    EXPECT_TRUE(extension_consistency(MatrixOperator::cesaro(), SpaceSpec::lq(2.0), x, 32));
    EXPECT_TRUE(extension_consistency(MatrixOperator::hilbert(), SpaceSpec::lq(1.0), x, 32));
  }
}
