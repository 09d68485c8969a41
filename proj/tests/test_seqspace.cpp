#include <cmath>

#include <gtest/gtest.h>

#include "optdom/oracle.hpp"
#include "optdom/seqspace.hpp"

using namespace optdom;

namespace {

FiniteVector random_vector(Rng& rng, Index len) {
  std::vector<Entry> es;
  for (Index i = 1; i <= len; ++i)
    if (rng.below(4) != 0) es.push_back({i, rng.uniform(-4.0, 4.0)});
  return FiniteVector::from_entries(es);
}

std::vector<SpaceSpec> catalogue() {
  return {SpaceSpec::lq(1.0),
          SpaceSpec::lq(2.0),
          SpaceSpec::lq(0.5),
          SpaceSpec::lq(kInf),
          SpaceSpec::weighted_lq(2.0, Weights::power_decay(-1.0)),
          SpaceSpec::weighted_lq(1.0, Weights::geometric(0.5)),
          SpaceSpec::power(SpaceSpec::lq(1.0), 2.0),
          SpaceSpec::power(SpaceSpec::lq(2.0), 0.5),
          SpaceSpec::intersection(SpaceSpec::lq(1.0), SpaceSpec::lq(2.0)),
          SpaceSpec::sum(SpaceSpec::lq(1.0), SpaceSpec::lq(kInf)),
          SpaceSpec::sum(SpaceSpec::lq(2.0), SpaceSpec::lq(0.5))};
}

}  // namespace

TEST(Norm, ClosedFormExamples) {
  EXPECT_DOUBLE_EQ(norm(SpaceSpec::lq(2.0), FiniteVector::from_dense({3.0, 4.0})), 5.0);
  EXPECT_DOUBLE_EQ(norm(SpaceSpec::lq(0.5), FiniteVector::from_dense({1.0, 1.0})), 4.0);
  EXPECT_DOUBLE_EQ(norm(SpaceSpec::lq(kInf), FiniteVector::from_dense({1.0, -7.0, 2.0})), 7.0);
  EXPECT_DOUBLE_EQ(norm(SpaceSpec::intersection(SpaceSpec::lq(1.0), SpaceSpec::lq(2.0)), FiniteVector::from_dense({1.0, 1.0})), 2.0);
  EXPECT_EQ(norm(SpaceSpec::lq(3.0), FiniteVector{}), 0.0);
}

TEST(Norm, SumOfL1AndLinf) {
  const SpaceSpec s = SpaceSpec::sum(SpaceSpec::lq(1.0), SpaceSpec::lq(kInf));
  EXPECT_NEAR(norm(s, FiniteVector::from_dense({2.0, 1.0})), 2.0, 1e-9);
  const SumDecomposition d = sum_norm_decomposition(s, FiniteVector::from_dense({2.0, 1.0}));
  EXPECT_NEAR(d.value, 2.0, 1e-9);
  EXPECT_EQ(d.first + d.second, FiniteVector::from_dense({2.0, 1.0}));
  EXPECT_LE(d.lower, d.value + 1e-12);
}

TEST(Norm, SumSingleCoordinateTakesCheaperFactor) {
  const SpaceSpec x = SpaceSpec::weighted_lq(1.0, Weights::explicit_values({3.0}));
  const SpaceSpec s = SpaceSpec::sum(x, SpaceSpec::lq(2.0));
  EXPECT_NEAR(norm(s, FiniteVector::unit(1, -5.0)), 5.0, 1e-9);
  const SumDecomposition z = sum_norm_decomposition(s, FiniteVector{});
  EXPECT_EQ(z.value, 0.0);
  EXPECT_THROW(sum_norm_decomposition(SpaceSpec::lq(1.0), FiniteVector::unit(1)), InvalidArgument);
}

TEST(Norm, InvalidSpacesAreRejected) {
  EXPECT_THROW(SpaceSpec::lq(0.0), InvalidSpace);
  EXPECT_THROW(SpaceSpec::lq(-1.0), InvalidSpace);
  EXPECT_THROW(SpaceSpec::weighted_lq(1.0, Weights::explicit_values({1.0, -2.0})), InvalidSpace);
}

TEST(Norm, OverflowReportsOffendingIndex) {
  const FiniteVector f = FiniteVector::from_entries({{1, 1.0}, {4, 1e300}});
  try {
    norm(SpaceSpec::power(SpaceSpec::weighted_lq(1.0, Weights::explicit_values({1.0, 1.0, 1.0, 1e300})), 0.5), f);
    FAIL() << "expected RangeError";
  } catch (const RangeError& e) {
    EXPECT_EQ(e.index(), 4u);
  }
}

TEST(SpaceFlags, SigmaOrderContinuity) {
  EXPECT_FALSE(SpaceSpec::lq(kInf).sigma_order_continuous());
  EXPECT_TRUE(SpaceSpec::lq(2.0).sigma_order_continuous());
  EXPECT_FALSE(SpaceSpec::sum(SpaceSpec::lq(1.0), SpaceSpec::lq(kInf)).sigma_order_continuous());
  EXPECT_TRUE(SpaceSpec::intersection(SpaceSpec::lq(1.0), SpaceSpec::lq(2.0)).sigma_order_continuous());
}

TEST(QuasinormConstant, KnownValues) {
  EXPECT_EQ(quasinorm_constant(SpaceSpec::lq(2.0)), 1.0);
  EXPECT_DOUBLE_EQ(quasinorm_constant(SpaceSpec::lq(0.5)), 2.0);
  EXPECT_EQ(quasinorm_constant(SpaceSpec::intersection(SpaceSpec::lq(1.0), SpaceSpec::lq(2.0))), 1.0);
  EXPECT_EQ(quasinorm_constant(SpaceSpec::power(SpaceSpec::lq(1.0), 2.0)), 1.0);
}

TEST(KoetheDual, ConjugateExponents) {
  EXPECT_DOUBLE_EQ(koethe_dual_norm(SpaceSpec::lq(2.0), FiniteVector::unit(1)), 1.0);
  EXPECT_DOUBLE_EQ(koethe_dual_norm(SpaceSpec::lq(1.0), FiniteVector::from_dense({1.0, 2.0})), 2.0);
  const FiniteVector f = FiniteVector::from_dense({1.0, -2.0, 3.0});
  EXPECT_NEAR(koethe_dual_norm(SpaceSpec::lq(4.0), f), norm(SpaceSpec::lq(4.0 / 3.0), f), 1e-12);
  EXPECT_THROW(koethe_dual_norm(SpaceSpec::lq(0.5), f), UnsupportedDual);
  EXPECT_THROW(koethe_dual_norm(SpaceSpec::sum(SpaceSpec::lq(1.0), SpaceSpec::lq(2.0)), f), UnsupportedDual);
}

TEST(SeqspaceProperty, HomogeneityAndLatticeMonotonicity) {
  Rng rng(11, "seqspace-lattice");
  for (const SpaceSpec& s : catalogue()) {
    for (int k = 0; k < 60; ++k) {
      const FiniteVector f = random_vector(rng, 6);
      const double alpha = rng.uniform(-3.0, 3.0);
      const double nf = norm(s, f);
      EXPECT_NEAR(norm(s, f.scaled(alpha)), std::abs(alpha) * nf, 1e-7 * std::max(1.0, std::abs(alpha) * nf))
          << s.describe();
      std::vector<Entry> bigger;
      for (const Entry& e : f.entries()) bigger.push_back({e.index, e.value * (1.0 + rng.uniform())});
      bigger.push_back({7, rng.uniform(0.1, 1.0)});
      EXPECT_LE(nf, norm(s, FiniteVector::from_entries(bigger)) * (1.0 + 1e-8) + 1e-12) << s.describe();
    }
  }
}

TEST(SeqspaceProperty, QuasiTriangle) {
  Rng rng(12, "seqspace-triangle");
  for (const SpaceSpec& s : catalogue()) {
    const double k = quasinorm_constant(s);
    for (int n = 0; n < 1000; ++n) {
      const FiniteVector f = random_vector(rng, 5), g = random_vector(rng, 5);
      EXPECT_LE(norm(s, f + g), k * (norm(s, f) + norm(s, g)) * (1.0 + 1e-8) + 1e-12) << s.describe();
    }
  }
}

TEST(SeqspaceProperty, PowerIdentity) {
  Rng rng(13, "seqspace-power");
  const SpaceSpec bases[] = {SpaceSpec::lq(1.0), SpaceSpec::weighted_lq(2.0, Weights::power_decay(0.5)),
                             SpaceSpec::intersection(SpaceSpec::lq(1.0), SpaceSpec::lq(3.0))};
  for (const SpaceSpec& x : bases) {
    for (double p : {0.5, 2.0, 3.0}) {
      for (int k = 0; k < 100; ++k) {
        const FiniteVector f = random_vector(rng, 6);
        const double direct = std::pow(norm(x, f.pow_abs(p)), 1.0 / p);
        EXPECT_NEAR(norm(SpaceSpec::power(x, p), f), direct, 1e-12 * std::max(1.0, direct));
      }
    }
  }
}

TEST(SeqspaceProperty, PowerOfLqIsLqOfProduct) {
  Rng rng(14, "seqspace-power-lq");
  for (int k = 0; k < 200; ++k) {
    const FiniteVector f = random_vector(rng, 6);
    EXPECT_EQ(norm(SpaceSpec::power(SpaceSpec::lq(3.0), 0.5), f), norm(SpaceSpec::lq(1.5), f));
  }
}

TEST(SeqspaceProperty, AlignedProjectionNeverIncreasesCost) {
  Rng rng(15, "seqspace-aligned");
  const SpaceSpec x = SpaceSpec::lq(1.0), y = SpaceSpec::lq(2.0);
  for (int k = 0; k < 300; ++k) {
    const FiniteVector f = random_vector(rng, 5);
    std::vector<Entry> g;
    for (Index i = 1; i <= 6; ++i)
      if (rng.coin()) g.push_back({i, rng.uniform(-5.0, 5.0)});
    const FiniteVector g1 = FiniteVector::from_entries(g), g2 = f - g1;
    const auto [h1, h2] = aligned_projection(f, g1);
    EXPECT_EQ(h1 + h2, f);
    EXPECT_LE(norm(x, h1) + norm(y, h2), norm(x, g1) + norm(y, g2) + 1e-12);
  }
}

TEST(SeqspaceProperty, SumSolverAgreesWithGridOracle) {
  Rng rng(16, "seqspace-grid");
  for (int k = 0; k < 12; ++k) {
    const FiniteVector f = random_vector(rng, 3);
    const SpaceSpec x = SpaceSpec::lq(k % 2 ? 1.0 : 0.5), y = SpaceSpec::lq(k % 3 ? 3.0 : kInf);
    const double v = norm(SpaceSpec::sum(x, y), f);
    const double g = oracle::sum_norm_bruteforce(x, y, f, 64);
    EXPECT_GE(g, v - 1e-8 * std::max(1.0, v));
    EXPECT_LE(g, v + oracle::grid_modulus(x, y, f, 64) + 1e-8);
  }
}
