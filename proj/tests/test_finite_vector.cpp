#include <gtest/gtest.h>

#include "optdom/finite_vector.hpp"
#include "optdom/numeric.hpp"

using namespace optdom;

TEST(FiniteVector, CanonicalFormDropsZerosAndSorts) {
  const FiniteVector v = FiniteVector::from_entries({{5, 2.0}, {1, 0.0}, {3, -1.0}});
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v.entries()[0].index, 3u);
  EXPECT_EQ(v.entries()[1].index, 5u);
  EXPECT_EQ(v[1], 0.0);
  EXPECT_EQ(v[5], 2.0);
  EXPECT_EQ(v.max_index(), 5u);
}

TEST(FiniteVector, RejectsBadEntries) {
  EXPECT_THROW(FiniteVector::from_entries({{0, 1.0}}), InvalidArgument);
  EXPECT_THROW(FiniteVector::from_entries({{2, 1.0}, {2, 3.0}}), InvalidArgument);
  EXPECT_THROW(FiniteVector::from_entries({{1, kInf}}), InvalidArgument);
}

TEST(FiniteVector, ArithmeticCancelsToCanonicalZero) {
  const FiniteVector a = FiniteVector::from_dense({1.0, 2.0, 3.0});
  const FiniteVector b = FiniteVector::from_dense({1.0, 0.0, 3.0});
  const FiniteVector d = a - b;
  EXPECT_EQ(d, FiniteVector::unit(2, 2.0));
  EXPECT_TRUE((a - a).empty());
  EXPECT_EQ(a + b, FiniteVector::from_dense({2.0, 2.0, 6.0}));
}

TEST(FiniteVector, RestrictTruncateAndPowers) {
  const FiniteVector a = FiniteVector::from_dense({-4.0, 0.0, 9.0, 1.0});
  EXPECT_EQ(a.restricted(make_index_set({1, 4})), FiniteVector::from_entries({{1, -4.0}, {4, 1.0}}));
  EXPECT_EQ(a.truncated(2), FiniteVector::unit(1, -4.0));
  EXPECT_EQ(a.pow_abs(0.5), FiniteVector::from_dense({2.0, 0.0, 3.0, 1.0}));
  EXPECT_EQ(a.abs(), FiniteVector::from_dense({4.0, 0.0, 9.0, 1.0}));
  EXPECT_EQ(a.support(), make_index_set({1, 3, 4}));
  EXPECT_EQ(a.dense(5), (std::vector<double>{-4.0, 0.0, 9.0, 1.0, 0.0}));
}

TEST(FiniteVector, IndicatorAndFirstIndices) {
  EXPECT_EQ(FiniteVector::indicator(first_indices(3)), FiniteVector::from_dense({1.0, 1.0, 1.0}));
}

TEST(FiniteVectorProperty, AdditionIsCommutativeAndSubtractionInverts) {
  Rng rng(1, "fv-property");
  for (int k = 0; k < 500; ++k) {
    std::vector<Entry> x, y;
    for (Index i = 1; i <= 8; ++i) {
      if (rng.coin()) x.push_back({i, rng.uniform(-3.0, 3.0)});
      if (rng.coin()) y.push_back({i, rng.uniform(-3.0, 3.0)});
    }
    const FiniteVector a = FiniteVector::from_entries(x), b = FiniteVector::from_entries(y);
    EXPECT_EQ(a + b, b + a);
    const FiniteVector back = (a + b) - b;
    for (Index i = 1; i <= 8; ++i) EXPECT_NEAR(back[i], a[i], 1e-12);
  }
}

TEST(Rng, DerivedStreamsAreReproducibleAndDistinct) {
  Rng a(7, "task", 0), b(7, "task", 0), c(7, "task", 1);
  const auto x = a.bits(), y = b.bits(), z = c.bits();
  EXPECT_EQ(x, y);
  EXPECT_NE(x, z);
  EXPECT_NE(derive_seed(7, "a"), derive_seed(7, "b"));
  for (int k = 0; k < 1000; ++k) {
    const double u = a.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Numeric, ConjugateExponentAndCompensatedSum) {
  EXPECT_DOUBLE_EQ(conjugate_exponent(2.0), 2.0);
  EXPECT_DOUBLE_EQ(conjugate_exponent(3.0), 1.5);
  EXPECT_EQ(conjugate_exponent(1.0), kInf);
  CompensatedSum s;
  s += 1.0;
  for (int k = 0; k < 10; ++k) s += 1e-16;
  s += -1.0;
  EXPECT_NEAR(s.value(), 1e-15, 1e-30);
}
