#include <cmath>

#include <gtest/gtest.h>

#include "optdom/oracle.hpp"
#include "optdom/vmeasure.hpp"

using namespace optdom;

namespace {

MatrixOperator signed_pair() { return MatrixOperator::dense(2, 2, {1.0, 1.0, 1.0, -1.0}); }

MatrixOperator random_block(Rng& rng, Index rows, Index cols) {
  std::vector<double> a(rows * cols);
  for (double& v : a) v = rng.uniform(-1.0, 1.0);
  return MatrixOperator::dense(rows, cols, std::move(a));
}

}  // namespace

TEST(Integrate, Examples) {
  const AtomicVectorMeasure d(MatrixOperator::diagonal(DiagonalSequence::explicit_values({1.0, 2.0})), SpaceSpec::lq(1.0), 4);
  EXPECT_EQ(integrate(d, FiniteVector::from_dense({5.0, 7.0}), make_index_set({2})), FiniteVector::unit(2, 14.0));
  EXPECT_TRUE(integrate(d, FiniteVector::from_dense({5.0, 7.0}), IndexSet{}).empty());
  const AtomicVectorMeasure id(MatrixOperator::identity(), SpaceSpec::lq(1.0), 4);
  EXPECT_EQ(integrate(id, FiniteVector::from_dense({1.0, 1.0, 1.0}), make_index_set({1, 3})),
            FiniteVector::from_entries({{1, 1.0}, {3, 1.0}}));
  EXPECT_EQ(id.measure(make_index_set({1, 2})), FiniteVector::from_dense({1.0, 1.0}));
}

TEST(L1m, Examples) {
  const AtomicVectorMeasure m(signed_pair(), SpaceSpec::lq(1.0), 2);
  const NormEstimate n = l1m_norm(m, FiniteVector::from_dense({1.0, 1.0}));
  ASSERT_TRUE(n.exact());
  EXPECT_DOUBLE_EQ(*n.value, 2.0);
  EXPECT_EQ(n.method, method::exact_sign_enumeration);
  EXPECT_EQ(*l1m_norm(m, FiniteVector{}).value, 0.0);
  EXPECT_DOUBLE_EQ(*semivariation(m, make_index_set({1, 2})).value, 2.0);
  EXPECT_EQ(*semivariation(m, IndexSet{}).value, 0.0);

  const AtomicVectorMeasure id(MatrixOperator::identity(), SpaceSpec::lq(1.0), 8);
  EXPECT_DOUBLE_EQ(*semivariation(id, first_indices(5)).value, 5.0);
}

TEST(L1m, Errors) {
  const AtomicVectorMeasure quasi(MatrixOperator::identity(), SpaceSpec::lq(0.5), 4);
  EXPECT_THROW(l1m_norm(quasi, FiniteVector::unit(1)), InvalidSpace);
  const AtomicVectorMeasure m(signed_pair(), SpaceSpec::lq(1.0), 2);
  EXPECT_THROW(l1m_norm(m, FiniteVector::unit(1, 1e-301)), InvalidArgument);
  MeasureOptions big;
  big.n_enum = 25;
  EXPECT_THROW(l1m_norm(m, FiniteVector::unit(1), big), InvalidArgument);
  const AtomicVectorMeasure z(MatrixOperator::diagonal(DiagonalSequence::explicit_values({1.0, 0.0})), SpaceSpec::lq(1.0), 4);
  EXPECT_THROW(l1m_norm(z, FiniteVector::from_dense({1.0, 1.0})), ContractError);
}

TEST(Lpm, Examples) {
  const AtomicVectorMeasure id(MatrixOperator::identity(), SpaceSpec::lq(1.0), 8);
  const FiniteVector f = FiniteVector::from_dense({1.0, -2.0, 3.0});
  EXPECT_EQ(*lpm_norm(id, f, 1.0).value, *l1m_norm(id, f).value);
  for (double p : {0.5, 2.0, 3.0}) EXPECT_NEAR(*lpm_norm(id, f, p).value, norm(SpaceSpec::lq(p), f), 1e-12);

  const AtomicVectorMeasure d(MatrixOperator::diagonal(DiagonalSequence::explicit_values({2.0, 3.0}), true), SpaceSpec::lq(1.0), 4);
  const FiniteVector g = FiniteVector::from_dense({4.0, 9.0});
  EXPECT_NEAR(*lpm_norm(d, g, 0.5).value, std::pow(2.0 * 2.0 + 3.0 * 3.0, 2.0), 1e-9);
  EXPECT_THROW(lpm_norm(d, g, 0.0), InvalidArgument);
}

TEST(OptimalDomain, Examples) {
  const AtomicVectorMeasure id(MatrixOperator::identity(), SpaceSpec::lq(1.0), 8);
  const OptimalDomainNorms a = optimal_domain_norms(id, FiniteVector::from_dense({1.0, 1.0}), 2.0);
  EXPECT_DOUBLE_EQ(*a.l1.value, 2.0);
  EXPECT_DOUBLE_EQ(*a.l_inv_p.value, 4.0);
  EXPECT_DOUBLE_EQ(*a.intersection.value, 4.0);

  const AtomicVectorMeasure h(MatrixOperator::hilbert(), SpaceSpec::lq(2.0), 16);
  const OptimalDomainNorms b = optimal_domain_norms(h, FiniteVector::unit(1), 3.0);
  const double c1 = norm(SpaceSpec::lq(2.0), h.atom(1));
  EXPECT_NEAR(b.l1.lower, c1, 1e-12);
  EXPECT_NEAR(b.l_inv_p.lower, std::pow(c1, 3.0), 1e-12);
  EXPECT_NEAR(b.intersection.lower, std::pow(c1, 3.0), 1e-12);
  const OptimalDomainNorms z = optimal_domain_norms(id, FiniteVector{}, 2.0);
  EXPECT_EQ(*z.intersection.value, 0.0);
}

TEST(L1m, DeclaredTailWidensTheBracket) {
  const AtomicVectorMeasure h(MatrixOperator::hilbert(), SpaceSpec::lq(2.0), 32);
  const NormEstimate e = l1m_norm(h, FiniteVector::from_dense({1.0, 1.0}));
  EXPECT_FALSE(e.exact());
  EXPECT_LT(e.lower, e.upper);
  EXPECT_LT(e.upper, kInf);
  MeasureOptions no_tail;
  no_tail.use_tail = false;
  EXPECT_TRUE(l1m_norm(h, FiniteVector::from_dense({1.0, 1.0}), no_tail).exact());
}

TEST(VmeasureProperty, EstimationBracketsTheExactValue) {
  Rng rng(31, "vmeasure-estimate");
  MeasureOptions est;
  est.n_enum = 0;
  for (int k = 0; k < 60; ++k) {
    const Index n = 2 + rng.below(10), rows = 1 + rng.below(8);
    const AtomicVectorMeasure m(random_block(rng, rows, n), SpaceSpec::lq(k % 2 ? 2.0 : 1.0), rows);
    std::vector<double> f(n);
    for (double& v : f) v = rng.uniform(0.1, 2.0) * (rng.coin() ? 1.0 : -1.0);
    const FiniteVector x = FiniteVector::from_dense(std::span<const double>(f));
    const double exact = *l1m_norm(m, x).value;
    const NormEstimate e = l1m_norm(m, x, est);
    EXPECT_LE(e.lower, exact * (1.0 + 1e-12));
    EXPECT_GE(e.upper, exact * (1.0 - 1e-12));
    if (e.method == std::string(method::subset_sup_sandwich)) EXPECT_LE(e.upper, 2.0 * e.lower * (1.0 + 1e-12));
  }
}

TEST(VmeasureProperty, LatticeMonotonicity) {
  Rng rng(32, "vmeasure-lattice");
  for (int k = 0; k < 80; ++k) {
    const Index n = 1 + rng.below(8), rows = 1 + rng.below(8);
    const AtomicVectorMeasure m(random_block(rng, rows, n), SpaceSpec::lq(kInf), rows);
    std::vector<double> f(n), g(n);
    for (Index j = 0; j < n; ++j) {
      f[j] = rng.uniform(0.1, 2.0) * (rng.coin() ? 1.0 : -1.0);
      g[j] = (std::abs(f[j]) + rng.uniform(0.0, 1.0)) * (rng.coin() ? 1.0 : -1.0);
    }
    const double nf = *l1m_norm(m, FiniteVector::from_dense(std::span<const double>(f))).value;
    const double ng = *l1m_norm(m, FiniteVector::from_dense(std::span<const double>(g))).value;
    EXPECT_LE(nf, ng * (1.0 + 1e-12));
  }
}

TEST(VmeasureProperty, FiniteAdditivity) {
  Rng rng(33, "vmeasure-additive");
  const AtomicVectorMeasure m(MatrixOperator::hilbert(), SpaceSpec::lq(2.0), 20);
  for (int k = 0; k < 50; ++k) {
    IndexSet a, b;
    for (Index j = 1; j <= 10; ++j) (rng.coin() ? a : b).push_back(j);
    const FiniteVector lhs = m.measure(first_indices(10));
    const FiniteVector rhs = m.measure(a) + m.measure(b);
    for (Index i = 1; i <= 20; ++i) EXPECT_NEAR(lhs[i], rhs[i], 1e-14);
  }
}

TEST(VmeasureProperty, EnumerationIsThreadCountIndependent) {
  Rng rng(34, "vmeasure-threads");
  const AtomicVectorMeasure m(random_block(rng, 6, 18), SpaceSpec::lq(2.0), 6);
  std::vector<double> f(18);
  for (double& v : f) v = rng.uniform(-1.0, 1.0);
  const FiniteVector x = FiniteVector::from_dense(std::span<const double>(f));
  const NormEstimate a = l1m_norm(m, x), b = l1m_norm(m, x);
  EXPECT_EQ(*a.value, *b.value);
  EXPECT_GE(*a.value, oracle::l1m_norm_dual_sample(m, x, 500, 1) * (1.0 - 1e-12));
}
