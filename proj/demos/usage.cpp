// Library walk-through: sequence-space norms, an L1(m) norm, and a
// factorability verdict for a diagonal matrix.
#include <iostream>

#include "optdom/optdom.hpp"

int main() {
  using namespace optdom;

  const FiniteVector f = FiniteVector::from_dense({3.0, 4.0});
  std::cout << "||(3,4)|| in Lq(2): " << norm(SpaceSpec::lq(2.0), f) << "\n";
  std::cout << "||(2,1)|| in Lq(1) + Lq(inf): "
            << norm(SpaceSpec::sum(SpaceSpec::lq(1.0), SpaceSpec::lq(kInf)), FiniteVector::from_dense({2.0, 1.0}))
            << "\n";

  const MatrixOperator signed_block = MatrixOperator::dense(2, 2, {1.0, 1.0, 1.0, -1.0});
  const AtomicVectorMeasure mu(signed_block, SpaceSpec::lq(1.0), 2);
  const NormEstimate n = l1m_norm(mu, FiniteVector::from_dense({1.0, 1.0}));
  std::cout << "L1(m) norm of (1,1) for columns (1,1), (1,-1): " << *n.value << " [" << n.method << "]\n";

  const MatrixOperator diag = MatrixOperator::diagonal(DiagonalSequence::geometric(0.5));
  FactorOptions opt;
  opt.ascent.seed = 7;
  const FactorabilityReport rep = factorability_verdict(diag, SpaceSpec::lq(1.0), 2.0, {2, 4, 8, 16}, 64, opt);
  for (const ConstantPoint& c : rep.constants) std::cout << "C_2(" << c.n << ") >= " << c.estimate.value << "\n";
  std::cout << "column series: " << to_string(rep.condition_I.verdict) << ", verdict " << to_string(rep.verdict)
            << "\n";
  return 0;
}
