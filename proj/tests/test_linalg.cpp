#include <gtest/gtest.h>

#include "ecpm/linalg.hpp"
#include "ecpm/random.hpp"

using namespace ecpm;

namespace {

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}
ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace

TEST(Tensor, IdentityTimesIdentity) {
  EXPECT_TRUE(tensor(identity(2), identity(2)).isApprox(identity(4)));
}

TEST(Tensor, DiagonalFactors) {
  ComplexMatrix a = ComplexVector::LinSpaced(2, 1, 2).asDiagonal();
  ComplexMatrix b = ComplexVector::LinSpaced(2, 3, 4).asDiagonal();
  ComplexVector expect(4);
  expect << 3, 4, 6, 8;
  EXPECT_TRUE(tensor(a, b).isApprox(ComplexMatrix(expect.asDiagonal())));
}

TEST(Tensor, BlockStructureFollowsFirstFactor) {
  const ComplexMatrix t = tensor(projector(basis_vector(2, 0)), pauli_x());
  EXPECT_TRUE(t.topLeftCorner(2, 2).isApprox(pauli_x()));
  EXPECT_EQ(t.bottomRightCorner(2, 2).norm(), 0.0);
  EXPECT_EQ(t.topRightCorner(2, 2).norm(), 0.0);
}

TEST(Tensor, Associative) {
  auto rng = make_rng(1);
  for (int k = 0; k < 10; ++k) {
    // Integer-valued entries keep every product exact.
    auto ints = [&](Index r, Index c) -> ComplexMatrix {
      ComplexMatrix g = ginibre(r, c, rng);
      return g.unaryExpr([](cplx v) { return cplx(std::round(4 * v.real()), std::round(4 * v.imag())); });
    };
    const ComplexMatrix a = ints(2, 3), b = ints(3, 2), c = ints(2, 2);
    EXPECT_EQ((tensor(tensor(a, b), c) - tensor(a, tensor(b, c))).norm(), 0.0);
  }
}

TEST(PartialTrace, ProductState) {
  auto rng = make_rng(2);
  const ComplexMatrix rho = random_density(2, rng);
  const ComplexMatrix sigma = random_density(3, rng) * 0.7;
  const ComplexMatrix out = partial_trace(tensor(rho, sigma), {2, 3}, {0});
  EXPECT_LT((out - 0.7 * rho).norm(), 1e-14);
  const ComplexMatrix out2 = partial_trace(tensor(rho, sigma), {2, 3}, {1});
  EXPECT_LT((out2 - sigma).norm(), 1e-14);
}

TEST(PartialTrace, MaximallyEntangledMarginal) {
  ComplexVector phi = ComplexVector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  EXPECT_LT((partial_trace(projector(phi), {2, 2}, {1}) - identity(2) / 2.0).norm(), 1e-15);
}

TEST(PartialTrace, FamilyStateMarginalMatchesClosedForm) {
  const double w = 0.3, p = 0.4;
  ComplexVector psi = ComplexVector::Zero(4);
  psi(0) = std::sqrt(1 - w);
  psi(2) = std::sqrt(w * p);
  psi(3) = std::sqrt(w * (1 - p));
  ComplexMatrix expect(2, 2);
  expect << 1 - w + w * p, w * std::sqrt(p * (1 - p)), w * std::sqrt(p * (1 - p)), w * (1 - p);
  EXPECT_LT((partial_trace(projector(psi), {2, 2}, {1}) - expect).norm(), 1e-15);
}

TEST(PartialTrace, ShapeMismatchThrows) {
  EXPECT_THROW(partial_trace(identity(4), {2, 3}, {0}), DimensionError);
  EXPECT_THROW(partial_trace(identity(4), {2, 2}, {2}), DimensionError);
}

TEST(PartialTrace, PreservesTrace) {
  auto rng = make_rng(3);
  const std::vector<SubsystemShape> shapes = {{2, 2}, {2, 4}, {4, 2, 2}, {2, 2, 2, 2}, {3, 5}};
  for (const auto& s : shapes) {
    const ComplexMatrix m = ginibre(s.total(), s.total(), rng);
    for (std::size_t k = 0; k < s.size(); ++k) {
      EXPECT_NEAR(std::abs(partial_trace(m, s, {k}).trace() - m.trace()), 0.0, 1e-12);
    }
    EXPECT_NEAR(std::abs(partial_trace(m, s, {}).trace() - m.trace()), 0.0, 1e-12);
  }
}

TEST(PartialTrace, KeepsFactorOrder) {
  auto rng = make_rng(4);
  const ComplexMatrix a = random_density(2, rng), b = random_density(3, rng), c = random_density(2, rng);
  const ComplexMatrix abc = tensor({a, b, c});
  EXPECT_LT((partial_trace(abc, {2, 3, 2}, {0, 2}) - tensor(a, c)).norm(), 1e-14);
  EXPECT_LT((partial_trace(abc, {2, 3, 2}, {1}) - b).norm(), 1e-14);
}

TEST(EigHermitian, Identity) {
  const auto e = eig_hermitian(identity(2));
  EXPECT_DOUBLE_EQ(e.values(0), 1.0);
  EXPECT_DOUBLE_EQ(e.values(1), 1.0);
}

TEST(EigHermitian, PauliZ) {
  const auto e = eig_hermitian(pauli_z());
  EXPECT_DOUBLE_EQ(e.values(0), 1.0);
  EXPECT_DOUBLE_EQ(e.values(1), -1.0);
  EXPECT_NEAR(std::abs(e.vectors(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(e.vectors(1, 1)), 1.0, 1e-15);
}

TEST(EigHermitian, FamilyMixedStateHasTwoTerms) {
  const double w = 0.3, p = 0.4;
  const double q = 2 * p * w - w + 1;
  const double a = (2 * p * w - 2 * w + 1) / q, b = w * (1 - p) / q;
  ComplexVector phi = ComplexVector::Zero(4);
  phi(0) = -std::sqrt(a);
  phi(2) = std::sqrt(b);
  phi(3) = std::sqrt(1 - a - b);
  const ComplexMatrix rho = q * projector(phi) + (1 - q) * projector(basis_vector(4, 1));
  const auto e = eig_hermitian(rho);
  EXPECT_NEAR(q, 0.94, 1e-15);
  EXPECT_NEAR(e.values(0), 0.94, 1e-12);
  EXPECT_NEAR(e.values(1), 0.06, 1e-12);
  EXPECT_NEAR(e.values(2), 0.0, 1e-12);
  EXPECT_NEAR(e.values(3), 0.0, 1e-12);
}

TEST(EigHermitian, RejectsNonHermitian) {
  ComplexMatrix m(2, 2);
  m << 0, 1, 0, 0;
  EXPECT_THROW(eig_hermitian(m), ContractViolation);
}

TEST(EigHermitian, ReconstructionAndOrdering) {
  auto rng = make_rng(5);
  for (Index d = 1; d <= 16; ++d) {
    const ComplexMatrix m = random_hermitian(d, rng);
    const auto e = eig_hermitian(m);
    const ComplexMatrix rec = e.vectors * e.values.cast<cplx>().asDiagonal() * e.vectors.adjoint();
    EXPECT_LE((m - rec).norm(), 1e-10 * m.norm());
    EXPECT_LE((e.vectors.adjoint() * e.vectors - identity(d)).norm(), 1e-10);
    for (Index k = 1; k < d; ++k) EXPECT_GE(e.values(k - 1), e.values(k));
  }
}

TEST(TraceNorm, DensityMatrixIsOne) {
  auto rng = make_rng(6);
  EXPECT_NEAR(trace_norm(random_density(5, rng)), 1.0, 1e-12);
}

TEST(TraceNorm, PauliZIsTwo) { EXPECT_NEAR(trace_norm(pauli_z()), 2.0, 1e-15); }

TEST(TraceNorm, UnitaryInvariance) {
  auto rng = make_rng(7);
  for (int k = 0; k < 20; ++k) {
    const ComplexMatrix m = random_hermitian(6, rng);
    const ComplexMatrix u = haar_unitary(6, rng);
    EXPECT_NEAR(trace_norm(m), trace_norm(hermitian_part(u * m * u.adjoint())), 1e-10);
  }
}

TEST(TraceNorm, FamilyPairExceedsSeparableBoundAtQuarter) {
  // Oracle: Helstrom value of the closed-form pair, maximized over a fine p grid.
  const double w = 0.25;
  double best = 0.0;
  for (int k = 0; k <= 500; ++k) {
    const double p = 0.5 * k / 500.0;
    const double q = 2 * p * w - w + 1;
    const double a = (2 * p * w - 2 * w + 1) / q, b = w * (1 - p) / q;
    ComplexVector psi = ComplexVector::Zero(4), phi = ComplexVector::Zero(4);
    psi << std::sqrt(1 - w), 0, std::sqrt(w * p), std::sqrt(w * (1 - p));
    phi << -std::sqrt(a), 0, std::sqrt(b), std::sqrt(std::max(0.0, 1 - a - b));
    const ComplexMatrix rho1 = q * projector(phi) + (1 - q) * projector(basis_vector(4, 1));
    best = std::max(best, trace_norm(projector(psi) - rho1));
  }
  EXPECT_GT(best, 4 * std::sqrt(w * (1 - w)));
}

TEST(RealEmbedding, Identity) { EXPECT_TRUE(real_embedding(identity(2)).isApprox(RealMatrix::Identity(4, 4))); }

TEST(RealEmbedding, PauliYSpectrum) {
  const RealMatrix e = real_embedding(pauli_y());
  EXPECT_LT((e - e.transpose()).norm(), 1e-15);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(e);
  const RealVector v = es.eigenvalues();
  EXPECT_NEAR(v(0), -1, 1e-14);
  EXPECT_NEAR(v(1), -1, 1e-14);
  EXPECT_NEAR(v(2), 1, 1e-14);
  EXPECT_NEAR(v(3), 1, 1e-14);
}

TEST(RealEmbedding, PsdEquivalenceAndDoubledSpectrum) {
  auto rng = make_rng(8);
  for (int k = 0; k < 100; ++k) {
    const Index d = 2 + k % 4;
    ComplexMatrix h = random_hermitian(d, rng);
    if (k % 2 == 0) h = h * h;  // half the samples PSD
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(real_embedding(h));
    const RealVector re = es.eigenvalues();
    const RealVector ce = eigenvalues_hermitian(h);
    EXPECT_EQ(is_psd(h), re.minCoeff() >= -1e-9);
    std::vector<double> doubled;
    for (Index i = 0; i < ce.size(); ++i) {
      doubled.push_back(ce(i));
      doubled.push_back(ce(i));
    }
    std::sort(doubled.begin(), doubled.end());
    for (Index i = 0; i < re.size(); ++i) EXPECT_NEAR(re(i), doubled[static_cast<std::size_t>(i)], 1e-10);
  }
}

TEST(Unfold, RoundTrip) {
  auto rng = make_rng(9);
  const ComplexVector v = random_pure_state(6, rng);
  EXPECT_EQ((fold(unfold(v, 2, 3)) - v).norm(), 0.0);
  EXPECT_EQ(unfold(v, 2, 3)(1, 2), v(5));
}

TEST(HermitianBasis, Orthonormal) {
  const auto basis = hermitian_basis(3);
  ASSERT_EQ(basis.size(), 9u);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    EXPECT_TRUE(is_hermitian(basis[i]));
    for (std::size_t j = 0; j < basis.size(); ++j) {
      EXPECT_NEAR(hs_inner(basis[i], basis[j]), i == j ? 1.0 : 0.0, 1e-15);
    }
  }
}
