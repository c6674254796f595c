#include <gtest/gtest.h>

#include "ecpm/quantum.hpp"
#include "ecpm/random.hpp"

using namespace ecpm;

namespace {

ComplexMatrix expm_hermitian(const ComplexMatrix& h, double t) {
  const auto e = eig_hermitian(h);
  ComplexVector ph(e.values.size());
  for (Index k = 0; k < ph.size(); ++k) ph(k) = std::exp(cplx(0.0, t * e.values(k)));
  return e.vectors * ph.asDiagonal() * e.vectors.adjoint();
}

/// State close to |g>|m> with a random admixture of weight eps.
ComplexVector near_ground(const ComplexVector& g, Index d_m, double eps, Rng& rng) {
  const ComplexVector base = tensor(g, random_pure_state(d_m, rng));
  ComplexVector v = std::sqrt(1 - eps) * base + std::sqrt(eps) * random_pure_state(g.size() * d_m, rng);
  return v / v.norm();
}

}  // namespace

TEST(DensityMatrix, ValidatesInvariants) {
  EXPECT_NO_THROW((void)DensityMatrix(identity(2) / 2.0));
  EXPECT_THROW((void)DensityMatrix(identity(2)), ContractViolation);
  ComplexMatrix neg(2, 2);
  neg << 1.5, 0, 0, -0.5;
  EXPECT_THROW((void)DensityMatrix(neg), ContractViolation);
  EXPECT_THROW((void)DensityMatrix(identity(4) / 4.0, {2, 3}), DimensionError);
}

TEST(MaximallyEntangled, QubitEntries) {
  const auto phi = maximally_entangled(2);
  ComplexMatrix expect = ComplexMatrix::Zero(4, 4);
  expect(0, 0) = expect(0, 3) = expect(3, 0) = expect(3, 3) = 0.5;
  EXPECT_LT((phi.mat - expect).norm(), 1e-15);
}

TEST(MaximallyEntangled, Marginals) {
  for (Index d : {2, 3, 4}) {
    const auto phi = maximally_entangled(d);
    EXPECT_LT((partial_trace(phi.mat, phi.shape, {0}) - identity(d) / double(d)).norm(), 1e-14);
    EXPECT_LT((partial_trace(phi.mat, phi.shape, {1}) - identity(d) / double(d)).norm(), 1e-14);
  }
}

TEST(MaximallyEntangled, RejectsTrivialDimension) { EXPECT_THROW(maximally_entangled(1), DomainError); }

TEST(Apply, IdentityChannel) {
  auto rng = make_rng(11);
  const DensityMatrix rho(random_density(4, rng), {2, 2});
  const auto out = apply(Channel::identity_channel(2), rho, 0);
  EXPECT_LT((out.mat - rho.mat).norm(), 1e-14);
}

TEST(Apply, CompletelyDepolarizing) {
  auto rng = make_rng(12);
  const DensityMatrix rho(random_density(6, rng), {3, 2});
  const auto out = apply(Channel::completely_depolarizing(3), rho, 0);
  const ComplexMatrix expect = tensor(identity(3) / 3.0, partial_trace(rho.mat, rho.shape, {1}));
  EXPECT_LT((out.mat - expect).norm(), 1e-14);
}

TEST(Apply, DimensionMismatch) {
  const DensityMatrix rho(identity(4) / 4.0, {2, 2});
  EXPECT_THROW(apply(Channel::identity_channel(3), rho, 0), DimensionError);
}

TEST(Apply, OutputStaysAState) {
  auto rng = make_rng(13);
  for (int k = 0; k < 50; ++k) {
    const Channel ch(random_kraus(2, 3, 1 + k % 4, rng));
    const DensityMatrix rho(random_density(4, rng), {2, 2});
    const auto out = apply(ch, rho, 0);
    EXPECT_EQ(out.shape, (SubsystemShape{3, 2}));
    EXPECT_NEAR(out.mat.trace().real(), 1.0, 1e-10);
    EXPECT_GE(min_eigenvalue(out.mat), -1e-9);
  }
}

TEST(Apply, ChoiActionMatchesKrausAction) {
  auto rng = make_rng(14);
  for (int k = 0; k < 20; ++k) {
    const Channel ch(random_kraus(2, 3, 2, rng));
    const ComplexMatrix sigma = random_density(4, rng);
    const ComplexMatrix by_kraus = apply_on(ch, sigma, {2, 2}, 0);
    EXPECT_LT((apply_choi(ch.choi(), sigma, 3, 2, 2) - by_kraus).norm(), 1e-12);
  }
}

TEST(Apply, ChoiFunctionalsReproduceObjective) {
  auto rng = make_rng(15);
  for (int k = 0; k < 20; ++k) {
    const Channel ch(random_kraus(2, 2, 3, rng));
    const ComplexMatrix sigma = random_density(6, rng);
    const ComplexMatrix w = random_hermitian(6, rng);
    const double direct = hs_inner(w, apply_choi(ch.choi(), sigma, 2, 2, 3));
    EXPECT_NEAR(hs_inner(choi_functional_wrt_state(ch.choi(), w, 2, 2, 3), sigma), direct, 1e-12);
    EXPECT_NEAR(hs_inner(choi_functional_wrt_choi(sigma, w, 2, 2, 3), ch.choi()), direct, 1e-12);
  }
}

TEST(Choi, IdentityChannel) {
  const ComplexMatrix j = choi_from_kraus({identity(2)});
  EXPECT_LT((j - maximally_entangled(2).mat).norm(), 1e-15);
  const auto k = kraus_from_choi(j, 2, 2);
  ASSERT_EQ(k.size(), 1u);
  EXPECT_LT((k[0] - identity(2)).norm(), 1e-12);
}

TEST(Choi, RandomRoundTrip) {
  auto rng = make_rng(16);
  for (int t = 0; t < 30; ++t) {
    const auto kraus = random_kraus(2, 2, 2, rng);
    const ComplexMatrix j = choi_from_kraus(kraus);
    const auto back = kraus_from_choi(j, 2, 2);
    EXPECT_EQ(back.size(), 2u);
    EXPECT_LT((choi_from_kraus(back) - j).norm(), 1e-9);
  }
}

TEST(Choi, RejectsNonPsdAndNonTp) {
  ComplexMatrix bad = maximally_entangled(2).mat;
  bad(1, 1) = -0.1;
  bad(2, 2) = 0.1;
  EXPECT_THROW(kraus_from_choi(bad, 2, 2), ContractViolation);
  EXPECT_THROW(kraus_from_choi(2.0 * maximally_entangled(2).mat, 2, 2), ContractViolation);
}

TEST(Channel, ConsistentViews) {
  auto rng = make_rng(17);
  for (int t = 0; t < 20; ++t) {
    const Channel ch(random_kraus(3, 2, 3, rng));
    ComplexMatrix sum = ComplexMatrix::Zero(3, 3);
    for (const auto& k : ch.kraus()) sum += k.adjoint() * k;
    EXPECT_LT((sum - identity(3)).norm(), 1e-9);
    EXPECT_GE(min_eigenvalue(ch.choi()), -1e-12);
    const ComplexMatrix rho = random_density(3, rng);
    const ComplexMatrix y = random_hermitian(2, rng);
    EXPECT_NEAR(hs_inner(y, ch(rho)), hs_inner(ch.adjoint(y), rho), 1e-12);
  }
}

TEST(Channel, RejectsNonTracePreserving) {
  EXPECT_THROW((void)Channel({2.0 * identity(2)}), ContractViolation);
}

TEST(Helstrom, IdenticalStates) {
  auto rng = make_rng(18);
  const DensityMatrix rho(random_density(3, rng));
  EXPECT_NEAR(helstrom(rho, rho).value, 0.0, 1e-14);
}

TEST(Helstrom, OrthogonalPureStates) {
  const auto r = helstrom(DensityMatrix(projector(basis_vector(2, 0))), DensityMatrix(projector(basis_vector(2, 1))));
  EXPECT_NEAR(r.value, 2.0, 1e-14);
}

TEST(Helstrom, ValueMatchesTraceNormAndPovm) {
  auto rng = make_rng(19);
  for (int t = 0; t < 30; ++t) {
    const DensityMatrix a(random_density(4, rng), {2, 2}), b(random_density(4, rng), {2, 2});
    const auto r = helstrom(a, b);
    EXPECT_NEAR(r.value, trace_norm(a.mat - b.mat), 1e-12);
    EXPECT_NEAR(hs_inner(r.povm[0] - r.povm[1], a.mat - b.mat), r.value, 1e-10);
    EXPECT_NEAR(helstrom(b, a).value, r.value, 1e-10);
    const ComplexMatrix u = haar_unitary(4, rng);
    const DensityMatrix ua(hermitian_part(u * a.mat * u.adjoint()), {2, 2});
    const DensityMatrix ub(hermitian_part(u * b.mat * u.adjoint()), {2, 2});
    EXPECT_NEAR(helstrom(ua, ub).value, r.value, 1e-10);
  }
}

TEST(Helstrom, ShapeMismatch) {
  EXPECT_THROW(helstrom(DensityMatrix(identity(4) / 4.0, {2, 2}), DensityMatrix(identity(4) / 4.0, {4})),
               DimensionError);
}

TEST(EnergyConstraint, Validation) {
  EXPECT_NO_THROW(EnergyConstraint::computational(2, 0.3));
  EXPECT_THROW(EnergyConstraint::computational(2, 0.5), DomainError);
  EXPECT_THROW(EnergyConstraint(2.0 * basis_vector(2, 0), 0.1), ContractViolation);
}

// Overlap bound: a local unitary cannot separate two states that both stay close to |g>.
TEST(Properties, OverlapBoundSampling) {
  auto rng = make_rng(20);
  int meaningful = 0;
  for (int t = 0; t < 1000; ++t) {
    const Index d = 2 + t % 3;
    const ComplexVector g = random_pure_state(d, rng);
    const ComplexVector psi1 = near_ground(g, d, uniform(rng, 0.0, 0.6), rng);
    const ComplexMatrix u = expm_hermitian(random_hermitian(d, rng), uniform(rng, 0.0, 1.5));
    const ComplexVector psi2 = tensor(u, identity(d)) * psi1;
    const ComplexMatrix gproj = tensor(projector(g), identity(d));
    const double p1 = (psi1.adjoint() * gproj * psi1)(0, 0).real();
    const double p2 = (psi2.adjoint() * gproj * psi2)(0, 0).real();
    const double p = std::min(p1, p2);
    if (2 * p - 1 > 0) ++meaningful;
    EXPECT_GE(std::abs(psi1.dot(psi2)), 2 * p - 1 - 1e-9);
  }
  EXPECT_GT(meaningful, 300);
}

// Unitary encodings on a shared entangled state never beat the separable bound.
TEST(Properties, UnitaryStrategiesRespectSeparableBound) {
  auto rng = make_rng(21);
  int checked = 0;
  while (checked < 200) {
    const Index d = 2 + checked % 2;
    const ComplexVector g = basis_vector(d, 0);
    const ComplexVector psi = near_ground(g, d, uniform(rng, 0.0, 0.5), rng);
    std::vector<ComplexVector> out;
    for (int x = 0; x < 2; ++x) {
      const ComplexMatrix u = expm_hermitian(random_hermitian(d, rng), uniform(rng, 0.0, 0.8));
      out.push_back(tensor(u, identity(d)) * psi);
    }
    const ComplexMatrix gproj = tensor(projector(g), identity(d));
    double omega = 0.0;
    for (const auto& v : out) omega = std::max(omega, 1.0 - (v.adjoint() * gproj * v)(0, 0).real());
    if (omega >= 0.5) continue;
    const auto h = helstrom(projector(out[0]), projector(out[1]), SubsystemShape{d, d});
    EXPECT_LE(h.value, 4 * std::sqrt(omega * (1 - omega)) + 1e-8);
    ++checked;
  }
}
