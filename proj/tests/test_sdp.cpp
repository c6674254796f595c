#include <gtest/gtest.h>

#include "ecpm/quantum.hpp"
#include "ecpm/random.hpp"
#include "ecpm/sdp.hpp"

using namespace ecpm;
using namespace ecpm::sdp;

namespace {

HermitianMap id_map() {
  return [](const ComplexMatrix& x) { return x; };
}
HermitianMap neg_map() {
  return [](const ComplexMatrix& x) -> ComplexMatrix { return -x; };
}

/// Hand-built real instance: W = [[A,-B],[B,A]] >= 0 spelled out entrywise with
/// explicit block-structure equalities; maximizes 1/2 Tr[emb(C) W] with 1/2 Tr W = 1
/// and 1/2 Tr[emb(D) W] <= t.
double hand_embedded(const ComplexMatrix& c, const ComplexMatrix& d, double t) {
  const Index n = c.rows(), N = 2 * n;
  std::vector<std::pair<Index, Index>> coords;
  for (Index j = 0; j < N; ++j)
    for (Index i = 0; i <= j; ++i) coords.emplace_back(i, j);
  const Index m = static_cast<Index>(coords.size());
  auto index_of = [&](Index i, Index j) {
    if (i > j) std::swap(i, j);
    return static_cast<Index>(j * (j + 1) / 2 + i);
  };
  RealConicProgram p;
  p.b = RealVector::Zero(m);
  p.a.assign(static_cast<std::size_t>(m), {});
  const std::size_t blk = p.add_block(BlockSpec::Kind::psd, N);
  for (Index v = 0; v < m; ++v) {
    const auto [i, j] = coords[static_cast<std::size_t>(v)];
    p.a[static_cast<std::size_t>(v)].push_back({blk, {{i, j, -1.0}}});
  }
  const RealMatrix ec = real_embedding(c), ed = real_embedding(d);
  auto functional = [&](const RealMatrix& e) {
    RealVector row = RealVector::Zero(m);
    for (Index v = 0; v < m; ++v) {
      const auto [i, j] = coords[static_cast<std::size_t>(v)];
      row(v) = 0.5 * (i == j ? e(i, i) : e(i, j) + e(j, i));
    }
    return row;
  };
  p.b = functional(ec);
  std::vector<RealVector> eq;
  std::vector<double> rhs;
  eq.push_back(functional(RealMatrix::Identity(N, N)));
  rhs.push_back(1.0);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      RealVector r = RealVector::Zero(m);
      r(index_of(i, j)) += 1.0;
      r(index_of(n + i, n + j)) -= 1.0;
      eq.push_back(r);
      rhs.push_back(0.0);
    }
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (j < i) continue;
      RealVector r = RealVector::Zero(m);
      r(index_of(i, n + j)) += 1.0;
      r(index_of(j, n + i)) += 1.0;
      eq.push_back(r);
      rhs.push_back(0.0);
    }
  }
  p.eq_lhs.resize(static_cast<Index>(eq.size()), m);
  p.eq_rhs.resize(static_cast<Index>(eq.size()));
  for (std::size_t r = 0; r < eq.size(); ++r) {
    p.eq_lhs.row(static_cast<Index>(r)) = eq[r].transpose();
    p.eq_rhs(static_cast<Index>(r)) = rhs[r];
  }
  const std::size_t lp = p.add_block(BlockSpec::Kind::lp, 1);
  p.c[lp](0, 0) = t;
  const RealVector dr = functional(ed);
  for (Index v = 0; v < m; ++v)
    if (dr(v) != 0.0) p.a[static_cast<std::size_t>(v)].push_back({lp, {{0, 0, dr(v)}}});
  const auto r = solve_conic(p);
  EXPECT_EQ(r.status, SolveStatus::optimal);
  return r.dual_objective;
}

}  // namespace

TEST(Sdp, TraceBoundedByIdentity) {
  SdpProblem p;
  const Var x = p.add_variable("X", 2, VarKind::hermitian_psd);
  p.set_objective(Sense::maximize, {{x, identity(2)}});
  p.add_lmi({{x, neg_map()}}, identity(2));
  const auto s = p.solve();
  ASSERT_EQ(s.status, SolveStatus::optimal);
  EXPECT_NEAR(s.value, 2.0, 1e-7);
  EXPECT_LT((s.at("X") - identity(2)).norm(), 1e-6);
}

TEST(Sdp, MinimumOverDensityMatrices) {
  SdpProblem p;
  const Var x = p.add_variable("X", 2, VarKind::hermitian_psd);
  ComplexMatrix c = ComplexMatrix::Zero(2, 2);
  c(0, 0) = 1;
  c(1, 1) = 2;
  p.set_objective(Sense::minimize, {{x, c}});
  p.add_equality({{x, identity(2)}}, 1.0);
  const auto s = p.solve();
  ASSERT_EQ(s.status, SolveStatus::optimal);
  EXPECT_NEAR(s.value, 1.0, 1e-7);
  EXPECT_LT((s.at("X") - projector(basis_vector(2, 0))).norm(), 1e-6);
}

TEST(Sdp, ZeroMapDiamondProgram) {
  // max Tr[Y 0] with -2(1 (x) s) <= Y <= 2(1 (x) s), s a state.
  SdpProblem p;
  const Var y = p.add_variable("Y", 4, VarKind::hermitian_free);
  const Var s = p.add_variable("sigma", 2, VarKind::hermitian_psd);
  p.set_objective(Sense::maximize, {{y, ComplexMatrix::Zero(4, 4)}});
  p.add_equality({{s, identity(2)}}, 1.0);
  auto lift = [](const ComplexMatrix& x) -> ComplexMatrix { return 2.0 * tensor(identity(2), x); };
  p.add_lmi({{s, lift}, {y, neg_map()}}, ComplexMatrix::Zero(4, 4));
  p.add_lmi({{s, lift}, {y, id_map()}}, ComplexMatrix::Zero(4, 4));
  const auto sol = p.solve();
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  EXPECT_NEAR(sol.value, 0.0, 1e-7);
}

TEST(Sdp, ComplexTranslationMatchesHandEmbedding) {
  auto rng = make_rng(31);
  for (int t = 0; t < 50; ++t) {
    const Index n = 2 + t % 2;
    const ComplexMatrix c = random_hermitian(n, rng);
    const ComplexMatrix d = random_hermitian(n, rng);
    const double bound = (d.trace().real() / double(n)) + 0.3 * std::abs(uniform(rng, 0.1, 1.0));
    SdpProblem p;
    const Var x = p.add_variable("X", n, VarKind::hermitian_psd);
    p.set_objective(Sense::maximize, {{x, c}});
    p.add_equality({{x, identity(n)}}, 1.0);
    p.add_less_equal({{x, d}}, bound);
    const auto s = p.solve();
    ASSERT_EQ(s.status, SolveStatus::optimal);
    EXPECT_NEAR(s.value, hand_embedded(c, d, bound), 1e-7);
  }
}

TEST(Sdp, UnconstrainedStateOptimumIsTopEigenvalue) {
  auto rng = make_rng(32);
  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix c = random_hermitian(4, rng);
    SdpProblem p;
    const Var x = p.add_variable("X", 4, VarKind::hermitian_psd);
    p.set_objective(Sense::maximize, {{x, c}});
    p.add_equality({{x, identity(4)}}, 1.0);
    const auto s = p.solve();
    ASSERT_EQ(s.status, SolveStatus::optimal);
    EXPECT_NEAR(s.value, eigenvalues_hermitian(c)(0), 1e-7);
  }
}

TEST(Sdp, WeakDualitySpotCheck) {
  auto rng = make_rng(33);
  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix c = random_hermitian(3, rng);
    const ComplexMatrix d = random_hermitian(3, rng);
    SdpProblem p;
    const Var x = p.add_variable("X", 3, VarKind::hermitian_psd);
    p.set_objective(Sense::maximize, {{x, c}});
    p.add_equality({{x, identity(3)}}, 1.0);
    const double cap = d.trace().real() / 3.0 + 0.05;
    p.add_less_equal({{x, d}}, cap);
    const auto s = p.solve();
    ASSERT_EQ(s.status, SolveStatus::optimal);
    for (int k = 0; k < 50; ++k) {
      // Feasible point: mix the maximally mixed state with a random state while Tr[D X] <= cap.
      const ComplexMatrix r = random_density(3, rng);
      const double dr = hs_inner(d, r), d0 = d.trace().real() / 3.0;
      double lam = 1.0;
      if (dr > cap) lam = (cap - d0) / (dr - d0);
      const ComplexMatrix feas = lam * r + (1 - lam) * identity(3) / 3.0;
      EXPECT_GE(s.value, hs_inner(c, feas) - 1e-6);
    }
  }
}

TEST(Sdp, ReportsInfeasible) {
  SdpProblem p;
  const Var x = p.add_variable("X", 2, VarKind::hermitian_psd);
  p.set_objective(Sense::maximize, {{x, identity(2)}});
  p.add_equality({{x, identity(2)}}, 1.0);
  p.add_greater_equal({{x, identity(2)}}, 2.0);
  EXPECT_EQ(p.solve().status, SolveStatus::infeasible);
}

TEST(Sdp, ReportsInconsistentEqualities) {
  SdpProblem p;
  const Var x = p.add_variable("X", 2, VarKind::hermitian_psd);
  p.set_objective(Sense::maximize, {{x, identity(2)}});
  p.add_equality({{x, identity(2)}}, 1.0);
  p.add_equality({{x, identity(2)}}, 2.0);
  EXPECT_EQ(p.solve().status, SolveStatus::infeasible);
}

TEST(Sdp, ReportsUnbounded) {
  SdpProblem p;
  const Var x = p.add_variable("X", 2, VarKind::hermitian_psd);
  p.set_objective(Sense::maximize, {{x, identity(2)}});
  EXPECT_EQ(p.solve().status, SolveStatus::unbounded);
}

TEST(Sdp, RejectsMalformedProblems) {
  SdpProblem p;
  const Var x = p.add_variable("X", 2, VarKind::hermitian_psd);
  EXPECT_THROW(p.set_objective(Sense::maximize, {{x, identity(3)}}), DimensionError);
  ComplexMatrix nh = ComplexMatrix::Zero(2, 2);
  nh(0, 1) = 1.0;
  EXPECT_THROW(p.add_equality({{x, nh}}, 0.0), ContractViolation);
  EXPECT_THROW(p.add_equality({{Var{7}, identity(2)}}, 0.0), ContractViolation);
  EXPECT_THROW(p.add_variable("X", 2, VarKind::hermitian_free), ContractViolation);
}

TEST(Sdp, MatrixEqualityOnPartialTrace) {
  // Two states with a common marginal on the second factor, maximize their distinguishability.
  auto rng = make_rng(34);
  const ComplexMatrix w = random_hermitian(4, rng);
  SdpProblem p;
  const Var a = p.add_variable("a", 4, VarKind::hermitian_psd);
  const Var b = p.add_variable("b", 4, VarKind::hermitian_psd);
  p.set_objective(Sense::maximize, {{a, w}, {b, -w}});
  p.add_equality({{a, identity(4)}}, 1.0);
  p.add_equality({{b, identity(4)}}, 1.0);
  auto tr_s = [](const ComplexMatrix& x) -> ComplexMatrix { return partial_trace(x, {2, 2}, {1}); };
  auto neg_tr_s = [](const ComplexMatrix& x) -> ComplexMatrix { return -partial_trace(x, {2, 2}, {1}); };
  p.add_matrix_equality({{a, tr_s}, {b, neg_tr_s}}, ComplexMatrix::Zero(2, 2));
  const auto s = p.solve();
  ASSERT_EQ(s.status, SolveStatus::optimal);
  EXPECT_LT((partial_trace(s.at("a"), {2, 2}, {1}) - partial_trace(s.at("b"), {2, 2}, {1})).norm(), 1e-7);
  EXPECT_LE(s.max_violation, 1e-7);
  EXPECT_GE(min_eigenvalue(s.at("a")), -1e-7);
}

TEST(Sdp, DumpWritesOneFilePerSolve) {
  const std::string dir = ::testing::TempDir();
  SolverSettings st;
  st.dump = std::make_shared<DumpSink>(dir);
  SdpProblem p;
  const Var x = p.add_variable("X", 2, VarKind::hermitian_psd);
  p.set_objective(Sense::maximize, {{x, identity(2)}});
  p.add_equality({{x, identity(2)}}, 1.0);
  ASSERT_EQ(p.solve(st).status, SolveStatus::optimal);
  std::ifstream in(dir + "/sdp_000000.txt");
  ASSERT_TRUE(in.good());
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first.rfind("#", 0), 0u);
}

TEST(Sdp, UnknownBackendRejected) {
  EXPECT_THROW(make_backend("nope"), DomainError);
  EXPECT_EQ(make_backend("ipm")->name(), "ipm");
}
