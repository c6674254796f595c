#pragma once

// Alternating-SDP optimizers over prepare-and-measure strategies with a
// shared entangled state. The ground state is fixed to |0> on S.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ecpm/analytic.hpp"
#include "ecpm/parallel.hpp"
#include "ecpm/quantum.hpp"
#include "ecpm/random.hpp"
#include "ecpm/scenario.hpp"
#include "ecpm/sdp.hpp"

namespace ecpm {

inline constexpr double eps_det = 1e-6;         ///< slack on p(0|0) = 1
inline constexpr double monotone_slack = 1e-8;  ///< allowed decrease of a recorded trace

struct SeesawSettings {
  int max_rounds = 200;
  double obj_tol = 1e-9;
  int restarts = 20;
  std::uint64_t seed = 0;
  SubsystemShape dims{2, 2};  ///< (d_S, d_M)
  int jobs = 1;
  bool analytic_seed = true;  ///< restart 0 starts from the closed-form family where one exists
  sdp::SolverSettings solver;

  void validate() const {
    if (max_rounds < 1) throw ContractViolation("SeesawSettings: max_rounds must be at least 1");
    if (!(obj_tol > 0.0)) throw ContractViolation("SeesawSettings: obj_tol must be positive");
    if (restarts < 1) throw ContractViolation("SeesawSettings: restarts must be at least 1");
    if (dims.size() != 2) throw DimensionError("SeesawSettings: dims must be (d_S, d_M)");
    for (Index d : dims.dims) {
      if (d < 1) throw DimensionError("SeesawSettings: dimensions must be positive");
    }
  }
};

using Strategy = std::map<std::string, ComplexMatrix>;

struct SeesawResult {
  sdp::SolveStatus status = sdp::SolveStatus::optimal;
  std::string failed_block;  ///< block whose subproblem failed, when status is not optimal
  double value = std::numeric_limits<double>::quiet_NaN();
  Strategy strategy;
  std::vector<double> trace;  ///< per-round objective of the best restart
  std::vector<double> restart_values;
  std::vector<std::vector<double>> restart_traces;
  int best_restart = -1;

  [[nodiscard]] bool ok() const { return status == sdp::SolveStatus::optimal; }
};

namespace seesaw_detail {

struct RestartOutcome {
  sdp::SolveStatus status = sdp::SolveStatus::optimal;
  std::string failed_block;
  double value = std::numeric_limits<double>::quiet_NaN();
  Strategy strategy;
  std::vector<double> trace;
};

/// Per-restart bookkeeping: acceptance of block updates and convergence of rounds.
class Alternation {
 public:
  /// Block updates losing more than `breach` (relative) raise InternalError; smaller losses are rejected.
  Alternation(bool maximize, double obj_tol, double breach)
      : sign_(maximize ? 1.0 : -1.0), obj_tol_(obj_tol), breach_(std::max(monotone_slack, breach)) {}

  /// Whether a block update moving the objective from `incumbent` to `candidate` is kept.
  [[nodiscard]] bool accept(double candidate, double incumbent, const std::string& block) const {
    if (!std::isfinite(incumbent)) return true;
    const double gain = sign_ * (candidate - incumbent);
    if (gain >= 0.0) return true;
    if (gain < -breach_ * std::max(1.0, std::abs(incumbent))) {
      throw InternalError("seesaw: block '" + block + "' worsened the objective by " + std::to_string(-gain));
    }
    return false;
  }

  /// Appends the end-of-round objective; true once the change drops to obj_tol.
  bool record(double v) {
    trace_.push_back(v);
    if (trace_.size() < 2) return false;
    return std::abs(v - trace_[trace_.size() - 2]) <= obj_tol_;
  }

  [[nodiscard]] const std::vector<double>& trace() const { return trace_; }
  [[nodiscard]] double sign() const { return sign_; }

 private:
  double sign_;
  double obj_tol_;
  double breach_;
  std::vector<double> trace_;
};

/// Solver-accuracy allowance for a single block step.
inline double breach_threshold(const sdp::SolverSettings& s) { return 100.0 * std::max(s.gap_tol, s.feas_tol); }

inline RestartOutcome failed(const std::string& block, sdp::SolveStatus status) {
  RestartOutcome out;
  out.status = status == sdp::SolveStatus::optimal ? sdp::SolveStatus::numerical_trouble : status;
  out.failed_block = block;
  return out;
}

/// Best restart (ties go to the lowest index).
inline SeesawResult merge(std::vector<RestartOutcome> outs, bool maximize) {
  SeesawResult res;
  const double sign = maximize ? 1.0 : -1.0;
  for (std::size_t r = 0; r < outs.size(); ++r) {
    const auto& o = outs[r];
    res.restart_values.push_back(o.status == sdp::SolveStatus::optimal ? o.value
                                                                        : std::numeric_limits<double>::quiet_NaN());
    res.restart_traces.push_back(o.trace);
    if (o.status != sdp::SolveStatus::optimal || !std::isfinite(o.value)) continue;
    if (res.best_restart < 0 || sign * (o.value - res.value) > 0.0) {
      res.best_restart = static_cast<int>(r);
      res.value = o.value;
    }
  }
  if (res.best_restart < 0) {
    res.status = outs.front().status;
    res.failed_block = outs.front().failed_block;
    return res;
  }
  auto& best = outs[static_cast<std::size_t>(res.best_restart)];
  res.strategy = std::move(best.strategy);
  res.trace = best.trace;
  return res;
}

template <class F>
SeesawResult run_restarts(const SeesawSettings& s, bool maximize, F&& one) {
  std::vector<RestartOutcome> outs(static_cast<std::size_t>(s.restarts));
  parallel_for(outs.size(), s.jobs, [&](std::size_t r) { outs[r] = one(r); });
  return merge(std::move(outs), maximize);
}

inline ComplexMatrix ground_projector_on_s(Index ds, Index dm) {
  return tensor(projector(basis_vector(ds, 0)), identity(dm));
}

inline ComplexMatrix trace_out_first(const ComplexMatrix& x, Index d1, Index d2) { return partial_trace(x, {d1, d2}, {1}); }

struct StatePair {
  sdp::Var r0;
  sdp::Var r1;
};

/// rho0, rho1 on S (x) M: unit trace, ground-state overlap >= 1 - omega, equal M-marginals.
inline StatePair add_state_pair(sdp::SdpProblem& prob, double omega, Index ds, Index dm) {
  const Index n = ds * dm;
  const sdp::Var r0 = prob.add_variable("rho0", n, sdp::VarKind::hermitian_psd);
  const sdp::Var r1 = prob.add_variable("rho1", n, sdp::VarKind::hermitian_psd);
  const ComplexMatrix g = ground_projector_on_s(ds, dm);
  for (const auto& r : {r0, r1}) {
    prob.add_equality({{r, identity(n)}}, 1.0, "trace");
    prob.add_greater_equal({{r, g}}, 1.0 - omega, "energy");
  }
  prob.add_matrix_equality({{r0, [ds, dm](const ComplexMatrix& x) { return trace_out_first(x, ds, dm); }},
                            {r1, [ds, dm](const ComplexMatrix& x) { return ComplexMatrix(-trace_out_first(x, ds, dm)); }}},
                           ComplexMatrix::Zero(dm, dm), "marginal");
  return {r0, r1};
}

/// 0 <= P <= 1 on an n-dimensional space.
inline sdp::Var add_effect(sdp::SdpProblem& prob, Index n) {
  const sdp::Var p = prob.add_variable("Pi0", n, sdp::VarKind::hermitian_psd);
  prob.add_lmi({{p, [](const ComplexMatrix& x) { return ComplexMatrix(-x); }}}, identity(n), "effect");
  return p;
}

/// Projector onto a Haar-random subspace of dimension in [1, n-1].
inline ComplexMatrix random_projector(Index n, Rng& rng) {
  const ComplexMatrix u = haar_unitary(n, rng);
  const Index k = n < 2 ? 1 : 1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(n - 1));
  return hermitian_part(u.leftCols(k) * u.leftCols(k).adjoint());
}

/// Copies an operator on C^2 (x) C^2 into C^ds (x) C^dm.
inline ComplexMatrix embed_qubit_pair(const ComplexMatrix& m, Index ds, Index dm) {
  ComplexMatrix out = ComplexMatrix::Zero(ds * dm, ds * dm);
  for (Index i = 0; i < 4; ++i) {
    for (Index j = 0; j < 4; ++j) out((i / 2) * dm + i % 2, (j / 2) * dm + j % 2) = m(i, j);
  }
  return out;
}

/// Family states at the icorr-optimal p, embedded into (ds, dm); empty when dims are too small or omega = 0.
inline std::optional<std::array<ComplexMatrix, 2>> family_seed(double omega, Index ds, Index dm) {
  if (omega <= 0.0 || ds < 2 || dm < 2) return std::nullopt;
  const FamilyPoint fp = make_family_point(omega, icorr_family(omega).p_star);
  return std::array<ComplexMatrix, 2>{embed_qubit_pair(fp.psi0.mat, ds, dm), embed_qubit_pair(fp.rho1.mat, ds, dm)};
}

/// Random pair (Lambda_x (x) 1)(psi) meeting the energy bound; channels are mixed with |0><0| preparation as needed.
inline std::array<ComplexMatrix, 2> random_feasible_pair(double omega, Index ds, Index dm, Rng& rng) {
  const ComplexVector psi = random_pure_state(ds * dm, rng);
  const ComplexMatrix g = ground_projector_on_s(ds, dm);
  std::array<ComplexMatrix, 2> out;
  for (auto& r : out) {
    const Channel ch(random_kraus(ds, ds, 2, rng));
    const ComplexMatrix img = apply_on(ch, projector(psi), {ds, dm}, 0);
    const ComplexMatrix prep = tensor(projector(basis_vector(ds, 0)), trace_out_first(img, ds, dm));
    const double ov = hs_inner(g, img);
    double t = 0.0;
    if (ov < 1.0 - omega + 1e-3) t = std::min(1.0, (1.0 - omega + 1e-3 - ov) / (1.0 - ov));
    r = hermitian_part((1.0 - t) * img + t * prep);
  }
  return out;
}

inline Strategy pm_strategy(const ComplexMatrix& rho0, const ComplexMatrix& rho1, const ComplexMatrix& pi0, Index ds) {
  const Index n = pi0.rows();
  return {{"rho0", rho0},
          {"rho1", rho1},
          {"Pi0", pi0},
          {"Pi1", ComplexMatrix(identity(n) - pi0)},
          {"ground", ComplexMatrix(basis_vector(ds, 0))}};
}

/// Purification on P (x) M of a state on M, with d_P = d_M.
inline ComplexVector purification(const ComplexMatrix& tau) {
  return fold(ComplexMatrix(psd_sqrt(hermitian_part(tau)).conjugate()));
}

}  // namespace seesaw_detail

/// Entangled I_corr lower bound: alternates the state pair (one SDP) and the Helstrom measurement.
inline SeesawResult maximize_icorr(double omega, const SeesawSettings& settings) {
  using namespace seesaw_detail;
  require_omega(omega);
  settings.validate();
  const Index ds = settings.dims[0], dm = settings.dims[1], n = ds * dm;
  if (omega == 0.0) {
    // Unit overlap forces rho^x = |0><0| (x) tau with a common tau.
    const ComplexMatrix r = tensor(projector(basis_vector(ds, 0)), identity(dm) / static_cast<double>(dm));
    SeesawResult res;
    res.value = 0.0;
    res.strategy = pm_strategy(r, r, identity(n), ds);
    res.trace = {0.0};
    res.restart_values = {0.0};
    res.restart_traces = {res.trace};
    res.best_restart = 0;
    return res;
  }
  const auto seed = settings.analytic_seed ? family_seed(omega, ds, dm) : std::nullopt;

  auto one = [&](std::size_t r) -> RestartOutcome {
    Rng rng = make_rng(settings.seed, {r});
    ComplexMatrix rho0, rho1, pi0;
    double current = -std::numeric_limits<double>::infinity();
    if (r == 0 && seed) {
      rho0 = (*seed)[0];
      rho1 = (*seed)[1];
      pi0 = helstrom(rho0, rho1, {ds, dm}).povm[0];
      current = trace_norm(rho0 - rho1);
    } else {
      pi0 = random_projector(n, rng);
    }
    Alternation alt(true, settings.obj_tol, breach_threshold(settings.solver));
    RestartOutcome out;
    for (int round = 0; round < settings.max_rounds; ++round) {
      sdp::SdpProblem prob;
      const StatePair v = add_state_pair(prob, omega, ds, dm);
      const ComplexMatrix w = 2.0 * pi0 - identity(n);
      prob.set_objective(sdp::Sense::maximize, {{v.r0, w}, {v.r1, -w}});
      const auto sol = prob.solve(settings.solver);
      if (!sol.ok()) {
        if (alt.trace().empty()) return failed("states", sol.status);
        out.failed_block = "states";
        break;
      }
      const double incumbent = rho0.size() ? hs_inner(w, rho0 - rho1) : current;
      if (alt.accept(sol.value, incumbent, "states")) {
        rho0 = hermitian_part(sol.at("rho0"));
        rho1 = hermitian_part(sol.at("rho1"));
      }
      const auto h = helstrom(rho0, rho1, {ds, dm});
      if (!alt.accept(h.value, current, "measurement")) break;
      pi0 = h.povm[0];
      current = h.value;
      if (alt.record(current)) break;
    }
    out.value = current;
    out.strategy = pm_strategy(rho0, rho1, pi0, ds);
    out.trace = alt.trace();
    return out;
  };
  return run_restarts(settings, true, one);
}

/// Upper bound on min E_1 over entangled behaviors with p(0|0) >= 1 - eps_det.
inline SeesawResult minimize_E1_deterministic(double omega, const SeesawSettings& settings) {
  using namespace seesaw_detail;
  require_omega(omega);
  settings.validate();
  const Index ds = settings.dims[0], dm = settings.dims[1], n = ds * dm;
  if (omega == 0.0) {
    const ComplexMatrix r = projector(basis_vector(n, 0));
    SeesawResult res;
    res.value = 1.0;
    res.strategy = pm_strategy(r, r, identity(n), ds);
    res.trace = {1.0};
    res.restart_values = {1.0};
    res.restart_traces = {res.trace};
    res.best_restart = 0;
    return res;
  }
  const auto seed = settings.analytic_seed ? family_seed(omega, ds, dm) : std::nullopt;
  auto e1 = [n](const ComplexMatrix& pi0, const ComplexMatrix& rho1) {
    return hs_inner(2.0 * pi0 - identity(n), rho1);
  };

  auto one = [&](std::size_t r) -> RestartOutcome {
    Rng rng = make_rng(settings.seed, {r});
    std::array<ComplexMatrix, 2> states = (r == 0 && seed) ? *seed : random_feasible_pair(omega, ds, dm, rng);
    ComplexMatrix rho0 = states[0], rho1 = states[1], pi0 = identity(n);
    double current = e1(pi0, rho1);
    Alternation alt(false, settings.obj_tol, breach_threshold(settings.solver));
    RestartOutcome out;
    for (int round = 0; round < settings.max_rounds; ++round) {
      {
        sdp::SdpProblem prob;
        const sdp::Var p = add_effect(prob, n);
        prob.add_greater_equal({{p, rho0}}, 1.0 - eps_det, "deterministic");
        prob.set_objective(sdp::Sense::minimize, {{p, 2.0 * rho1}}, -rho1.trace().real());
        const auto sol = prob.solve(settings.solver);
        if (!sol.ok()) {
          if (alt.trace().empty()) return failed("measurement", sol.status);
          out.failed_block = "measurement";
          break;
        }
        const ComplexMatrix cand = hermitian_part(sol.at("Pi0"));
        const double v = e1(cand, rho1);
        if (alt.accept(v, current, "measurement")) {
          pi0 = cand;
          current = v;
        }
      }
      {
        sdp::SdpProblem prob;
        const StatePair v = add_state_pair(prob, omega, ds, dm);
        prob.add_greater_equal({{v.r0, pi0}}, 1.0 - eps_det, "deterministic");
        prob.set_objective(sdp::Sense::minimize, {{v.r1, 2.0 * pi0 - identity(n)}});
        const auto sol = prob.solve(settings.solver);
        if (!sol.ok()) {
          if (alt.trace().empty()) return failed("states", sol.status);
          out.failed_block = "states";
          break;
        }
        const ComplexMatrix c1 = hermitian_part(sol.at("rho1"));
        const double val = e1(pi0, c1);
        if (alt.accept(val, current, "states")) {
          rho0 = hermitian_part(sol.at("rho0"));
          rho1 = c1;
          current = val;
        }
      }
      if (alt.record(current)) break;
    }
    out.value = current;
    out.strategy = pm_strategy(rho0, rho1, pi0, ds);
    out.trace = alt.trace();
    return out;
  };
  return run_restarts(settings, false, one);
}

namespace seesaw_detail {

/// Eve's attack: sigma^e on P (x) M (subnormalized), Choi matrices J_x of Lambda_x: P -> S, honest effect Pi0.
struct Attack {
  std::array<ComplexMatrix, 2> sigma;
  std::array<ComplexMatrix, 2> choi;
  ComplexMatrix pi0;
};

struct AttackGeometry {
  Index ds;
  Index dm;
  double omega;
  double i_exp;
  int xstar;

  [[nodiscard]] Index dp() const { return dm; }
  [[nodiscard]] Index n() const { return ds * dm; }

  [[nodiscard]] ComplexMatrix out(const ComplexMatrix& choi, const ComplexMatrix& sigma) const {
    return apply_choi(choi, sigma, ds, dp(), dm);
  }

  [[nodiscard]] double guess(const Attack& a) const {
    const ComplexMatrix& j = a.choi[static_cast<std::size_t>(xstar)];
    return hs_inner(a.pi0, out(j, a.sigma[0])) + hs_inner(identity(n()) - a.pi0, out(j, a.sigma[1]));
  }

  [[nodiscard]] double icorr_signed(const Attack& a) const {
    const ComplexMatrix s = a.sigma[0] + a.sigma[1];
    const ComplexMatrix w = 2.0 * a.pi0 - identity(n());
    return hs_inner(w, out(a.choi[0], s)) - hs_inner(w, out(a.choi[1], s));
  }
};

inline Strategy attack_strategy(const Attack& a, const AttackGeometry& geo) {
  const ComplexMatrix s = a.sigma[0] + a.sigma[1];
  return {{"sigma0", a.sigma[0]},
          {"sigma1", a.sigma[1]},
          {"J0", a.choi[0]},
          {"J1", a.choi[1]},
          {"Pi0", a.pi0},
          {"Pi1", ComplexMatrix(identity(geo.n()) - a.pi0)},
          {"rho0", geo.out(a.choi[0], s)},
          {"rho1", geo.out(a.choi[1], s)},
          {"ground", ComplexMatrix(basis_vector(geo.ds, 0))}};
}

/// Mixes the channels and the effect with random ones, halving the weight until the attack stays feasible.
inline void perturb_attack(Attack& a, const AttackGeometry& geo, Rng& rng) {
  const ComplexMatrix g = ground_projector_on_s(geo.ds, geo.dm);
  auto feasible = [&](const Attack& c) {
    const ComplexMatrix s = c.sigma[0] + c.sigma[1];
    for (std::size_t x = 0; x < 2; ++x) {
      if (hs_inner(g, geo.out(c.choi[x], s)) < 1.0 - geo.omega) return false;
    }
    return geo.icorr_signed(c) >= geo.i_exp;
  };
  std::vector<ComplexMatrix> prep;
  for (Index k = 0; k < geo.dp(); ++k) prep.push_back(basis_vector(geo.ds, 0) * basis_vector(geo.dp(), k).adjoint());
  const ComplexMatrix prep_choi = Channel(prep).choi();
  const ComplexMatrix s = a.sigma[0] + a.sigma[1];
  Attack target = a;
  for (auto& j : target.choi) {
    j = Channel(random_kraus(geo.dp(), geo.ds, 2, rng)).choi();
    // Random channels rarely meet the energy bound; pull them towards |0> preparation.
    const double e = hs_inner(g, geo.out(j, s));
    const double want = 1.0 - 0.5 * geo.omega;
    if (e < want) {
      const double mu = (want - e) / (1.0 - e);
      j = (1.0 - mu) * j + mu * prep_choi;
    }
  }
  target.pi0 = random_projector(geo.n(), rng);
  for (double lambda = 0.5; lambda > 1e-4; lambda *= 0.5) {
    Attack c = a;
    for (std::size_t x = 0; x < 2; ++x) c.choi[x] = (1.0 - lambda) * a.choi[x] + lambda * target.choi[x];
    c.pi0 = (1.0 - lambda) * a.pi0 + lambda * target.pi0;
    if (feasible(c)) {
      a = c;
      return;
    }
  }
}

inline void add_choi_tp(sdp::SdpProblem& prob, const sdp::Var& j, Index ds, Index dp) {
  prob.add_matrix_equality({{j, [ds, dp](const ComplexMatrix& x) { return trace_out_first(x, ds, dp); }}},
                           ComplexMatrix(-identity(dp) / static_cast<double>(dp)), "trace-preserving");
}

/// One sweep over the four blocks. Returns the failing block name, if any.
inline std::optional<std::pair<std::string, sdp::SolveStatus>> attack_round(Attack& a, double& current,
                                                                          const AttackGeometry& geo,
                                                                          const Alternation& alt,
                                                                          const sdp::SolverSettings& solver) {
  const Index ds = geo.ds, dm = geo.dm, dp = geo.dp(), n = geo.n();
  const ComplexMatrix g = ground_projector_on_s(ds, dm);
  const auto xs = static_cast<std::size_t>(geo.xstar);

  // sigma^0, sigma^1
  {
    const ComplexMatrix w = 2.0 * a.pi0 - identity(n);
    sdp::SdpProblem prob;
    const sdp::Var s0 = prob.add_variable("sigma0", dp * dm, sdp::VarKind::hermitian_psd);
    const sdp::Var s1 = prob.add_variable("sigma1", dp * dm, sdp::VarKind::hermitian_psd);
    prob.add_equality({{s0, identity(dp * dm)}, {s1, identity(dp * dm)}}, 1.0, "trace");
    for (std::size_t x = 0; x < 2; ++x) {
      const ComplexMatrix f = choi_functional_wrt_state(a.choi[x], g, ds, dp, dm);
      prob.add_greater_equal({{s0, f}, {s1, f}}, 1.0 - geo.omega, "energy");
    }
    const ComplexMatrix fw = choi_functional_wrt_state(a.choi[0], w, ds, dp, dm) -
                             choi_functional_wrt_state(a.choi[1], w, ds, dp, dm);
    prob.add_greater_equal({{s0, fw}, {s1, fw}}, geo.i_exp, "icorr");
    prob.set_objective(sdp::Sense::maximize,
                       {{s0, choi_functional_wrt_state(a.choi[xs], a.pi0, ds, dp, dm)},
                        {s1, choi_functional_wrt_state(a.choi[xs], identity(n) - a.pi0, ds, dp, dm)}});
    const auto sol = prob.solve(solver);
    if (!sol.ok()) return std::make_pair(std::string("sigma"), sol.status);
    Attack cand = a;
    cand.sigma = {hermitian_part(sol.at("sigma0")), hermitian_part(sol.at("sigma1"))};
    const double v = geo.guess(cand);
    if (alt.accept(v, current, "sigma")) {
      a = cand;
      current = v;
    }
  }

  // J_0, J_1
  for (std::size_t x = 0; x < 2; ++x) {
    const ComplexMatrix s = a.sigma[0] + a.sigma[1];
    const ComplexMatrix w = 2.0 * a.pi0 - identity(n);
    const double sign = x == 0 ? 1.0 : -1.0;
    const double other = -sign * hs_inner(w, geo.out(a.choi[1 - x], s));
    sdp::SdpProblem prob;
    const sdp::Var j = prob.add_variable("J", ds * dp, sdp::VarKind::hermitian_psd);
    add_choi_tp(prob, j, ds, dp);
    prob.add_greater_equal({{j, choi_functional_wrt_choi(s, g, ds, dp, dm)}}, 1.0 - geo.omega, "energy");
    const ComplexMatrix dw = sign * choi_functional_wrt_choi(s, w, ds, dp, dm);
    prob.add_greater_equal({{j, dw}}, geo.i_exp - other, "icorr");
    if (x == xs) {
      prob.set_objective(sdp::Sense::maximize,
                         {{j, choi_functional_wrt_choi(a.sigma[0], a.pi0, ds, dp, dm) +
                                  choi_functional_wrt_choi(a.sigma[1], identity(n) - a.pi0, ds, dp, dm)}});
    } else {
      // The guess does not depend on this channel; widen the icorr margin instead.
      prob.set_objective(sdp::Sense::maximize, {{j, dw}});
    }
    const auto sol = prob.solve(solver);
    if (!sol.ok()) return std::make_pair(std::string(x == 0 ? "J0" : "J1"), sol.status);
    Attack cand = a;
    cand.choi[x] = hermitian_part(sol.at("J"));
    const double v = geo.guess(cand);
    if (alt.accept(v, current, x == 0 ? "J0" : "J1")) {
      a = cand;
      current = v;
    }
  }

  // Pi0
  {
    const ComplexMatrix s = a.sigma[0] + a.sigma[1];
    const ComplexMatrix diff = geo.out(a.choi[0], s) - geo.out(a.choi[1], s);
    const ComplexMatrix o0 = geo.out(a.choi[xs], a.sigma[0]);
    const ComplexMatrix o1 = geo.out(a.choi[xs], a.sigma[1]);
    sdp::SdpProblem prob;
    const sdp::Var p = add_effect(prob, n);
    prob.add_greater_equal({{p, 2.0 * diff}}, geo.i_exp + diff.trace().real(), "icorr");
    prob.set_objective(sdp::Sense::maximize, {{p, o0 - o1}}, o1.trace().real());
    const auto sol = prob.solve(solver);
    if (!sol.ok()) return std::make_pair(std::string("measurement"), sol.status);
    Attack cand = a;
    cand.pi0 = hermitian_part(sol.at("Pi0"));
    const double v = geo.guess(cand);
    if (alt.accept(v, current, "measurement")) {
      a = cand;
      current = v;
    }
  }
  return std::nullopt;
}

}  // namespace seesaw_detail

/// Feasible-attack lower bound on Eve's guessing probability for input xstar given I_corr >= i_exp.
/// The warm start comes from maximize_icorr: its states are realized as (Lambda_x (x) 1)(psi) with psi a
/// purification of the common M-marginal.
inline SeesawResult guessing_probability_lower(double omega, double i_exp, int xstar, const SeesawSettings& settings) {
  using namespace seesaw_detail;
  require_omega(omega);
  settings.validate();
  if (!(i_exp >= 0.0 && i_exp <= 2.0)) throw DomainError("guessing_probability_lower: i_exp must lie in [0, 2]");
  if (xstar != 0 && xstar != 1) throw DomainError("guessing_probability_lower: xstar must be 0 or 1");
  const AttackGeometry geo{settings.dims[0], settings.dims[1], omega, i_exp, xstar};

  const SeesawResult warm = maximize_icorr(omega, settings);
  if (!warm.ok()) {
    SeesawResult res;
    res.status = warm.status;
    res.failed_block = "warm-start/" + warm.failed_block;
    return res;
  }
  if (warm.value < i_exp - 1e-9) {
    SeesawResult res;
    res.status = sdp::SolveStatus::infeasible;
    res.failed_block = "warm-start";
    return res;
  }
  const ComplexMatrix& r0 = warm.strategy.at("rho0");
  const ComplexMatrix& r1 = warm.strategy.at("rho1");
  const ComplexMatrix tau = 0.5 * (trace_out_first(r0, geo.ds, geo.dm) + trace_out_first(r1, geo.ds, geo.dm));
  const ComplexVector psi = purification(tau);
  Attack base;
  for (std::size_t x = 0; x < 2; ++x) {
    const Channel ch = channel_from_state_pair(psi, geo.dp(), geo.dm, x == 0 ? r0 : r1, geo.ds);
    base.choi[x] = ch.choi();
  }
  base.pi0 = warm.strategy.at("Pi0");

  auto one = [&](std::size_t r) -> RestartOutcome {
    Rng rng = make_rng(settings.seed, {r, 1});
    Attack a = base;
    const double t = r == 0 ? 0.5 : uniform(rng, 0.05, 0.95);
    a.sigma = {t * projector(psi), (1.0 - t) * projector(psi)};
    if (r > 0) perturb_attack(a, geo, rng);
    double current = geo.guess(a);
    Alternation alt(true, settings.obj_tol, breach_threshold(settings.solver));
    RestartOutcome out;
    for (int round = 0; round < settings.max_rounds; ++round) {
      const auto fail = attack_round(a, current, geo, alt, settings.solver);
      if (fail) {
        if (alt.trace().empty()) return failed(fail->first, fail->second);
        out.failed_block = fail->first;
        break;
      }
      if (alt.record(current)) break;
    }
    out.value = current;
    out.strategy = attack_strategy(a, geo);
    out.trace = alt.trace();
    return out;
  };
  return run_restarts(settings, true, one);
}

/// Lower bound on sup_rho ||Lambda(rho) - rho||_1, optionally restricted to <g|rho|g> >= 1 - omega and,
/// when `output_constraint` is set, <g|Lambda(rho)|g> >= 1 - omega.
inline SeesawResult induced_trace_norm_lower(const Channel& ch, const std::optional<EnergyConstraint>& ec,
                                             const SeesawSettings& settings, bool output_constraint = true) {
  using namespace seesaw_detail;
  settings.validate();
  if (ch.d_in() != ch.d_out()) throw DimensionError("induced_trace_norm_lower: channel must map a space to itself");
  const Index d = ch.d_in();
  if (ec && ec->ground.size() != d) throw DimensionError("induced_trace_norm_lower: ground state dimension");
  auto value_of = [&](const ComplexMatrix& rho) { return trace_norm(ch(rho) - rho); };
  auto sign_of = [&](const ComplexMatrix& rho) {
    const auto eig = eig_hermitian(hermitian_part(ch(rho) - rho));
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    for (Index k = 0; k < d; ++k) m += (eig.values(k) >= 0.0 ? 1.0 : -1.0) * projector(eig.vectors.col(k));
    return m;
  };

  auto one = [&](std::size_t r) -> RestartOutcome {
    Rng rng = make_rng(settings.seed, {r, 2});
    ComplexMatrix rho, m;
    double current = -std::numeric_limits<double>::infinity();
    if (r == 0) {
      rho = ec ? ec->ground_projector() : projector(basis_vector(d, 0));
      if (ec && output_constraint && !ec->satisfied_by(ch(rho))) rho.resize(0, 0);
    }
    if (rho.size()) {
      m = sign_of(rho);
      current = value_of(rho);
    } else {
      const ComplexMatrix u = haar_unitary(d, rng);
      RealVector signs(d);
      for (Index k = 0; k < d; ++k) signs(k) = k % 2 == 0 ? 1.0 : -1.0;
      m = u * signs.cast<cplx>().asDiagonal() * u.adjoint();
    }
    Alternation alt(true, settings.obj_tol, breach_threshold(settings.solver));
    RestartOutcome out;
    for (int round = 0; round < settings.max_rounds; ++round) {
      const ComplexMatrix k = hermitian_part(ch.adjoint(m) - m);
      ComplexMatrix cand;
      if (!ec) {
        cand = projector(eig_hermitian(k).vectors.col(0));
      } else {
        sdp::SdpProblem prob;
        const sdp::Var v = prob.add_variable("rho", d, sdp::VarKind::hermitian_psd);
        prob.add_equality({{v, identity(d)}}, 1.0, "trace");
        prob.add_greater_equal({{v, ec->ground_projector()}}, 1.0 - ec->omega, "energy-in");
        if (output_constraint) {
          prob.add_greater_equal({{v, ch.adjoint(ec->ground_projector())}}, 1.0 - ec->omega, "energy-out");
        }
        prob.set_objective(sdp::Sense::maximize, {{v, k}});
        const auto sol = prob.solve(settings.solver);
        if (!sol.ok()) {
          if (alt.trace().empty()) return failed("state", sol.status);
          out.failed_block = "state";
          break;
        }
        cand = hermitian_part(sol.at("rho"));
      }
      const double incumbent = rho.size() ? hs_inner(k, rho) : -std::numeric_limits<double>::infinity();
      if (alt.accept(hs_inner(k, cand), incumbent, "state")) rho = cand;
      const double v = value_of(rho);
      if (!alt.accept(v, current, "operator")) break;
      m = sign_of(rho);
      current = v;
      if (alt.record(current)) break;
    }
    out.value = current;
    out.strategy = {{"rho", rho}, {"M", m}};
    out.trace = alt.trace();
    return out;
  };
  return run_restarts(settings, true, one);
}

}  // namespace ecpm
