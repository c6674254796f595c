#pragma once

// Channel-versus-identity discrimination: diamond norm SDP, the probe-state
// lower bound under an energy constraint, the moment relaxation of the
// energy-constrained induced trace norm and the resulting advantage ratios.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ecpm/analytic.hpp"
#include "ecpm/quantum.hpp"
#include "ecpm/sdp.hpp"
#include "ecpm/seesaw.hpp"

namespace ecpm {

struct BoundResult {
  sdp::SolveStatus status = sdp::SolveStatus::optimal;
  double value = std::numeric_limits<double>::quiet_NaN();

  [[nodiscard]] bool ok() const { return status == sdp::SolveStatus::optimal; }
};

/// max Tr[Y X] s.t. -d(1 (x) sigma) <= Y <= d(1 (x) sigma), sigma a state; X a difference of normalized Choi matrices
/// on out (x) in.
inline BoundResult diamond_norm(const ComplexMatrix& delta_choi, Index d, const sdp::SolverSettings& solver = {}) {
  if (d < 1 || delta_choi.rows() != d * d || delta_choi.cols() != d * d) {
    throw DimensionError("diamond_norm: Choi difference must be d^2 x d^2");
  }
  require_hermitian(delta_choi, "diamond_norm");
  const double dd = static_cast<double>(d);
  sdp::SdpProblem prob;
  const sdp::Var y = prob.add_variable("Y", d * d, sdp::VarKind::hermitian_free);
  const sdp::Var s = prob.add_variable("sigma", d, sdp::VarKind::hermitian_psd);
  prob.add_equality({{s, identity(d)}}, 1.0, "trace");
  auto lift = [d, dd](const ComplexMatrix& x) { return ComplexMatrix(dd * tensor(identity(d), x)); };
  prob.add_lmi({{s, lift}, {y, [](const ComplexMatrix& x) { return ComplexMatrix(-x); }}}, ComplexMatrix::Zero(d * d, d * d),
               "upper");
  prob.add_lmi({{s, lift}, {y, [](const ComplexMatrix& x) { return x; }}}, ComplexMatrix::Zero(d * d, d * d), "lower");
  prob.set_objective(sdp::Sense::maximize, {{y, hermitian_part(delta_choi)}});
  const auto sol = prob.solve(solver);
  return {sol.status, sol.value};
}

/// ||Lambda - 1||_diamond.
inline BoundResult diamond_distance_to_identity(const Channel& ch, const sdp::SolverSettings& solver = {}) {
  if (ch.d_in() != ch.d_out()) throw DimensionError("diamond_distance_to_identity: channel must map a space to itself");
  return diamond_norm(Channel::identity_channel(ch.d_in()).choi() - ch.choi(), ch.d_in(), solver);
}

/// Trace distance between psi0 and (Lambda (x) 1)(psi0).
inline double diamond_norm_ec_lower(const FamilyPoint& fp) {
  return trace_norm(fp.psi0.mat - apply(fp.channel, fp.psi0, 0).mat);
}

namespace lasserre {

inline constexpr std::size_t num_vars = 7;
using Exponent = std::array<int, num_vars>;
using Polynomial = std::map<Exponent, double>;

inline const std::array<const char*, num_vars>& variable_names() {
  static const std::array<const char*, num_vars> names = {"rho00", "rho01R", "rho01I", "M00", "M11", "M01R", "M01I"};
  return names;
}

inline int degree(const Exponent& e) {
  int s = 0;
  for (int v : e) s += v;
  return s;
}

inline int degree(const Polynomial& p) {
  int d = 0;
  for (const auto& [e, c] : p) {
    if (c != 0.0) d = std::max(d, degree(e));
  }
  return d;
}

inline Exponent add(const Exponent& a, const Exponent& b) {
  Exponent out{};
  for (std::size_t k = 0; k < num_vars; ++k) out[k] = a[k] + b[k];
  return out;
}

inline Exponent unit(std::size_t k) {
  Exponent e{};
  e[k] = 1;
  return e;
}

inline Polynomial constant(double c) { return {{Exponent{}, c}}; }
inline Polynomial variable(std::size_t k) { return {{unit(k), 1.0}}; }

inline Polynomial operator+(Polynomial a, const Polynomial& b) {
  for (const auto& [e, c] : b) a[e] += c;
  return a;
}

inline Polynomial operator*(double s, Polynomial a) {
  for (auto& [e, c] : a) c *= s;
  return a;
}

inline Polynomial operator-(Polynomial a, const Polynomial& b) { return a + (-1.0) * b; }

inline Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ea, ca] : a) {
    for (const auto& [eb, cb] : b) out[add(ea, eb)] += ca * cb;
  }
  return out;
}

inline double evaluate(const Polynomial& p, const std::array<double, num_vars>& x) {
  double s = 0.0;
  for (const auto& [e, c] : p) {
    double t = c;
    for (std::size_t k = 0; k < num_vars; ++k) t *= std::pow(x[k], e[k]);
    s += t;
  }
  return s;
}

/// Monomials of degree <= d in graded order; index 0 is the constant monomial.
inline std::vector<Exponent> monomials(int d) {
  std::vector<Exponent> out;
  for (int total = 0; total <= d; ++total) {
    Exponent e{};
    // Enumerate compositions of `total` into num_vars parts.
    std::function<void(std::size_t, int)> rec = [&](std::size_t k, int left) {
      if (k + 1 == num_vars) {
        e[k] = left;
        out.push_back(e);
        return;
      }
      for (int v = left; v >= 0; --v) {
        e[k] = v;
        rec(k + 1, left - v);
      }
    };
    rec(0, total);
  }
  return out;
}

/// Qubit rho and the bounded operator M in terms of the seven variables.
inline std::array<ComplexMatrix, 4> rho_basis() {
  ComplexMatrix e00 = ComplexMatrix::Zero(2, 2), e11 = ComplexMatrix::Zero(2, 2);
  ComplexMatrix re = ComplexMatrix::Zero(2, 2), im = ComplexMatrix::Zero(2, 2);
  e00(0, 0) = 1.0;
  e11(1, 1) = 1.0;
  re(0, 1) = re(1, 0) = 1.0;
  im(0, 1) = cplx(0.0, 1.0);
  im(1, 0) = cplx(0.0, -1.0);
  // rho = e11 + rho00 (e00 - e11) + rho01R re + rho01I im
  return {e11, ComplexMatrix(e00 - e11), re, im};
}

inline std::array<ComplexMatrix, 4> operator_basis() {
  ComplexMatrix e00 = ComplexMatrix::Zero(2, 2), e11 = ComplexMatrix::Zero(2, 2);
  ComplexMatrix re = ComplexMatrix::Zero(2, 2), im = ComplexMatrix::Zero(2, 2);
  e00(0, 0) = 1.0;
  e11(1, 1) = 1.0;
  re(0, 1) = re(1, 0) = 1.0;
  im(0, 1) = cplx(0.0, 1.0);
  im(1, 0) = cplx(0.0, -1.0);
  // M = M00 e00 + M11 e11 + M01R re + M01I im
  return {e00, e11, re, im};
}

/// Variables of a point (rho, M).
inline std::array<double, num_vars> point_of(const ComplexMatrix& rho, const ComplexMatrix& m) {
  return {rho(0, 0).real(), rho(0, 1).real(), rho(0, 1).imag(), m(0, 0).real(), m(1, 1).real(), m(0, 1).real(),
          m(0, 1).imag()};
}

/// Polynomial optimization problem sup f subject to g_j >= 0.
struct PolyConstraintSystem {
  Polynomial objective;
  std::vector<Polynomial> inequalities;
  std::vector<std::string> labels;
};

/// Tr[M (Lambda(rho) - rho)] over qubit states rho, ||M||_inf <= 1, <0|rho|0> >= 1 - omega and optionally
/// <0|Lambda(rho)|0> >= 1 - omega.
inline PolyConstraintSystem itn_system(const Channel& ch, const EnergyConstraint& ec, bool output_constraint = true) {
  if (ch.d_in() != 2 || ch.d_out() != 2) throw DimensionError("lasserre: qubit channels only");
  if ((ec.ground - basis_vector(2, 0)).norm() > 1e-12) throw DomainError("lasserre: ground state must be |0>");
  const auto rb = rho_basis();
  const auto mb = operator_basis();
  const std::array<std::size_t, 4> m_vars = {3, 4, 5, 6};
  const std::array<std::optional<std::size_t>, 4> r_vars = {std::nullopt, 0, 1, 2};
  auto delta = [&ch](const ComplexMatrix& x) { return ComplexMatrix(ch(x) - x); };

  PolyConstraintSystem sys;
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t k = 0; k < 4; ++k) {
      const double c = hs_inner(mb[j], delta(rb[k]));
      if (c == 0.0) continue;
      Polynomial term = variable(m_vars[j]);
      if (r_vars[k]) term = term * variable(*r_vars[k]);
      sys.objective = sys.objective + c * term;
    }
  }
  const Polynomial r00 = variable(0), r01r = variable(1), r01i = variable(2);
  const Polynomial m00 = variable(3), m11 = variable(4), m01r = variable(5), m01i = variable(6);
  const Polynomial one = constant(1.0);
  auto add = [&sys](Polynomial p, const char* label) {
    sys.inequalities.push_back(std::move(p));
    sys.labels.emplace_back(label);
  };
  add(r00, "rho00 >= 0");
  add(one - r00, "rho11 >= 0");
  add(r00 * (one - r00) - r01r * r01r - r01i * r01i, "det rho >= 0");
  add(one + m00, "1 + M00 >= 0");
  add(one - m00, "1 - M00 >= 0");
  add(one + m11, "1 + M11 >= 0");
  add(one - m11, "1 - M11 >= 0");
  add((one - m00) * (one - m11) - m01r * m01r - m01i * m01i, "det(1 - M) >= 0");
  add((one + m00) * (one + m11) - m01r * m01r - m01i * m01i, "det(1 + M) >= 0");
  add(r00 - constant(1.0 - ec.omega), "input energy");
  // Redundant on the feasible set; keeps the pseudo-moments bounded.
  for (std::size_t k = 0; k < num_vars; ++k) add(one - variable(k) * variable(k), "box");
  if (output_constraint) {
    const ComplexMatrix h = ch.adjoint(ec.ground_projector());
    Polynomial out = constant(hs_inner(h, rb[0]) - (1.0 - ec.omega));
    for (std::size_t k = 1; k < 4; ++k) out = out + hs_inner(h, rb[k]) * variable(*r_vars[k]);
    add(out, "output energy");
  }
  return sys;
}

/// Level-d moment relaxation of a PolyConstraintSystem (maximization form).
struct MomentRelaxation {
  int order = 2;
  std::vector<Exponent> basis;                  ///< monomials of degree <= order
  std::vector<Exponent> moments;                ///< monomials of degree <= 2 order, moments[0] = 1
  std::map<Exponent, Index> moment_index;
  std::vector<int> localizing_orders;           ///< order - ceil(deg g_j / 2)
  sdp::RealConicProgram program;                ///< variables y_alpha for alpha != 0

  [[nodiscard]] Index moment_matrix_size() const { return static_cast<Index>(basis.size()); }

  /// y_alpha = x^alpha (without y_0).
  [[nodiscard]] RealVector moment_vector(const std::array<double, num_vars>& x) const {
    RealVector y(static_cast<Index>(moments.size()) - 1);
    for (std::size_t a = 1; a < moments.size(); ++a) {
      double t = 1.0;
      for (std::size_t k = 0; k < num_vars; ++k) t *= std::pow(x[k], moments[a][k]);
      y(static_cast<Index>(a) - 1) = t;
    }
    return y;
  }

  /// Moment and localizing matrices C - sum y_i A_i for a moment vector.
  [[nodiscard]] std::vector<RealMatrix> matrices_at(const RealVector& y) const {
    auto out = sdp::apply_adjoint(program, y);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = program.c[k] - out[k];
    return out;
  }
};

inline MomentRelaxation build_relaxation(const PolyConstraintSystem& sys, int order) {
  if (order < 1) throw DomainError("lasserre: order must be at least 1");
  if (degree(sys.objective) > 2 * order) throw DomainError("lasserre: objective degree exceeds 2 * order");
  MomentRelaxation r;
  r.order = order;
  r.basis = monomials(order);
  r.moments = monomials(2 * order);
  for (std::size_t a = 0; a < r.moments.size(); ++a) r.moment_index[r.moments[a]] = static_cast<Index>(a);
  const Index m = static_cast<Index>(r.moments.size()) - 1;
  auto& p = r.program;
  p.b = RealVector::Zero(m);
  p.a.assign(static_cast<std::size_t>(m), {});
  for (const auto& [e, c] : sys.objective) {
    const Index idx = r.moment_index.at(e);
    if (idx == 0) {
      p.objective_offset += c;
    } else {
      p.b(idx - 1) += c;
    }
  }

  // Block entries: L_y(g x^(u+v)) = sum_gamma g_gamma y_(u+v+gamma).
  auto add_block = [&](const Polynomial& g, int sub_order) {
    std::vector<Exponent> rows;
    for (const auto& e : r.basis) {
      if (degree(e) <= sub_order) rows.push_back(e);
    }
    const Index n = static_cast<Index>(rows.size());
    const std::size_t blk = p.add_block(sdp::BlockSpec::Kind::psd, n);
    std::map<Index, std::map<std::pair<Index, Index>, double>> per_var;
    for (Index u = 0; u < n; ++u) {
      for (Index v = u; v < n; ++v) {
        const Exponent uv = add(rows[static_cast<std::size_t>(u)], rows[static_cast<std::size_t>(v)]);
        for (const auto& [gamma, gc] : g) {
          if (gc == 0.0) continue;
          const Index idx = r.moment_index.at(add(uv, gamma));
          if (idx == 0) {
            p.c[blk](u, v) += gc;
            if (u != v) p.c[blk](v, u) += gc;
          } else {
            per_var[idx - 1][{u, v}] -= gc;
          }
        }
      }
    }
    for (auto& [var, entries] : per_var) {
      sdp::BlockCoefficients bc{blk, {}};
      for (const auto& [uv, val] : entries) {
        if (val != 0.0) bc.entries.push_back({uv.first, uv.second, val});
      }
      if (!bc.entries.empty()) p.a[static_cast<std::size_t>(var)].push_back(std::move(bc));
    }
  };
  add_block(constant(1.0), order);
  for (const auto& g : sys.inequalities) {
    const int sub = order - (degree(g) + 1) / 2;
    if (sub < 0) throw DomainError("lasserre: order too small for a constraint");
    r.localizing_orders.push_back(sub);
    add_block(g, sub);
  }
  return r;
}

}  // namespace lasserre

/// Relaxation of the energy-constrained induced trace norm of Lambda - 1 at the given order.
inline lasserre::MomentRelaxation itn_relaxation(const Channel& ch, const EnergyConstraint& ec, int order,
                                                 bool output_constraint = true) {
  return lasserre::build_relaxation(lasserre::itn_system(ch, ec, output_constraint), order);
}

/// Order-3 moment matrices are rank one at the optimum; the solver cannot reach the default tolerance there.
inline constexpr double lasserre_order3_tol = 1e-7;

/// Certified upper bound on sup Tr[M (Lambda(rho) - rho)] under the energy constraint.
inline BoundResult lasserre_itn_upper(const Channel& ch, const EnergyConstraint& ec, int order,
                                      bool output_constraint = true, const sdp::SolverSettings& solver = {}) {
  if (order != 2 && order != 3) throw DomainError("lasserre_itn_upper: order must be 2 or 3");
  const auto relax = itn_relaxation(ch, ec, order, output_constraint);
  sdp::SolverSettings s = solver;
  if (order == 3) {
    s.feas_tol = std::max(s.feas_tol, lasserre_order3_tol);
    s.gap_tol = std::max(s.gap_tol, lasserre_order3_tol);
  }
  const auto r = sdp::solve_conic(relax.program, s);
  // Value of the moment program at the returned moment vector.
  return {r.status, r.dual_objective};
}

/// Moment and localizing matrices generated by the point measure at (rho, M).
inline std::vector<RealMatrix> moment_matrices_at(const Channel& ch, const EnergyConstraint& ec, int order,
                                                  const ComplexMatrix& rho, const ComplexMatrix& m,
                                                  bool output_constraint = true) {
  const auto relax = itn_relaxation(ch, ec, order, output_constraint);
  return relax.matrices_at(relax.moment_vector(lasserre::point_of(rho, m)));
}

struct PadvResult {
  sdp::SolveStatus status = sdp::SolveStatus::optimal;
  double value = std::numeric_limits<double>::quiet_NaN();
  double diamond = std::numeric_limits<double>::quiet_NaN();  ///< numerator norm (or its lower bound)
  double itn = std::numeric_limits<double>::quiet_NaN();      ///< denominator norm (or its bound)

  [[nodiscard]] bool ok() const { return status == sdp::SolveStatus::optimal; }
};

/// (1 + diamond / 2) / (1 + itn_lower / 2) without energy constraint.
inline PadvResult padv_upper(const FamilyPoint& fp, const SeesawSettings& settings) {
  PadvResult res;
  const BoundResult dn = diamond_distance_to_identity(fp.channel, settings.solver);
  const SeesawResult itn = induced_trace_norm_lower(fp.channel, std::nullopt, settings);
  res.diamond = dn.value;
  res.itn = itn.value;
  if (!dn.ok()) res.status = dn.status;
  else if (!itn.ok()) res.status = itn.status;
  res.value = (1.0 + 0.5 * res.diamond) / (1.0 + 0.5 * res.itn);
  return res;
}

/// (1 + ec diamond lower / 2) / (1 + ec itn upper / 2).
inline PadvResult padv_ec_lower(const FamilyPoint& fp, int order, bool output_constraint = true,
                                const sdp::SolverSettings& solver = {}) {
  PadvResult res;
  res.diamond = diamond_norm_ec_lower(fp);
  if (fp.omega >= 0.5) throw DomainError("padv_ec_lower: omega must lie in (0, 1/2)");
  const BoundResult up =
      lasserre_itn_upper(fp.channel, EnergyConstraint::computational(2, fp.omega), order, output_constraint, solver);
  res.status = up.status;
  res.itn = up.value;
  res.value = (1.0 + 0.5 * res.diamond) / (1.0 + 0.5 * res.itn);
  return res;
}

/// Family parameter p maximizing padv_ec_lower at fixed omega.
inline FamilyOptimum padv_ec_best_p(double omega, int order, bool output_constraint = true,
                                    const sdp::SolverSettings& solver = {}, double tol = 1e-4) {
  auto g = [&](double p) {
    const auto r = padv_ec_lower(make_family_point(omega, p), order, output_constraint, solver);
    return r.ok() ? r.value : -std::numeric_limits<double>::infinity();
  };
  return maximize_on_interval(g, 0.0, 0.5, tol, 17);
}

}  // namespace ecpm
