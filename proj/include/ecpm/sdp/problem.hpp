#pragma once

// Hermitian-variable SDP front end.
//
// A variable X of dimension n is stored through n^2 real coordinates:
// the diagonal, then for each i < j the pair (Re X_ij, Im X_ij). PSD
// variables and matrix inequalities become real blocks via real_embedding.

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ecpm/linalg.hpp"
#include "ecpm/sdp/solver.hpp"

namespace ecpm::sdp {

enum class VarKind { hermitian_psd, hermitian_free };
enum class Sense { maximize, minimize };

struct Var {
  std::size_t id = 0;
};

/// Tr[coeff X] for one variable.
struct LinTerm {
  Var var;
  ComplexMatrix coeff;
};
using LinExpr = std::vector<LinTerm>;

/// Hermiticity-preserving linear map applied to one variable.
using HermitianMap = std::function<ComplexMatrix(const ComplexMatrix&)>;
struct MapTerm {
  Var var;
  HermitianMap map;
};

struct SdpSolution {
  SolveStatus status = SolveStatus::numerical_trouble;
  double value = 0.0;
  std::map<std::string, ComplexMatrix> assignments;
  double solver_gap = 0.0;
  int iterations = 0;
  double max_violation = 0.0;  ///< worst constraint residual found by the post-solve audit

  [[nodiscard]] bool ok() const { return status == SolveStatus::optimal; }
  [[nodiscard]] const ComplexMatrix& at(const std::string& name) const { return assignments.at(name); }
};

/// Coordinate basis matrices B_j with X = sum_j x_j B_j.
inline std::vector<ComplexMatrix> coordinate_basis(Index n) {
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(n * n));
  for (Index i = 0; i < n; ++i) {
    ComplexMatrix e = ComplexMatrix::Zero(n, n);
    e(i, i) = 1.0;
    out.push_back(std::move(e));
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      ComplexMatrix re = ComplexMatrix::Zero(n, n);
      re(i, j) = 1.0;
      re(j, i) = 1.0;
      out.push_back(std::move(re));
      ComplexMatrix im = ComplexMatrix::Zero(n, n);
      im(i, j) = cplx(0.0, 1.0);
      im(j, i) = cplx(0.0, -1.0);
      out.push_back(std::move(im));
    }
  }
  return out;
}

inline ComplexMatrix from_coordinates(const RealVector& x, Index offset, Index n) {
  ComplexMatrix m(n, n);
  Index k = offset;
  for (Index i = 0; i < n; ++i) m(i, i) = x(k++);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      m(i, j) = cplx(x(k), x(k + 1));
      m(j, i) = cplx(x(k), -x(k + 1));
      k += 2;
    }
  }
  return m;
}

class SdpProblem {
 public:
  Var add_variable(std::string name, Index dim, VarKind kind) {
    if (dim <= 0) throw DimensionError("SdpProblem: variable dimension must be positive");
    for (const auto& v : vars_) {
      if (v.name == name) throw ContractViolation("SdpProblem: duplicate variable name '" + name + "'");
    }
    Index offset = 0;
    if (!vars_.empty()) offset = vars_.back().offset + vars_.back().dim * vars_.back().dim;
    vars_.push_back({std::move(name), dim, kind, offset});
    return Var{vars_.size() - 1};
  }

  void set_objective(Sense sense, LinExpr expr, double constant = 0.0) {
    check_expr(expr);
    sense_ = sense;
    objective_ = std::move(expr);
    objective_constant_ = constant;
  }

  /// sum Tr[C X] == rhs
  void add_equality(LinExpr expr, double rhs, std::string label = {}) {
    check_expr(expr);
    scalar_.push_back({std::move(expr), rhs, Rel::eq, std::move(label)});
  }
  /// sum Tr[C X] >= rhs
  void add_greater_equal(LinExpr expr, double rhs, std::string label = {}) {
    check_expr(expr);
    scalar_.push_back({std::move(expr), rhs, Rel::ge, std::move(label)});
  }
  /// sum Tr[C X] <= rhs
  void add_less_equal(LinExpr expr, double rhs, std::string label = {}) {
    check_expr(expr);
    scalar_.push_back({std::move(expr), rhs, Rel::le, std::move(label)});
  }

  /// sum_k L_k(X_k) + constant >= 0 (PSD).
  void add_lmi(std::vector<MapTerm> terms, ComplexMatrix constant, std::string label = {}) {
    check_matrix_terms(terms, constant, "add_lmi");
    lmis_.push_back({std::move(terms), std::move(constant), std::move(label)});
  }

  /// sum_k L_k(X_k) + constant == 0 (Hermitian-valued, imposed componentwise).
  void add_matrix_equality(std::vector<MapTerm> terms, ComplexMatrix constant, std::string label = {}) {
    check_matrix_terms(terms, constant, "add_matrix_equality");
    matrix_eqs_.push_back({std::move(terms), std::move(constant), std::move(label)});
  }

  [[nodiscard]] Index num_coordinates() const {
    return vars_.empty() ? 0 : vars_.back().offset + vars_.back().dim * vars_.back().dim;
  }

  [[nodiscard]] RealConicProgram compile() const {
    const Index m = num_coordinates();
    RealConicProgram p;
    p.b = RealVector::Zero(m);
    p.a.assign(static_cast<std::size_t>(m), {});

    // Objective (the backend maximizes).
    const double sign = sense_ == Sense::maximize ? 1.0 : -1.0;
    for (const auto& t : objective_) add_functional(p.b, t, sign);
    p.objective_offset = sign * objective_constant_;

    // PSD variables: real_embedding(X) >= 0.
    for (std::size_t v = 0; v < vars_.size(); ++v) {
      if (vars_[v].kind != VarKind::hermitian_psd) continue;
      const Var var{v};
      add_lmi_block(p, {{var, [](const ComplexMatrix& x) { return x; }}}, ComplexMatrix::Zero(vars_[v].dim, vars_[v].dim));
    }
    for (const auto& l : lmis_) add_lmi_block(p, l.terms, l.constant);

    // Scalar rows.
    std::vector<RealVector> eq_rows;
    std::vector<double> eq_rhs;
    std::vector<std::pair<RealVector, double>> ge_rows;  // a.x >= c
    for (const auto& s : scalar_) {
      RealVector row = RealVector::Zero(m);
      for (const auto& t : s.expr) add_functional(row, t, 1.0);
      if (s.rel == Rel::eq) {
        eq_rows.push_back(row);
        eq_rhs.push_back(s.rhs);
      } else if (s.rel == Rel::ge) {
        ge_rows.emplace_back(row, s.rhs);
      } else {
        ge_rows.emplace_back(-row, -s.rhs);
      }
    }
    for (const auto& me : matrix_eqs_) {
      const Index n = me.constant.rows();
      const auto herm = hermitian_basis(n);
      std::vector<RealVector> rows(herm.size(), RealVector::Zero(m));
      for (const auto& t : me.terms) {
        const auto& vd = vars_[t.var.id];
        const auto basis = coordinate_basis(vd.dim);
        for (std::size_t j = 0; j < basis.size(); ++j) {
          const ComplexMatrix image = t.map(basis[j]);
          for (std::size_t q = 0; q < herm.size(); ++q) {
            rows[q](vd.offset + static_cast<Index>(j)) += hs_inner(herm[q], image);
          }
        }
      }
      for (std::size_t q = 0; q < herm.size(); ++q) {
        eq_rows.push_back(rows[q]);
        eq_rhs.push_back(-hs_inner(herm[q], me.constant));
      }
    }
    p.eq_lhs = RealMatrix::Zero(static_cast<Index>(eq_rows.size()), m);
    p.eq_rhs = RealVector::Zero(static_cast<Index>(eq_rows.size()));
    for (std::size_t r = 0; r < eq_rows.size(); ++r) {
      p.eq_lhs.row(static_cast<Index>(r)) = eq_rows[r].transpose();
      p.eq_rhs(static_cast<Index>(r)) = eq_rhs[r];
    }
    if (!ge_rows.empty()) {
      // a.x - c >= 0  <=>  C = -c, A = -a in the LP block.
      const std::size_t blk = p.add_block(BlockSpec::Kind::lp, static_cast<Index>(ge_rows.size()));
      std::vector<std::vector<SparseEntry>> per_var(static_cast<std::size_t>(m));
      for (std::size_t r = 0; r < ge_rows.size(); ++r) {
        p.c[blk](static_cast<Index>(r), 0) = -ge_rows[r].second;
        for (Index j = 0; j < m; ++j) {
          const double a = ge_rows[r].first(j);
          if (a != 0.0) per_var[static_cast<std::size_t>(j)].push_back({static_cast<Index>(r), static_cast<Index>(r), -a});
        }
      }
      for (Index j = 0; j < m; ++j) {
        auto& e = per_var[static_cast<std::size_t>(j)];
        if (!e.empty()) p.a[static_cast<std::size_t>(j)].push_back({blk, std::move(e)});
      }
    }
    return p;
  }

  [[nodiscard]] SdpSolution solve(const SolverSettings& settings = {}) const {
    const RealConicProgram p = compile();
    const ConicResult r = solve_conic(p, settings);
    SdpSolution sol;
    sol.status = r.status;
    sol.iterations = r.iterations;
    sol.solver_gap = std::abs(r.primal_objective - r.dual_objective);
    const double sign = sense_ == Sense::maximize ? 1.0 : -1.0;
    sol.value = sign * r.dual_objective;
    if (r.y.size() != num_coordinates()) return sol;
    for (const auto& v : vars_) sol.assignments[v.name] = from_coordinates(r.y, v.offset, v.dim);
    if (sol.status == SolveStatus::optimal) {
      sol.value = evaluate_objective(sol);
      sol.max_violation = audit(sol);
      if (sol.max_violation > 1e-7) sol.status = SolveStatus::numerical_trouble;
    }
    return sol;
  }

  [[nodiscard]] double evaluate_objective(const SdpSolution& sol) const {
    double v = objective_constant_;
    for (const auto& t : objective_) v += hs_inner(t.coeff, sol.at(vars_[t.var.id].name));
    return v;
  }

  /// Largest constraint violation of an assignment, scaled by the size of the data.
  [[nodiscard]] double audit(const SdpSolution& sol) const {
    double worst = 0.0;
    auto value_of = [&](const Var& v) -> const ComplexMatrix& { return sol.at(vars_[v.id].name); };
    for (const auto& v : vars_) {
      if (v.kind == VarKind::hermitian_psd) {
        worst = std::max(worst, -min_eigenvalue(sol.at(v.name)) / std::max(1.0, sol.at(v.name).norm()));
      }
    }
    for (const auto& l : lmis_) {
      ComplexMatrix s = l.constant;
      double scale = std::max(1.0, l.constant.norm());
      for (const auto& t : l.terms) {
        const ComplexMatrix img = t.map(value_of(t.var));
        scale = std::max(scale, img.norm());
        s += img;
      }
      worst = std::max(worst, -min_eigenvalue(hermitian_part(s)) / scale);
    }
    for (const auto& me : matrix_eqs_) {
      ComplexMatrix s = me.constant;
      double scale = std::max(1.0, me.constant.norm());
      for (const auto& t : me.terms) {
        const ComplexMatrix img = t.map(value_of(t.var));
        scale = std::max(scale, img.norm());
        s += img;
      }
      worst = std::max(worst, s.norm() / scale);
    }
    for (const auto& sc : scalar_) {
      double lhs = 0.0, scale = std::max(1.0, std::abs(sc.rhs));
      for (const auto& t : sc.expr) {
        const double term = hs_inner(t.coeff, value_of(t.var));
        lhs += term;
        scale = std::max(scale, std::abs(term));
      }
      double viol = 0.0;
      if (sc.rel == Rel::eq) viol = std::abs(lhs - sc.rhs);
      if (sc.rel == Rel::ge) viol = std::max(0.0, sc.rhs - lhs);
      if (sc.rel == Rel::le) viol = std::max(0.0, lhs - sc.rhs);
      worst = std::max(worst, viol / scale);
    }
    return worst;
  }

 private:
  enum class Rel { eq, ge, le };
  struct VarDecl {
    std::string name;
    Index dim;
    VarKind kind;
    Index offset;
  };
  struct Scalar {
    LinExpr expr;
    double rhs;
    Rel rel;
    std::string label;
  };
  struct MatrixConstraint {
    std::vector<MapTerm> terms;
    ComplexMatrix constant;
    std::string label;
  };

  void check_var(const Var& v) const {
    if (v.id >= vars_.size()) throw ContractViolation("SdpProblem: reference to undeclared variable");
  }

  void check_expr(const LinExpr& expr) const {
    for (const auto& t : expr) {
      check_var(t.var);
      const Index n = vars_[t.var.id].dim;
      if (t.coeff.rows() != n || t.coeff.cols() != n) throw DimensionError("SdpProblem: coefficient dimension mismatch");
      require_hermitian(t.coeff, "SdpProblem coefficient");
    }
  }

  void check_matrix_terms(const std::vector<MapTerm>& terms, const ComplexMatrix& constant, const char* what) const {
    require_hermitian(constant, what);
    for (const auto& t : terms) {
      check_var(t.var);
      const Index n = vars_[t.var.id].dim;
      const ComplexMatrix probe = t.map(ComplexMatrix::Identity(n, n));
      if (probe.rows() != constant.rows() || probe.cols() != constant.cols()) {
        throw DimensionError(std::string(what) + ": map output dimension mismatch");
      }
    }
  }

  void add_functional(RealVector& row, const LinTerm& t, double sign) const {
    const auto& vd = vars_[t.var.id];
    const Index n = vd.dim;
    Index k = vd.offset;
    for (Index i = 0; i < n; ++i) row(k++) += sign * t.coeff(i, i).real();
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        row(k++) += sign * 2.0 * t.coeff(i, j).real();
        row(k++) += sign * 2.0 * t.coeff(i, j).imag();
      }
    }
  }

  void add_lmi_block(RealConicProgram& p, const std::vector<MapTerm>& terms, const ComplexMatrix& constant) const {
    const Index n = constant.rows();
    const std::size_t blk = p.add_block(BlockSpec::Kind::psd, 2 * n);
    p.c[blk] = real_embedding(constant);
    std::map<Index, RealMatrix> coeffs;
    for (const auto& t : terms) {
      const auto& vd = vars_[t.var.id];
      const auto basis = coordinate_basis(vd.dim);
      for (std::size_t j = 0; j < basis.size(); ++j) {
        const ComplexMatrix image = t.map(basis[j]);
        const Index var = vd.offset + static_cast<Index>(j);
        auto it = coeffs.find(var);
        if (it == coeffs.end()) {
          coeffs.emplace(var, -real_embedding(hermitian_part(image)));
        } else {
          it->second -= real_embedding(hermitian_part(image));
        }
      }
    }
    for (const auto& [var, mat] : coeffs) {
      auto entries = sparsify(mat, false, 1e-15 * std::max(1.0, mat.cwiseAbs().maxCoeff()));
      if (!entries.empty()) p.a[static_cast<std::size_t>(var)].push_back({blk, std::move(entries)});
    }
  }

  std::vector<VarDecl> vars_;
  Sense sense_ = Sense::maximize;
  LinExpr objective_;
  double objective_constant_ = 0.0;
  std::vector<Scalar> scalar_;
  std::vector<MatrixConstraint> lmis_;
  std::vector<MatrixConstraint> matrix_eqs_;
};

}  // namespace ecpm::sdp
