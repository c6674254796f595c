#pragma once

#include <cstdlib>
#include <memory>
#include <string>

#include <Eigen/SVD>

#include "ecpm/sdp/interior_point.hpp"
#include "ecpm/sdp/program.hpp"

namespace ecpm::sdp {

/// Backend selected by the ECPM_SOLVER environment variable, "ipm" when unset.
inline std::string default_backend_name() {
  const char* env = std::getenv("ECPM_SOLVER");
  return (env != nullptr && *env != '\0') ? std::string(env) : std::string("ipm");
}

inline std::unique_ptr<ConicBackend> make_backend(const std::string& name) {
  if (name == "ipm") return std::make_unique<InteriorPointBackend>();
  throw DomainError("unknown SDP backend '" + name + "'");
}

namespace solver_detail {

/// Substitute y = y0 + N t to remove E y = f. Returns false when the rows are inconsistent.
inline bool eliminate_equalities(const RealConicProgram& p, RealConicProgram& reduced, RealVector& y0,
                                 RealMatrix& basis) {
  const Index m = p.num_vars();
  Eigen::JacobiSVD<RealMatrix> svd(p.eq_lhs, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > 1e-10 * std::max(1.0, smax)) ++rank;

  const RealMatrix& u = svd.matrixU();
  const RealMatrix& v = svd.matrixV();
  y0 = RealVector::Zero(m);
  for (Index r = 0; r < rank; ++r) y0 += v.col(r) * (u.col(r).dot(p.eq_rhs) / sv(r));
  const double resid = (p.eq_lhs * y0 - p.eq_rhs).norm();
  if (resid > 1e-9 * (1.0 + p.eq_rhs.norm())) return false;
  basis = v.rightCols(m - rank);

  reduced.blocks = p.blocks;
  reduced.b = basis.transpose() * p.b;
  reduced.objective_offset = p.objective_offset + p.b.dot(y0);
  const auto shift = apply_adjoint(p, y0);
  reduced.c.clear();
  for (std::size_t k = 0; k < p.blocks.size(); ++k) reduced.c.push_back(p.c[k] - shift[k]);
  reduced.a.assign(static_cast<std::size_t>(basis.cols()), {});
  reduced.eq_lhs.resize(0, basis.cols());
  reduced.eq_rhs.resize(0);

  double scale = 0.0;
  for (const auto& ai : p.a)
    for (const auto& bc : ai)
      for (const auto& e : bc.entries) scale = std::max(scale, std::abs(e.value));
  const double drop = 1e-14 * std::max(1.0, scale);

  for (Index j = 0; j < basis.cols(); ++j) {
    const auto dense = apply_adjoint(p, basis.col(j));
    for (std::size_t k = 0; k < p.blocks.size(); ++k) {
      auto entries = sparsify(dense[k], p.blocks[k].kind == BlockSpec::Kind::lp, drop);
      if (!entries.empty()) reduced.a[static_cast<std::size_t>(j)].push_back({k, std::move(entries)});
    }
  }
  return true;
}

}  // namespace solver_detail

/// Solve a conic program, eliminating equality rows and variables absent from every block.
inline ConicResult solve_conic(const RealConicProgram& p, const SolverSettings& settings = {}) {
  p.validate();
  if (settings.dump) settings.dump->write(p);
  const auto backend = make_backend(settings.backend.empty() ? default_backend_name() : settings.backend);
  const Index m = p.num_vars();

  RealConicProgram reduced;
  RealVector y0 = RealVector::Zero(m);
  RealMatrix basis = RealMatrix::Identity(m, m);
  const RealConicProgram* work = &p;
  if (p.eq_lhs.rows() > 0) {
    if (!solver_detail::eliminate_equalities(p, reduced, y0, basis)) {
      ConicResult r;
      r.status = SolveStatus::infeasible;
      r.y = RealVector::Zero(m);
      return r;
    }
    work = &reduced;
  }

  // Variables that touch no block: unbounded if they carry objective weight, otherwise fixed at zero.
  std::vector<Index> keep;
  for (Index j = 0; j < work->num_vars(); ++j) {
    if (!work->a[static_cast<std::size_t>(j)].empty()) {
      keep.push_back(j);
    } else if (std::abs(work->b(j)) > 1e-12 * (1.0 + work->b.norm())) {
      ConicResult r;
      r.status = SolveStatus::unbounded;
      r.y = y0;
      return r;
    }
  }
  RealConicProgram compact;
  const RealConicProgram* solve_on = work;
  if (static_cast<Index>(keep.size()) != work->num_vars()) {
    compact.blocks = work->blocks;
    compact.c = work->c;
    compact.objective_offset = work->objective_offset;
    compact.b.resize(static_cast<Index>(keep.size()));
    compact.eq_lhs.resize(0, static_cast<Index>(keep.size()));
    compact.eq_rhs.resize(0);
    for (std::size_t j = 0; j < keep.size(); ++j) {
      compact.b(static_cast<Index>(j)) = work->b(keep[j]);
      compact.a.push_back(work->a[static_cast<std::size_t>(keep[j])]);
    }
    solve_on = &compact;
  }

  ConicResult r;
  if (solve_on->num_vars() == 0) {
    // Nothing to optimize: feasibility of the constant blocks decides.
    bool feasible = true;
    for (std::size_t k = 0; k < solve_on->blocks.size(); ++k) {
      const RealMatrix& c = solve_on->c[k];
      double lmin = 0.0;
      if (solve_on->blocks[k].kind == BlockSpec::Kind::lp) {
        lmin = c.size() ? c.minCoeff() : 0.0;
      } else if (c.size()) {
        lmin = Eigen::SelfAdjointEigenSolver<RealMatrix>(c, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
      }
      feasible = feasible && lmin >= -settings.feas_tol;
    }
    r.status = feasible ? SolveStatus::optimal : SolveStatus::infeasible;
    r.y = RealVector::Zero(0);
    r.primal_objective = r.dual_objective = solve_on->objective_offset;
  } else {
    r = backend->solve(*solve_on, settings);
  }

  RealVector t = RealVector::Zero(work->num_vars());
  if (r.y.size() == static_cast<Index>(keep.size())) {
    for (std::size_t j = 0; j < keep.size(); ++j) t(keep[j]) = r.y(static_cast<Index>(j));
  }
  r.y = y0 + basis * t;
  return r;
}

}  // namespace ecpm::sdp
