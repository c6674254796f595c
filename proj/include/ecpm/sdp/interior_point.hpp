#pragma once

// Infeasible-start primal-dual path-following method (HKM search direction,
// Mehrotra predictor-corrector) for RealConicProgram without equality rows.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "ecpm/sdp/program.hpp"

namespace ecpm::sdp {

namespace ipm_detail {

using Blocks = std::vector<RealMatrix>;

struct BlockConstraint {
  Index var;
  const std::vector<SparseEntry>* entries;
};

inline double dot(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

inline double norm(const Blocks& a) {
  double s = 0.0;
  for (const auto& m : a) s += m.squaredNorm();
  return std::sqrt(s);
}

/// Largest alpha with x + alpha dx staying in the cone (infinity when unbounded).
inline double max_step_psd(const RealMatrix& x, const RealMatrix& dx) {
  Eigen::LLT<RealMatrix> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  const auto l = llt.matrixL();
  RealMatrix w = l.solve(dx);
  w = l.solve(w.transpose().eval());
  w = 0.5 * (w + w.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(w, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

inline double max_step_lp(const RealMatrix& x, const RealMatrix& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < x.rows(); ++j) {
    if (dx(j, 0) < 0.0) a = std::min(a, -x(j, 0) / dx(j, 0));
  }
  return a;
}

}  // namespace ipm_detail

class ConicBackend {
 public:
  virtual ~ConicBackend() = default;
  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual ConicResult solve(const RealConicProgram& p, const SolverSettings& s) const = 0;
};

class InteriorPointBackend final : public ConicBackend {
 public:
  [[nodiscard]] std::string name() const override { return "ipm"; }

  [[nodiscard]] ConicResult solve(const RealConicProgram& p, const SolverSettings& s) const override {
    using namespace ipm_detail;
    const Index m = p.num_vars();
    const std::size_t nb = p.blocks.size();
    auto is_lp = [&](std::size_t k) { return p.blocks[k].kind == BlockSpec::Kind::lp; };

    ConicResult res;
    res.y = RealVector::Zero(m);

    std::vector<std::vector<BlockConstraint>> by_block(nb);
    for (Index i = 0; i < m; ++i) {
      for (const auto& bc : p.a[static_cast<std::size_t>(i)]) by_block[bc.block].push_back({i, &bc.entries});
    }
    std::vector<RealMatrix> lp_dense(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      if (!is_lp(k)) continue;
      lp_dense[k] = RealMatrix::Zero(m, p.blocks[k].size);
      for (const auto& bcon : by_block[k])
        for (const auto& e : *bcon.entries) lp_dense[k](bcon.var, e.row) += e.value;
    }

    // Starting point scaled to the data.
    Blocks x(nb), z(nb);
    double total_dim = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
      const Index n = p.blocks[k].size;
      total_dim += static_cast<double>(n);
      std::vector<double> anorm(static_cast<std::size_t>(m), 0.0);
      for (const auto& bcon : by_block[k]) {
        double t = 0.0;
        for (const auto& e : *bcon.entries) t += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
        anorm[static_cast<std::size_t>(bcon.var)] += t;
      }
      double xi = std::max(10.0, std::sqrt(static_cast<double>(n)));
      double eta = std::max(xi, p.c[k].norm());
      for (const auto& bcon : by_block[k]) {
        const double an = std::sqrt(anorm[static_cast<std::size_t>(bcon.var)]);
        xi = std::max(xi, static_cast<double>(n) * (1.0 + std::abs(p.b(bcon.var))) / (1.0 + an));
        eta = std::max(eta, an);
      }
      if (is_lp(k)) {
        x[k] = RealMatrix::Constant(n, 1, xi);
        z[k] = RealMatrix::Constant(n, 1, eta);
      } else {
        x[k] = xi * RealMatrix::Identity(n, n);
        z[k] = eta * RealMatrix::Identity(n, n);
      }
    }
    RealVector y = RealVector::Zero(m);

    const double bnorm = p.b.norm();
    double cnorm = 0.0;
    for (const auto& c : p.c) cnorm += c.squaredNorm();
    cnorm = std::sqrt(cnorm);

    double best_merit = std::numeric_limits<double>::infinity();
    int best_iteration = 0;
    int stalls = 0;
    auto record = [&](double pinf, double dinf, double rgap, double pobj, double dobj, int it) {
      const double merit = std::max({pinf, dinf, rgap});
      if (merit < best_merit) {
        best_merit = merit;
        best_iteration = it;
        res.y = y;
        res.primal_objective = pobj + p.objective_offset;
        res.dual_objective = dobj + p.objective_offset;
        res.primal_infeasibility = pinf;
        res.dual_infeasibility = dinf;
        res.relative_gap = rgap;
      }
      res.iterations = it;
    };

    for (int it = 0; it <= s.max_iterations; ++it) {
      // Residuals and objective values.
      const Blocks ay = apply_adjoint(p, y);
      Blocks rd(nb);
      for (std::size_t k = 0; k < nb; ++k) rd[k] = p.c[k] - z[k] - ay[k];
      RealVector ax(m);
      for (Index i = 0; i < m; ++i) ax(i) = inner_with(p, static_cast<std::size_t>(i), x);
      const RealVector rp = p.b - ax;
      const double pobj = dot(p.c, x);
      const double dobj = p.b.dot(y);
      const double xz = dot(x, z);
      const double mu = xz / total_dim;

      const double pinf = rp.norm() / (1.0 + bnorm);
      const double dinf = norm(rd) / (1.0 + cnorm);
      const double rgap = std::max(xz, std::abs(pobj - dobj)) / (1.0 + std::abs(pobj) + std::abs(dobj));
      record(pinf, dinf, rgap, pobj, dobj, it);
      if (pinf <= s.feas_tol && dinf <= s.feas_tol && rgap <= s.gap_tol) {
        res.status = SolveStatus::optimal;
        return res;
      }

      // Farkas-type certificates from diverging iterates.
      if (pobj < 0.0 && ax.norm() <= 1e-8 * (-pobj) && norm(x) > 1e6) {
        res.status = SolveStatus::infeasible;
        return res;
      }
      if (dobj > 1e6 * (1.0 + cnorm)) {
        bool ray = true;
        for (std::size_t k = 0; k < nb && ray; ++k) {
          const RealMatrix neg = -ay[k] / dobj;
          if (is_lp(k)) {
            ray = neg.minCoeff() >= -1e-7;
          } else {
            Eigen::SelfAdjointEigenSolver<RealMatrix> es(neg, Eigen::EigenvaluesOnly);
            ray = es.eigenvalues().minCoeff() >= -1e-7;
          }
        }
        if (ray) {
          res.status = SolveStatus::unbounded;
          return res;
        }
      }
      if (it == s.max_iterations || it - best_iteration >= 15) break;

      // Inverse slacks.
      Blocks zinv(nb);
      bool ok = true;
      for (std::size_t k = 0; k < nb && ok; ++k) {
        if (is_lp(k)) {
          zinv[k] = z[k].cwiseInverse();
        } else {
          Eigen::LLT<RealMatrix> llt(z[k]);
          ok = llt.info() == Eigen::Success;
          if (ok) zinv[k] = llt.solve(RealMatrix::Identity(z[k].rows(), z[k].cols()));
        }
      }
      if (!ok) break;

      // Schur complement M_ik = Tr[A_i X A_k Z^{-1}].
      RealMatrix schur = RealMatrix::Zero(m, m);
      for (std::size_t k = 0; k < nb; ++k) {
        if (is_lp(k)) {
          const RealVector w = x[k].col(0).cwiseProduct(zinv[k].col(0));
          schur.noalias() += lp_dense[k] * w.asDiagonal() * lp_dense[k].transpose();
          continue;
        }
        const Index n = p.blocks[k].size;
        const auto& cons = by_block[k];
        RealMatrix g(n, n);
        for (std::size_t pk = 0; pk < cons.size(); ++pk) {
          const auto& ek = *cons[pk].entries;
          if (static_cast<Index>(ek.size()) < n) {
            g.setZero();
            for (const auto& e : ek) {
              g.noalias() += e.value * x[k].col(e.row) * zinv[k].row(e.col);
              if (e.row != e.col) g.noalias() += e.value * x[k].col(e.col) * zinv[k].row(e.row);
            }
          } else {
            RealMatrix ad = RealMatrix::Zero(n, n);
            for (const auto& e : ek) {
              ad(e.row, e.col) += e.value;
              if (e.row != e.col) ad(e.col, e.row) += e.value;
            }
            g.noalias() = x[k] * ad * zinv[k];
          }
          for (std::size_t pi = 0; pi <= pk; ++pi) {
            double acc = 0.0;
            for (const auto& e : *cons[pi].entries) {
              acc += e.value * (e.row == e.col ? g(e.row, e.row) : g(e.row, e.col) + g(e.col, e.row));
            }
            schur(cons[pi].var, cons[pk].var) += acc;
            if (pi != pk) schur(cons[pk].var, cons[pi].var) += acc;
          }
        }
      }
      schur = 0.5 * (schur + schur.transpose()).eval();

      // Diagonally scaled Cholesky; a growing shift when it fails, then iterative refinement.
      RealVector dscale = schur.diagonal().cwiseAbs().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
      const RealMatrix scaled = dscale.asDiagonal() * schur * dscale.asDiagonal();
      Eigen::LLT<RealMatrix> llt(scaled);
      bool use_llt = llt.info() == Eigen::Success;
      for (double reg = 1e-15; !use_llt && reg < 1e-3; reg *= 10.0) {
        llt.compute(scaled + reg * RealMatrix::Identity(m, m));
        use_llt = llt.info() == Eigen::Success;
      }
      if (!use_llt) break;
      auto solve_schur = [&](const RealVector& h) -> RealVector {
        RealVector v = dscale.cwiseProduct(llt.solve(dscale.cwiseProduct(h)));
        for (int pass = 0; pass < 3; ++pass) {
          const RealVector r = h - schur * v;
          if (r.norm() <= 1e-15 * h.norm()) break;
          v += dscale.cwiseProduct(llt.solve(dscale.cwiseProduct(r)));
        }
        return v;
      };

      // Direction for a given complementarity target K = sigma mu Z^-1 - X - corr.
      auto direction = [&](const Blocks& kt, Blocks& dx, RealVector& dy, Blocks& dz) {
        Blocks q(nb);
        for (std::size_t k = 0; k < nb; ++k) {
          if (is_lp(k)) {
            q[k] = kt[k] - x[k].cwiseProduct(rd[k]).cwiseProduct(zinv[k]);
          } else {
            q[k] = kt[k] - x[k] * rd[k] * zinv[k];
          }
        }
        RealVector h(m);
        for (Index i = 0; i < m; ++i) h(i) = rp(i) - inner_with(p, static_cast<std::size_t>(i), q);
        dy = solve_schur(h);
        const Blocks ady = apply_adjoint(p, dy);
        dz.resize(nb);
        dx.resize(nb);
        for (std::size_t k = 0; k < nb; ++k) {
          dz[k] = rd[k] - ady[k];
          if (is_lp(k)) {
            dx[k] = kt[k] - x[k].cwiseProduct(dz[k]).cwiseProduct(zinv[k]);
          } else {
            RealMatrix t = kt[k] - x[k] * dz[k] * zinv[k];
            dx[k] = 0.5 * (t + t.transpose());
          }
        }
      };
      auto steps = [&](const Blocks& dx, const Blocks& dz) {
        double ap = std::numeric_limits<double>::infinity(), ad = ap;
        for (std::size_t k = 0; k < nb; ++k) {
          ap = std::min(ap, is_lp(k) ? max_step_lp(x[k], dx[k]) : max_step_psd(x[k], dx[k]));
          ad = std::min(ad, is_lp(k) ? max_step_lp(z[k], dz[k]) : max_step_psd(z[k], dz[k]));
        }
        return std::pair<double, double>{ap, ad};
      };

      // Predictor.
      Blocks k_aff(nb);
      for (std::size_t k = 0; k < nb; ++k) k_aff[k] = -x[k];
      Blocks dxp, dzp;
      RealVector dyp;
      direction(k_aff, dxp, dyp, dzp);
      auto [ap_aff, ad_aff] = steps(dxp, dzp);
      ap_aff = std::min(1.0, ap_aff);
      ad_aff = std::min(1.0, ad_aff);
      double xz_aff = 0.0;
      for (std::size_t k = 0; k < nb; ++k) {
        xz_aff += (x[k] + ap_aff * dxp[k]).cwiseProduct(z[k] + ad_aff * dzp[k]).sum();
      }
      double sigma = std::pow(std::max(0.0, xz_aff) / xz, 3);
      sigma = std::clamp(sigma, 0.0, 1.0);

      // Corrector.
      Blocks k_cor(nb);
      for (std::size_t k = 0; k < nb; ++k) {
        if (is_lp(k)) {
          k_cor[k] = sigma * mu * zinv[k] - x[k] - dxp[k].cwiseProduct(dzp[k]).cwiseProduct(zinv[k]);
        } else {
          k_cor[k] = sigma * mu * zinv[k] - x[k] - dxp[k] * dzp[k] * zinv[k];
        }
      }
      Blocks dx, dz;
      RealVector dy;
      direction(k_cor, dx, dy, dz);
      auto [ap, ad] = steps(dx, dz);
      ap = std::min(1.0, s.step_fraction * ap);
      ad = std::min(1.0, s.step_fraction * ad);
      if (!std::isfinite(ap) || !std::isfinite(ad) || !dy.allFinite()) break;

      for (std::size_t k = 0; k < nb; ++k) {
        x[k] += ap * dx[k];
        z[k] += ad * dz[k];
      }
      y += ad * dy;

      if (ap < 1e-10 && ad < 1e-10) {
        if (++stalls >= 3) break;
      } else {
        stalls = 0;
      }
    }

    res.status = best_merit <= 100.0 * std::max(s.feas_tol, s.gap_tol) ? SolveStatus::optimal
                                                                       : SolveStatus::numerical_trouble;
    return res;
  }
};

}  // namespace ecpm::sdp
