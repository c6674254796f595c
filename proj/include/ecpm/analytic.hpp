#pragma once

// Closed-form two-qubit family: a pure state psi0 on S (x) M, a rank-two
// mixed state rho1 with the same M-marginal and the same ground-state
// overlap, and the channel on S that maps the first onto the second.

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "ecpm/quantum.hpp"
#include "ecpm/scenario.hpp"

namespace ecpm {

inline constexpr double schmidt_tol = 1e-10;

/// a, b, q as functions of (omega, p); c = 1 - a - b.
struct FamilyParameters {
  double a;
  double b;
  double q;
  double c;
};

inline FamilyParameters family_parameters(double omega, double p) {
  const double q = 2.0 * p * omega - omega + 1.0;
  return {(2.0 * p * omega - 2.0 * omega + 1.0) / q, omega * (1.0 - p) / q, q, p * omega / q};
}

/// sqrt(1-w)|00> + sqrt(w)(sqrt(p)|10> + sqrt(1-p)|11>)
inline ComplexVector family_psi0(double omega, double p) {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = std::sqrt(1.0 - omega);
  v(2) = std::sqrt(omega * p);
  v(3) = std::sqrt(omega * (1.0 - p));
  return v;
}

/// -sqrt(a)|00> + sqrt(b)|10> + sqrt(1-a-b)|11>
inline ComplexVector family_phi(const FamilyParameters& fp) {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = -std::sqrt(fp.a);
  v(2) = std::sqrt(fp.b);
  v(3) = std::sqrt(fp.c);
  return v;
}

/// q|phi><phi| + (1-q)|01><01|
inline ComplexMatrix family_rho1(const FamilyParameters& fp) {
  return fp.q * projector(family_phi(fp)) + (1.0 - fp.q) * projector(basis_vector(4, 1));
}

namespace analytic_detail {

inline void check_family_domain(double omega, double p) {
  if (!(omega > 0.0 && omega <= 0.5)) throw DomainError("family: omega must lie in (0, 1/2]");
  if (!(p >= 0.0 && p <= 0.5)) throw DomainError("family: p must lie in [0, 1/2]");
}

inline double family_distance(double omega, double p) {
  const FamilyParameters fp = family_parameters(omega, p);
  return trace_norm(projector(family_psi0(omega, p)) - family_rho1(fp));
}

}  // namespace analytic_detail

/// Channel P -> S with (L (x) 1_M)(|psi><psi|) = rho, where psi lives on P (x) M and rho on S (x) M
/// share the M-marginal. Kraus operators E_i = sqrt(lambda_i) T_i A^+ with (A (x) 1)|phi+> = psi and
/// (T_i (x) 1)|phi+> = eta_i for the eigenpairs (lambda_i, eta_i) of rho. The orthogonal complement of
/// range(A) is sent to |0>. Throws SingularityError when psi has no Schmidt coefficient above schmidt_tol.
inline Channel channel_from_state_pair(const ComplexVector& psi, Index d_p, Index d_m, const ComplexMatrix& rho,
                                       Index d_s) {
  if (psi.size() != d_p * d_m || rho.rows() != d_s * d_m) throw DimensionError("channel_from_state_pair: dimensions");
  const double root_dm = std::sqrt(static_cast<double>(d_m));
  const ComplexMatrix a = root_dm * unfold(psi, d_p, d_m);
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  // Schmidt coefficients are sv^2 / d_m.
  Index rank = 0;
  while (rank < sv.size() && sv(rank) * sv(rank) / static_cast<double>(d_m) > schmidt_tol) ++rank;
  if (rank == 0) throw SingularityError("channel_from_state_pair: all Schmidt coefficients below schmidt_tol");
  const ComplexMatrix& u = svd.matrixU();
  const ComplexMatrix& v = svd.matrixV();
  ComplexMatrix a_pinv = ComplexMatrix::Zero(d_m, d_p);
  for (Index r = 0; r < rank; ++r) a_pinv += v.col(r) * u.col(r).adjoint() / sv(r);

  const auto eig = eig_hermitian(rho);
  std::vector<ComplexMatrix> kraus;
  for (Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) <= rank_tol) continue;
    const ComplexMatrix t = root_dm * unfold(fix_phase(eig.vectors.col(i)), d_s, d_m);
    kraus.push_back(std::sqrt(eig.values(i)) * t * a_pinv);
  }
  // Restore exact trace preservation on range(A) against rounding, then cover the complement.
  ComplexMatrix s = ComplexMatrix::Zero(d_p, d_p);
  for (const auto& k : kraus) s += k.adjoint() * k;
  ComplexMatrix range_proj = ComplexMatrix::Zero(d_p, d_p);
  for (Index r = 0; r < rank; ++r) range_proj += projector(u.col(r));
  const auto se = eig_hermitian(hermitian_part(s));
  ComplexMatrix s_inv_sqrt = ComplexMatrix::Zero(d_p, d_p);
  for (Index k = 0; k < se.values.size(); ++k) {
    if (se.values(k) > 0.5) s_inv_sqrt += projector(se.vectors.col(k)) / std::sqrt(se.values(k));
  }
  for (auto& k : kraus) k = k * s_inv_sqrt;
  for (Index r = rank; r < d_p; ++r) kraus.push_back(basis_vector(d_s, 0) * u.col(r).adjoint());
  return Channel(std::move(kraus));
}

/// Point (omega, p) of the family with its states and channel.
struct FamilyPoint {
  double omega;
  double p;
  double a;
  double b;
  double q;
  ComplexVector psi0_vector;
  DensityMatrix psi0;
  DensityMatrix rho1;
  Channel channel;
};

/// Preparation channel rho -> Tr[rho] |0><0| on a qubit.
inline Channel ground_preparation_channel() {
  ComplexMatrix k0 = ComplexMatrix::Zero(2, 2), k1 = ComplexMatrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k1(0, 1) = 1.0;
  return Channel({k0, k1});
}

inline Channel family_channel(const ComplexVector& psi0, const ComplexMatrix& rho1) {
  const ComplexMatrix m = unfold(psi0, 2, 2);
  const RealVector sv = Eigen::JacobiSVD<ComplexMatrix>(m).singularValues();
  if (sv(1) * sv(1) <= schmidt_tol) return ground_preparation_channel();
  return channel_from_state_pair(psi0, 2, 2, rho1, 2);
}

inline FamilyPoint make_family_point(double omega, double p) {
  analytic_detail::check_family_domain(omega, p);
  const FamilyParameters fp = family_parameters(omega, p);
  const ComplexVector psi = family_psi0(omega, p);
  const ComplexMatrix rho1 = hermitian_part(family_rho1(fp));
  Channel ch = family_channel(psi, rho1);
  return FamilyPoint{omega,
                     p,
                     fp.a,
                     fp.b,
                     fp.q,
                     psi,
                     DensityMatrix::pure(psi, {2, 2}),
                     DensityMatrix(rho1, {2, 2}),
                     std::move(ch)};
}

/// Channel mapping psi0 to rho1 for a family point.
inline Channel channel_from_family(const FamilyPoint& fp) { return family_channel(fp.psi0_vector, fp.rho1.mat); }

struct FamilyOptimum {
  double value;
  double p_star;
};

/// Maximize g over [lo, hi]: coarse grid, then golden-section refinement to `tol`.
inline FamilyOptimum maximize_on_interval(const std::function<double(double)>& g, double lo, double hi,
                                          double tol = 1e-10, int grid = 64) {
  if (grid < 3) throw DomainError("maximize_on_interval: grid needs at least 3 points");
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  std::vector<double> xs(grid);
  for (int k = 0; k < grid; ++k) {
    xs[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (grid - 1);
    const double v = g(xs[static_cast<std::size_t>(k)]);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  double a = xs[static_cast<std::size_t>(std::max(0, best - 1))];
  double b = xs[static_cast<std::size_t>(std::min(grid - 1, best + 1))];
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double gc = g(c), gd = g(d);
  while (b - a > tol) {
    if (gc >= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - invphi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + invphi * (b - a);
      gd = g(d);
    }
  }
  const double xm = 0.5 * (a + b);
  const double vm = g(xm);
  if (vm >= best_val) return {vm, xm};
  return {best_val, xs[static_cast<std::size_t>(best)]};
}

/// max_p || psi0 - rho1 ||_1 over p in [0, 1/2] (the Helstrom value of the pair).
inline FamilyOptimum icorr_family(double omega) {
  if (!(omega > 0.0 && omega <= 0.5)) throw DomainError("icorr_family: omega must lie in (0, 1/2]");
  return maximize_on_interval([omega](double p) { return analytic_detail::family_distance(omega, p); }, 0.0, 0.5);
}

}  // namespace ecpm
