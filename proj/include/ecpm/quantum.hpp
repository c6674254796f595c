#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ecpm/linalg.hpp"

namespace ecpm {

inline constexpr double tol_psd = 1e-9;    ///< allowed negative slack on the minimum eigenvalue
inline constexpr double tol_trace = 1e-9;  ///< trace / completeness tolerance
inline constexpr double rank_tol = 1e-8;   ///< Choi eigenvalues below this are dropped

/// Hermitian, PSD, unit-trace matrix together with its tensor layout.
struct DensityMatrix {
  ComplexMatrix mat;
  SubsystemShape shape;

  DensityMatrix(ComplexMatrix m, SubsystemShape s) : mat(std::move(m)), shape(std::move(s)) {
    if (mat.rows() != mat.cols()) throw DimensionError("DensityMatrix: matrix must be square");
    check_shape(shape, mat.rows());
    if (!mat.allFinite()) throw ContractViolation("DensityMatrix: non-finite entries");
    require_hermitian(mat, "DensityMatrix");
    if (std::abs(mat.trace().real() - 1.0) > tol_trace) {
      throw ContractViolation("DensityMatrix: trace differs from one");
    }
    if (min_eigenvalue(mat) < -tol_psd) throw ContractViolation("DensityMatrix: not PSD");
  }

  /// Single-factor density matrix.
  explicit DensityMatrix(const ComplexMatrix& m) : DensityMatrix(m, SubsystemShape{m.rows()}) {}

  static DensityMatrix pure(const ComplexVector& psi, SubsystemShape s) {
    return {projector(psi / psi.norm()), std::move(s)};
  }

  [[nodiscard]] Index dim() const { return mat.rows(); }
};

/// Positive operator-valued measure; elements sum to the identity.
struct Povm {
  std::vector<ComplexMatrix> elements;
  SubsystemShape shape;

  Povm(std::vector<ComplexMatrix> e, SubsystemShape s) : elements(std::move(e)), shape(std::move(s)) {
    if (elements.empty()) throw ContractViolation("Povm: no elements");
    const Index n = shape.total();
    ComplexMatrix sum = ComplexMatrix::Zero(n, n);
    for (const auto& el : elements) {
      if (el.rows() != n || el.cols() != n) throw DimensionError("Povm: element dimension mismatch");
      require_hermitian(el, "Povm element");
      if (min_eigenvalue(el) < -tol_psd) throw ContractViolation("Povm: element not PSD");
      sum += el;
    }
    if ((sum - identity(n)).norm() > tol_trace * std::max<double>(1.0, static_cast<double>(n))) {
      throw ContractViolation("Povm: elements do not sum to the identity");
    }
  }

  [[nodiscard]] std::size_t size() const { return elements.size(); }
  const ComplexMatrix& operator[](std::size_t k) const { return elements[k]; }
};

/// Normalized Choi matrix J = (L (x) 1)(|phi+><phi+|), output factor first.
inline ComplexMatrix choi_from_kraus(const std::vector<ComplexMatrix>& kraus) {
  if (kraus.empty()) throw ContractViolation("choi_from_kraus: empty Kraus list");
  const Index d_out = kraus.front().rows();
  const Index d_in = kraus.front().cols();
  ComplexMatrix j = ComplexMatrix::Zero(d_out * d_in, d_out * d_in);
  for (const auto& k : kraus) {
    if (k.rows() != d_out || k.cols() != d_in) throw DimensionError("choi_from_kraus: ragged Kraus list");
    // (K (x) 1)|phi+> = vec(K) / sqrt(d_in)
    const ComplexVector v = fold(k) / std::sqrt(static_cast<double>(d_in));
    j += projector(v);
  }
  return j;
}

/// Kraus operators from a normalized Choi matrix; one operator per eigenvalue above rank_tol.
inline std::vector<ComplexMatrix> kraus_from_choi(const ComplexMatrix& choi, Index d_in, Index d_out) {
  if (choi.rows() != d_in * d_out || choi.cols() != d_in * d_out) {
    throw DimensionError("kraus_from_choi: Choi dimension mismatch");
  }
  require_hermitian(choi, "kraus_from_choi");
  const auto eig = eig_hermitian(choi);
  if (eig.values.minCoeff() < -rank_tol) throw ContractViolation("kraus_from_choi: Choi matrix is not PSD");
  const ComplexMatrix marginal = partial_trace(choi, {d_out, d_in}, {1});
  if ((marginal - identity(d_in) / static_cast<double>(d_in)).norm() > rank_tol) {
    throw ContractViolation("kraus_from_choi: Choi matrix is not trace preserving");
  }
  std::vector<ComplexMatrix> kraus;
  for (Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values(k) <= rank_tol) continue;
    const ComplexVector v = fix_phase(eig.vectors.col(k));
    kraus.push_back(std::sqrt(eig.values(k) * static_cast<double>(d_in)) * unfold(v, d_out, d_in));
  }
  return kraus;
}

/// Completely positive trace-preserving map held as Kraus list with a cached Choi matrix.
class Channel {
 public:
  explicit Channel(std::vector<ComplexMatrix> kraus, double tp_tol = tol_trace) : kraus_(std::move(kraus)) {
    if (kraus_.empty()) throw ContractViolation("Channel: empty Kraus list");
    d_out_ = kraus_.front().rows();
    d_in_ = kraus_.front().cols();
    ComplexMatrix completeness = ComplexMatrix::Zero(d_in_, d_in_);
    for (const auto& k : kraus_) {
      if (k.rows() != d_out_ || k.cols() != d_in_) throw DimensionError("Channel: ragged Kraus list");
      if (!k.allFinite()) throw ContractViolation("Channel: non-finite Kraus entries");
      completeness += k.adjoint() * k;
    }
    if ((completeness - identity(d_in_)).norm() > tp_tol) {
      throw ContractViolation("Channel: Kraus operators are not trace preserving");
    }
    choi_ = choi_from_kraus(kraus_);
  }

  static Channel from_choi(const ComplexMatrix& choi, Index d_in, Index d_out) {
    return Channel(kraus_from_choi(choi, d_in, d_out), 1e-7);
  }

  static Channel identity_channel(Index d) { return Channel({identity(d)}); }

  static Channel unitary(const ComplexMatrix& u) { return Channel({u}); }

  /// Lambda(rho) = Tr[rho] * 1/d, realized with d^2 Kraus operators.
  static Channel completely_depolarizing(Index d) {
    std::vector<ComplexMatrix> k;
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < d; ++j) {
        ComplexMatrix e = ComplexMatrix::Zero(d, d);
        e(i, j) = 1.0 / std::sqrt(static_cast<double>(d));
        k.push_back(e);
      }
    }
    return Channel(std::move(k));
  }

  [[nodiscard]] const std::vector<ComplexMatrix>& kraus() const { return kraus_; }
  [[nodiscard]] const ComplexMatrix& choi() const { return choi_; }
  [[nodiscard]] Index d_in() const { return d_in_; }
  [[nodiscard]] Index d_out() const { return d_out_; }

  /// Action on an operator of the full input space.
  ComplexMatrix operator()(const ComplexMatrix& x) const {
    ComplexMatrix out = ComplexMatrix::Zero(d_out_, d_out_);
    for (const auto& k : kraus_) out += k * x * k.adjoint();
    return out;
  }

  /// Heisenberg-picture (adjoint) map.
  [[nodiscard]] ComplexMatrix adjoint(const ComplexMatrix& y) const {
    ComplexMatrix out = ComplexMatrix::Zero(d_in_, d_in_);
    for (const auto& k : kraus_) out += k.adjoint() * y * k;
    return out;
  }

 private:
  std::vector<ComplexMatrix> kraus_;
  ComplexMatrix choi_;
  Index d_in_ = 0;
  Index d_out_ = 0;
};

/// Ground state |g> and energy budget omega: <g|rho|g> >= 1 - omega.
struct EnergyConstraint {
  ComplexVector ground;
  double omega;

  EnergyConstraint(ComplexVector g, double w) : ground(std::move(g)), omega(w) {
    if (std::abs(ground.norm() - 1.0) > tol_trace) throw ContractViolation("EnergyConstraint: ground state not normalized");
    if (!(omega >= 0.0 && omega < 0.5)) throw DomainError("EnergyConstraint: omega must lie in [0, 1/2)");
  }

  /// |0> of a d-level system.
  static EnergyConstraint computational(Index d, double w) { return {basis_vector(d, 0), w}; }

  [[nodiscard]] ComplexMatrix ground_projector() const { return projector(ground); }
  [[nodiscard]] double overlap(const ComplexMatrix& rho) const {
    return (ground.adjoint() * rho * ground)(0, 0).real();
  }
  [[nodiscard]] bool satisfied_by(const ComplexMatrix& rho, double slack = 1e-9) const {
    return overlap(rho) >= 1.0 - omega - slack;
  }
};

inline ComplexVector maximally_entangled_vector(Index d) {
  ComplexVector v = ComplexVector::Zero(d * d);
  for (Index i = 0; i < d; ++i) v(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return v;
}

/// |phi+><phi+| with |phi+> = d^{-1/2} sum_i |ii>.
inline DensityMatrix maximally_entangled(Index d) {
  if (d < 2) throw DomainError("maximally_entangled: d must be at least 2");
  return DensityMatrix::pure(maximally_entangled_vector(d), {d, d});
}

/// Embed an operator acting on factor `k` into the full space of `shape`.
inline ComplexMatrix embed_operator(const ComplexMatrix& op, const SubsystemShape& shape, std::size_t k) {
  Index before = 1, after = 1;
  for (std::size_t i = 0; i < k; ++i) before *= shape.dims[i];
  for (std::size_t i = k + 1; i < shape.size(); ++i) after *= shape.dims[i];
  return tensor({identity(before), op, identity(after)});
}

/// (1 (x) Lambda (x) 1)(m) on a raw matrix; returns the output matrix.
inline ComplexMatrix apply_on(const Channel& ch, const ComplexMatrix& m, const SubsystemShape& shape,
                              std::size_t acting_on) {
  check_shape(shape, m.rows());
  if (acting_on >= shape.size()) throw DimensionError("apply: subsystem index out of range");
  if (shape.dims[acting_on] != ch.d_in()) throw DimensionError("apply: channel input dimension mismatch");
  ComplexMatrix out;
  for (const auto& k : ch.kraus()) {
    const ComplexMatrix f = embed_operator(k, shape, acting_on);
    ComplexMatrix term = f * m * f.adjoint();
    if (out.size() == 0) {
      out = term;
    } else {
      out += term;
    }
  }
  return out;
}

inline DensityMatrix apply(const Channel& ch, const DensityMatrix& rho, std::size_t acting_on) {
  SubsystemShape out_shape = rho.shape;
  if (acting_on >= out_shape.size()) throw DimensionError("apply: subsystem index out of range");
  ComplexMatrix out = apply_on(ch, rho.mat, rho.shape, acting_on);
  out_shape.dims[acting_on] = ch.d_out();
  return {hermitian_part(out), out_shape};
}

/// (Lambda (x) 1_M)(sigma) where Lambda: P -> S is given by its normalized Choi matrix
/// J on S (x) P and sigma lives on P (x) M.
inline ComplexMatrix apply_choi(const ComplexMatrix& choi, const ComplexMatrix& sigma, Index d_s, Index d_p,
                                Index d_m) {
  if (choi.rows() != d_s * d_p || sigma.rows() != d_p * d_m) throw DimensionError("apply_choi: dimension mismatch");
  const double dp = static_cast<double>(d_p);
  ComplexMatrix out = ComplexMatrix::Zero(d_s * d_m, d_s * d_m);
  for (Index s = 0; s < d_s; ++s)
    for (Index s2 = 0; s2 < d_s; ++s2)
      for (Index j = 0; j < d_p; ++j)
        for (Index k = 0; k < d_p; ++k) {
          const cplx jv = dp * choi(s * d_p + j, s2 * d_p + k);
          if (jv == cplx(0.0)) continue;
          for (Index m = 0; m < d_m; ++m)
            for (Index m2 = 0; m2 < d_m; ++m2) {
              out(s * d_m + m, s2 * d_m + m2) += jv * sigma(j * d_m + m, k * d_m + m2);
            }
        }
  return out;
}

/// Coefficient C on P (x) M with Tr[C sigma] = Tr[W (Lambda (x) 1)(sigma)] for fixed Choi J.
inline ComplexMatrix choi_functional_wrt_state(const ComplexMatrix& choi, const ComplexMatrix& w, Index d_s, Index d_p,
                                               Index d_m) {
  const double dp = static_cast<double>(d_p);
  ComplexMatrix c = ComplexMatrix::Zero(d_p * d_m, d_p * d_m);
  for (Index s = 0; s < d_s; ++s)
    for (Index s2 = 0; s2 < d_s; ++s2)
      for (Index j = 0; j < d_p; ++j)
        for (Index k = 0; k < d_p; ++k) {
          const cplx jv = dp * choi(s * d_p + j, s2 * d_p + k);
          for (Index m = 0; m < d_m; ++m)
            for (Index m2 = 0; m2 < d_m; ++m2) {
              c(k * d_m + m2, j * d_m + m) += w(s2 * d_m + m2, s * d_m + m) * jv;
            }
        }
  return hermitian_part(c);
}

/// Coefficient D on S (x) P with Tr[D J] = Tr[W (Lambda_J (x) 1)(sigma)] for fixed sigma.
inline ComplexMatrix choi_functional_wrt_choi(const ComplexMatrix& sigma, const ComplexMatrix& w, Index d_s, Index d_p,
                                              Index d_m) {
  const double dp = static_cast<double>(d_p);
  ComplexMatrix c = ComplexMatrix::Zero(d_s * d_p, d_s * d_p);
  for (Index s = 0; s < d_s; ++s)
    for (Index s2 = 0; s2 < d_s; ++s2)
      for (Index j = 0; j < d_p; ++j)
        for (Index k = 0; k < d_p; ++k) {
          cplx acc = 0.0;
          for (Index m = 0; m < d_m; ++m)
            for (Index m2 = 0; m2 < d_m; ++m2) {
              acc += w(s2 * d_m + m2, s * d_m + m) * sigma(j * d_m + m, k * d_m + m2);
            }
          c(s2 * d_p + k, s * d_p + j) += dp * acc;
        }
  return hermitian_part(c);
}

struct HelstromResult {
  double value;  ///< ||rho0 - rho1||_1 = max Tr[(P+ - P-)(rho0 - rho1)]
  Povm povm;     ///< (P+, 1 - P+)
};

/// Optimal two-outcome measurement for maximizing Tr[(Pi0 - Pi1)(rho0 - rho1)].
/// Zero eigenvalues of rho0 - rho1 are assigned to P+.
inline HelstromResult helstrom(const ComplexMatrix& rho0, const ComplexMatrix& rho1, const SubsystemShape& shape) {
  if (rho0.rows() != rho1.rows() || rho0.cols() != rho1.cols()) throw DimensionError("helstrom: shape mismatch");
  const auto eig = eig_hermitian(rho0 - rho1);
  const Index n = rho0.rows();
  ComplexMatrix p_plus = ComplexMatrix::Zero(n, n);
  double value = 0.0;
  for (Index k = 0; k < n; ++k) {
    const double lam = eig.values(k);
    value += std::abs(lam);
    if (lam >= 0.0) p_plus += projector(eig.vectors.col(k));
  }
  p_plus = hermitian_part(p_plus);
  return {value, Povm({p_plus, hermitian_part(identity(n) - p_plus)}, shape)};
}

inline HelstromResult helstrom(const DensityMatrix& rho0, const DensityMatrix& rho1) {
  if (!(rho0.shape == rho1.shape)) throw DimensionError("helstrom: shape mismatch");
  return helstrom(rho0.mat, rho1.mat, rho0.shape);
}

}  // namespace ecpm
