#pragma once

// Dense complex linear algebra used throughout the library.
//
// Index convention: in a tensor product A (x) B the first factor is the slow
// index, i.e. |i>|j> sits at position i * dim(B) + j. Every routine below
// assumes this ordering.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ecpm/errors.hpp"

namespace ecpm {

using Index = Eigen::Index;
using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Relative Frobenius tolerance for Hermiticity checks.
inline constexpr double tol_herm = 1e-9;

/// Ordered list of tensor-factor dimensions, slowest factor first.
struct SubsystemShape {
  std::vector<Index> dims;

  SubsystemShape() = default;
  SubsystemShape(std::initializer_list<Index> d) : dims(d) {}
  explicit SubsystemShape(std::vector<Index> d) : dims(std::move(d)) {}

  [[nodiscard]] Index total() const {
    return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
  }
  [[nodiscard]] std::size_t size() const { return dims.size(); }
  Index operator[](std::size_t k) const { return dims[k]; }

  bool operator==(const SubsystemShape&) const = default;
};

inline std::string to_string(const SubsystemShape& s) {
  std::string out = "[";
  for (std::size_t k = 0; k < s.dims.size(); ++k) {
    if (k) out += ",";
    out += std::to_string(s.dims[k]);
  }
  return out + "]";
}

inline void check_shape(const SubsystemShape& shape, Index dim) {
  for (Index d : shape.dims) {
    if (d <= 0) throw DimensionError("subsystem dimensions must be positive");
  }
  if (shape.total() != dim) {
    throw DimensionError("shape " + to_string(shape) + " does not describe dimension " +
                         std::to_string(dim));
  }
}

inline ComplexMatrix dagger(const ComplexMatrix& m) { return m.adjoint(); }

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return (m + m.adjoint()) * 0.5;
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = tol_herm) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.norm());
  return (m - m.adjoint()).norm() <= tol * scale;
}

inline void require_hermitian(const ComplexMatrix& m, const char* what) {
  if (!is_hermitian(m)) {
    throw ContractViolation(std::string(what) + ": matrix is not Hermitian within tolerance");
  }
}

inline bool all_finite(const ComplexMatrix& m) {
  return m.allFinite();
}

/// Kronecker product.
inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline ComplexMatrix tensor(std::initializer_list<ComplexMatrix> factors) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (const auto& f : factors) out = tensor(out, f);
  return out;
}

inline ComplexMatrix identity(Index d) { return ComplexMatrix::Identity(d, d); }

/// |v><v|
inline ComplexMatrix projector(const ComplexVector& v) { return v * v.adjoint(); }

inline ComplexVector basis_vector(Index d, Index k) {
  ComplexVector v = ComplexVector::Zero(d);
  v(k) = 1.0;
  return v;
}

namespace detail {

inline std::vector<Index> strides_of(const SubsystemShape& shape) {
  std::vector<Index> strides(shape.size(), 1);
  for (std::size_t k = shape.size(); k-- > 1;) strides[k - 1] = strides[k] * shape.dims[k];
  return strides;
}

}  // namespace detail

/// Trace out every factor not listed in `keep`. Kept factors retain their order.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, const SubsystemShape& shape,
                                   const std::set<std::size_t>& keep) {
  if (m.rows() != m.cols()) throw DimensionError("partial_trace: matrix must be square");
  check_shape(shape, m.rows());
  for (std::size_t k : keep) {
    if (k >= shape.size()) throw DimensionError("partial_trace: subsystem index out of range");
  }
  const auto strides = detail::strides_of(shape);
  const Index n = m.rows();

  Index kept_dim = 1;
  for (std::size_t k : keep) kept_dim *= shape.dims[k];

  // Split every global index into (kept index, traced index).
  std::vector<Index> kept_of(n), traced_of(n);
  for (Index idx = 0; idx < n; ++idx) {
    Index kept = 0, traced = 0;
    for (std::size_t k = 0; k < shape.size(); ++k) {
      const Index digit = (idx / strides[k]) % shape.dims[k];
      if (keep.count(k)) {
        kept = kept * shape.dims[k] + digit;
      } else {
        traced = traced * shape.dims[k] + digit;
      }
    }
    kept_of[idx] = kept;
    traced_of[idx] = traced;
  }

  ComplexMatrix out = ComplexMatrix::Zero(kept_dim, kept_dim);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c) {
      if (traced_of[r] == traced_of[c]) out(kept_of[r], kept_of[c]) += m(r, c);
    }
  }
  return out;
}

struct EigenDecomposition {
  RealVector values;     ///< descending
  ComplexMatrix vectors; ///< columns, matched to `values`
};

/// Spectral decomposition of a Hermitian matrix, eigenvalues sorted descending.
inline EigenDecomposition eig_hermitian(const ComplexMatrix& m) {
  require_hermitian(m, "eig_hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m));
  if (es.info() != Eigen::Success) throw InternalError("eig_hermitian: eigensolver failed");
  const Index n = m.rows();
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  const RealVector& ev = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return ev(a) > ev(b); });
  EigenDecomposition out{RealVector(n), ComplexMatrix(n, n)};
  for (Index k = 0; k < n; ++k) {
    out.values(k) = ev(order[k]);
    out.vectors.col(k) = es.eigenvectors().col(order[k]);
  }
  return out;
}

inline RealVector eigenvalues_hermitian(const ComplexMatrix& m) {
  require_hermitian(m, "eigenvalues_hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

inline double min_eigenvalue(const ComplexMatrix& m) {
  return eigenvalues_hermitian(m).minCoeff();
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
inline double trace_norm(const ComplexMatrix& m) {
  require_hermitian(m, "trace_norm");
  return eigenvalues_hermitian(m).cwiseAbs().sum();
}

inline bool is_psd(const ComplexMatrix& m, double tol = 1e-9) {
  return is_hermitian(m) && min_eigenvalue(m) >= -tol;
}

/// [[Re h, -Im h], [Im h, Re h]]. PSD iff h is PSD; each eigenvalue of h appears twice.
inline RealMatrix real_embedding(const ComplexMatrix& h) {
  require_hermitian(h, "real_embedding");
  const Index n = h.rows();
  RealMatrix out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.real();
  out.topRightCorner(n, n) = -h.imag();
  out.bottomLeftCorner(n, n) = h.imag();
  out.bottomRightCorner(n, n) = h.real();
  return out;
}

/// Matrix square root of a PSD matrix (negative eigenvalues clipped to zero).
inline ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
  auto eig = eig_hermitian(m);
  RealVector s = eig.values.cwiseMax(0.0).cwiseSqrt();
  return eig.vectors * s.asDiagonal() * eig.vectors.adjoint();
}

/// Reshape a vector on C^rows (x) C^cols into a rows x cols matrix, v[i*cols + j] -> M(i, j).
inline ComplexMatrix unfold(const ComplexVector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) throw DimensionError("unfold: size mismatch");
  ComplexMatrix out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) out(i, j) = v(i * cols + j);
  }
  return out;
}

inline ComplexVector fold(const ComplexMatrix& m) {
  ComplexVector v(m.size());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  }
  return v;
}

/// Multiply the phase out of `v` so that its largest-magnitude component is real positive.
inline ComplexVector fix_phase(const ComplexVector& v) {
  Index best = 0;
  for (Index k = 1; k < v.size(); ++k) {
    if (std::abs(v(k)) > std::abs(v(best)) + 1e-14) best = k;
  }
  if (std::abs(v(best)) == 0.0) return v;
  return v * (std::conj(v(best)) / std::abs(v(best)));
}

/// Orthonormal (Hilbert-Schmidt) basis of n x n Hermitian matrices.
/// Ordering: diagonal units, then for each i < j the symmetric and antisymmetric pair.
inline std::vector<ComplexMatrix> hermitian_basis(Index n) {
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(n * n));
  for (Index i = 0; i < n; ++i) {
    ComplexMatrix e = ComplexMatrix::Zero(n, n);
    e(i, i) = 1.0;
    out.push_back(std::move(e));
  }
  const double r = 1.0 / std::sqrt(2.0);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      ComplexMatrix s = ComplexMatrix::Zero(n, n);
      s(i, j) = r;
      s(j, i) = r;
      out.push_back(std::move(s));
      ComplexMatrix a = ComplexMatrix::Zero(n, n);
      a(i, j) = cplx(0.0, r);
      a(j, i) = cplx(0.0, -r);
      out.push_back(std::move(a));
    }
  }
  return out;
}

/// Real Hilbert-Schmidt inner product Re Tr[a^dagger b].
inline double hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

}  // namespace ecpm
