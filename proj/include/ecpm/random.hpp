#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ecpm/linalg.hpp"

namespace ecpm {

using Rng = std::mt19937_64;

/// Deterministic generator from a base seed and a list of stream identifiers.
inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {}) {
  std::vector<std::uint32_t> words;
  words.push_back(static_cast<std::uint32_t>(seed));
  words.push_back(static_cast<std::uint32_t>(seed >> 32));
  for (auto s : stream) {
    words.push_back(static_cast<std::uint32_t>(s));
    words.push_back(static_cast<std::uint32_t>(s >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

inline ComplexMatrix ginibre(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      const double re = n(rng);
      const double im = n(rng);
      g(i, j) = cplx(re, im);
    }
  }
  return g;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the R-phase correction).
inline ComplexMatrix haar_unitary(Index d, Rng& rng) {
  ComplexMatrix g = ginibre(d, d, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < d; ++k) {
    const cplx diag = r(k, k);
    if (std::abs(diag) > 0) q.col(k) *= diag / std::abs(diag);
  }
  return q;
}

inline ComplexVector random_pure_state(Index d, Rng& rng) {
  ComplexVector v = ginibre(d, 1, rng).col(0);
  return v / v.norm();
}

/// Hilbert-Schmidt random density matrix.
inline ComplexMatrix random_density(Index d, Rng& rng) {
  ComplexMatrix g = ginibre(d, d, rng);
  ComplexMatrix rho = g * g.adjoint();
  return hermitian_part(rho / rho.trace().real());
}

inline ComplexMatrix random_hermitian(Index d, Rng& rng) {
  return hermitian_part(ginibre(d, d, rng));
}

/// Kraus operators of a random channel obtained from a Haar-random isometry.
inline std::vector<ComplexMatrix> random_kraus(Index d_in, Index d_out, Index num_kraus, Rng& rng) {
  ComplexMatrix u = haar_unitary(d_out * num_kraus, rng);
  std::vector<ComplexMatrix> kraus;
  for (Index k = 0; k < num_kraus; ++k) {
    kraus.push_back(u.block(k * d_out, 0, d_out, d_in));
  }
  return kraus;
}

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace ecpm
