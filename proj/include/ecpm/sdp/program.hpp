#pragma once

// Real block-diagonal conic program in dual (LMI) form:
//
//   maximize  b^T y
//   s.t.      C - sum_i y_i A_i  >= 0   (each block PSD, LP blocks entrywise)
//             E y = f
//
// The associated primal is  min C.X  s.t.  A_i.X = b_i, X >= 0.

#include <cstdio>
#include <fstream>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ecpm/errors.hpp"

namespace ecpm::sdp {

using Index = Eigen::Index;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

enum class SolveStatus { optimal, infeasible, unbounded, numerical_trouble };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::numerical_trouble: return "numerical_trouble";
  }
  return "unknown";
}

struct BlockSpec {
  enum class Kind { psd, lp };
  Kind kind = Kind::psd;
  Index size = 0;
};

/// Entry of a symmetric matrix; row <= col, mirrored when row != col. LP blocks use row == col.
struct SparseEntry {
  Index row;
  Index col;
  double value;
};

struct BlockCoefficients {
  std::size_t block;
  std::vector<SparseEntry> entries;
};

struct RealConicProgram {
  std::vector<BlockSpec> blocks;
  std::vector<RealMatrix> c;  ///< psd: size x size; lp: size x 1
  std::vector<std::vector<BlockCoefficients>> a;  ///< a[i] = nonzero blocks of A_i
  RealVector b;
  RealMatrix eq_lhs;  ///< E (rows x num_vars), may be empty
  RealVector eq_rhs;  ///< f
  double objective_offset = 0.0;

  [[nodiscard]] Index num_vars() const { return b.size(); }

  std::size_t add_block(BlockSpec::Kind kind, Index size) {
    blocks.push_back({kind, size});
    c.push_back(kind == BlockSpec::Kind::psd ? RealMatrix::Zero(size, size) : RealMatrix::Zero(size, 1));
    return blocks.size() - 1;
  }

  void validate() const {
    if (c.size() != blocks.size()) throw DimensionError("conic program: block/constant count mismatch");
    if (a.size() != static_cast<std::size_t>(b.size())) throw DimensionError("conic program: A/b size mismatch");
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const Index n = blocks[k].size;
      const bool lp = blocks[k].kind == BlockSpec::Kind::lp;
      if (c[k].rows() != n || c[k].cols() != (lp ? 1 : n)) throw DimensionError("conic program: constant block size");
    }
    for (const auto& ai : a) {
      for (const auto& bc : ai) {
        if (bc.block >= blocks.size()) throw DimensionError("conic program: block index out of range");
        const Index n = blocks[bc.block].size;
        for (const auto& e : bc.entries) {
          if (e.row < 0 || e.col >= n || e.row > e.col) throw DimensionError("conic program: bad sparse entry");
          if (blocks[bc.block].kind == BlockSpec::Kind::lp && e.row != e.col) {
            throw DimensionError("conic program: off-diagonal entry in LP block");
          }
        }
      }
    }
    if (eq_lhs.rows() > 0 && eq_lhs.cols() != b.size()) throw DimensionError("conic program: E column count");
    if (eq_lhs.rows() != eq_rhs.size()) throw DimensionError("conic program: E/f size mismatch");
  }
};

/// Dense symmetric (psd) or column (lp) representation of sum_i y_i A_i.
inline std::vector<RealMatrix> apply_adjoint(const RealConicProgram& p, const RealVector& y) {
  std::vector<RealMatrix> out;
  out.reserve(p.blocks.size());
  for (const auto& c : p.c) out.push_back(RealMatrix::Zero(c.rows(), c.cols()));
  for (Index i = 0; i < y.size(); ++i) {
    const double yi = y(i);
    if (yi == 0.0) continue;
    for (const auto& bc : p.a[static_cast<std::size_t>(i)]) {
      RealMatrix& m = out[bc.block];
      if (p.blocks[bc.block].kind == BlockSpec::Kind::lp) {
        for (const auto& e : bc.entries) m(e.row, 0) += yi * e.value;
      } else {
        for (const auto& e : bc.entries) {
          m(e.row, e.col) += yi * e.value;
          if (e.row != e.col) m(e.col, e.row) += yi * e.value;
        }
      }
    }
  }
  return out;
}

/// A_i . X for a single constraint.
inline double inner_with(const RealConicProgram& p, std::size_t i, const std::vector<RealMatrix>& x) {
  double s = 0.0;
  for (const auto& bc : p.a[i]) {
    const RealMatrix& m = x[bc.block];
    if (p.blocks[bc.block].kind == BlockSpec::Kind::lp) {
      for (const auto& e : bc.entries) s += e.value * m(e.row, 0);
    } else {
      for (const auto& e : bc.entries) {
        s += e.value * (e.row == e.col ? m(e.row, e.col) : m(e.row, e.col) + m(e.col, e.row));
      }
    }
  }
  return s;
}

inline std::vector<SparseEntry> sparsify(const RealMatrix& m, bool lp, double drop = 0.0) {
  std::vector<SparseEntry> out;
  if (lp) {
    for (Index r = 0; r < m.rows(); ++r)
      if (std::abs(m(r, 0)) > drop) out.push_back({r, r, m(r, 0)});
    return out;
  }
  for (Index c = 0; c < m.cols(); ++c)
    for (Index r = 0; r <= c; ++r)
      if (std::abs(m(r, c)) > drop) out.push_back({r, c, m(r, c)});
  return out;
}

/// Human-readable problem dumps; each solve writes one numbered file into `directory`.
class DumpSink {
 public:
  explicit DumpSink(std::string directory) : dir_(std::move(directory)) {}

  void write(const RealConicProgram& p) {
    std::size_t id;
    {
      std::lock_guard<std::mutex> lock(mu_);
      id = counter_++;
    }
    char name[64];
    std::snprintf(name, sizeof name, "/sdp_%06zu.txt", id);
    std::ofstream os(dir_ + name);
    if (!os) return;
    os.precision(17);
    os << "# maximize b.y  s.t.  C - sum_i y_i A_i >= 0,  E y = f\n";
    os << "vars " << p.num_vars() << "\n";
    os << "blocks";
    for (const auto& bl : p.blocks) os << (bl.kind == BlockSpec::Kind::psd ? " psd:" : " lp:") << bl.size;
    os << "\n";
    os << "objective offset " << p.objective_offset << " :";
    for (Index i = 0; i < p.b.size(); ++i)
      if (p.b(i) != 0.0) os << " y" << i << "*" << p.b(i);
    os << "\n";
    for (Index r = 0; r < p.eq_lhs.rows(); ++r) {
      os << "eq " << r << " :";
      for (Index i = 0; i < p.eq_lhs.cols(); ++i)
        if (p.eq_lhs(r, i) != 0.0) os << " y" << i << "*" << p.eq_lhs(r, i);
      os << " = " << p.eq_rhs(r) << "\n";
    }
    for (std::size_t k = 0; k < p.blocks.size(); ++k) {
      const bool lp = p.blocks[k].kind == BlockSpec::Kind::lp;
      os << "C block " << k << " :";
      for (const auto& e : sparsify(p.c[k], lp)) os << " (" << e.row << "," << e.col << ")=" << e.value;
      os << "\n";
    }
    for (std::size_t i = 0; i < p.a.size(); ++i) {
      os << "A y" << i << " :";
      for (const auto& bc : p.a[i]) {
        os << " [block " << bc.block << "]";
        for (const auto& e : bc.entries) os << " (" << e.row << "," << e.col << ")=" << e.value;
      }
      os << "\n";
    }
  }

 private:
  std::string dir_;
  std::mutex mu_;
  std::size_t counter_ = 0;
};

struct SolverSettings {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iterations = 120;
  double step_fraction = 0.95;
  std::string backend;                 ///< empty: ECPM_SOLVER or "ipm"
  std::shared_ptr<DumpSink> dump;      ///< optional
};

struct ConicResult {
  SolveStatus status = SolveStatus::numerical_trouble;
  RealVector y;
  double primal_objective = 0.0;  ///< C.X + offset
  double dual_objective = 0.0;    ///< b.y + offset
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
};

}  // namespace ecpm::sdp
