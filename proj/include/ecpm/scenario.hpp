#pragma once

#include <array>
#include <cmath>

#include "ecpm/quantum.hpp"

namespace ecpm {

/// Correlators E_x = p(0|x) - p(1|x).
struct Correlators {
  double e0 = 0.0;
  double e1 = 0.0;

  [[nodiscard]] double operator[](int x) const { return x == 0 ? e0 : e1; }
};

/// Conditional table p(b|x) for b, x in {0, 1}.
class Behavior {
 public:
  /// table[b][x] = p(b|x)
  explicit Behavior(const std::array<std::array<double, 2>, 2>& table) : p_(table) {
    for (int x = 0; x < 2; ++x) {
      for (int b = 0; b < 2; ++b) {
        if (!std::isfinite(p_[b][x]) || p_[b][x] < -1e-9 || p_[b][x] > 1.0 + 1e-9) {
          throw ContractViolation("Behavior: probability outside [0, 1]");
        }
      }
      if (std::abs(p_[0][x] + p_[1][x] - 1.0) > 1e-9) throw ContractViolation("Behavior: p(.|x) does not sum to one");
    }
  }

  /// Behavior with p(0|x) = p0[x].
  static Behavior from_p0(double p0_given_0, double p0_given_1) {
    return Behavior({{{p0_given_0, p0_given_1}, {1.0 - p0_given_0, 1.0 - p0_given_1}}});
  }

  [[nodiscard]] double p(int b, int x) const { return p_[b][x]; }
  [[nodiscard]] Correlators correlators() const { return {p_[0][0] - p_[1][0], p_[0][1] - p_[1][1]}; }

 private:
  std::array<std::array<double, 2>, 2> p_;
};

inline void require_omega(double omega, bool allow_half = false) {
  const bool ok = allow_half ? (omega >= 0.0 && omega <= 0.5) : (omega >= 0.0 && omega < 0.5);
  if (!ok) throw DomainError("omega must lie in [0, 1/2" + std::string(allow_half ? "]" : ")"));
}

/// |E_0 - E_1|
inline double icorr(const Behavior& b) {
  const Correlators c = b.correlators();
  return std::abs(c.e0 - c.e1);
}

/// Largest |E_0 - E_1| reachable without shared entanglement: 4 sqrt(omega (1 - omega)).
inline double classical_bound(double omega) {
  require_omega(omega);
  return 4.0 * std::sqrt(omega * (1.0 - omega));
}

/// Lower bound on E_1 for separable devices that are deterministic on input 0: 2(1 - 2 omega)^2 - 1.
inline double idet_bound(double omega) {
  require_omega(omega, true);
  return 2.0 * (1.0 - 2.0 * omega) * (1.0 - 2.0 * omega) - 1.0;
}

namespace scenario_detail {

/// max(0, 1 - 4 omega / denom)^2, taking the limit denom -> 0 as zero.
inline double clipped_factor(double omega, double denom) {
  if (denom <= 0.0) return omega > 0.0 ? 0.0 : 1.0;
  const double f = std::max(0.0, 1.0 - 4.0 * omega / denom);
  return f * f;
}

}  // namespace scenario_detail

/// Membership of (E_0, E_1) in the region of convex mixtures of separable
/// behaviors deterministic on input xstar.
inline bool det_region_contains(const Correlators& c, double omega, int xstar, double slack = 1e-9) {
  require_omega(omega);
  if (xstar != 0 && xstar != 1) throw DomainError("det_region_contains: xstar must be 0 or 1");
  const double e = c[xstar];
  const double other = c[1 - xstar];
  using scenario_detail::clipped_factor;
  const bool upper = (e + 1.0) * clipped_factor(omega, 1.0 + e) - other <= 1.0 + slack;
  const bool lower = (e - 1.0) * clipped_factor(omega, 1.0 - e) - other >= -1.0 - slack;
  return upper && lower;
}

/// p(b|x) = Tr[Pi^b rho^x] for a two-outcome measurement.
inline Behavior behavior_from_strategy(const DensityMatrix& rho0, const DensityMatrix& rho1, const Povm& povm) {
  if (!(rho0.shape == rho1.shape) || !(rho0.shape == povm.shape)) {
    throw DimensionError("behavior_from_strategy: shape mismatch");
  }
  if (povm.size() != 2) throw DimensionError("behavior_from_strategy: POVM must have two outcomes");
  std::array<std::array<double, 2>, 2> t{};
  const std::array<const DensityMatrix*, 2> states = {&rho0, &rho1};
  for (int x = 0; x < 2; ++x) {
    const double p0 = std::clamp(hs_inner(povm[0], states[x]->mat), 0.0, 1.0);
    t[0][x] = p0;
    t[1][x] = 1.0 - p0;
  }
  return Behavior(t);
}

}  // namespace ecpm
