#pragma once

#include <random>

#include "tw/geometry.hpp"
#include "tw/modes.hpp"
#include "tw/propagator.hpp"
#include "tw/quadrature.hpp"

namespace support {

inline tw::SpacetimeSpec reference_spec() { return {1, 1.0, 0.0, 1.0, 0.0}; }

/// 1+1, m = 1, tiles of width 1, eps = 0.05, corridor 0.3.
inline tw::TilingLayout reference_layout(int tiles = 4) {
  return tw::build_tiling(reference_spec(), tiles, 1.0, 0.05, 0.3);
}

/// The grid pinned for the CCR check: k_max 40, 64 x 32 = 2048 nodes.
inline tw::MomentumGrid ccr_grid() { return tw::make_momentum_grid(1, 40.0, 64, 32); }

/// Reference grid used everywhere else: k_max 80, 4096 nodes.
inline tw::MomentumGrid reference_grid() { return tw::make_momentum_grid(1, 80.0, 128, 32); }

inline const tw::Propagator& reference_propagator() {
  static const tw::Propagator prop(reference_spec(), reference_grid());
  return prop;
}

inline const tw::LocalModeSet& reference_modes() {
  static const tw::LocalModeSet set = tw::assemble_modes(
      reference_layout(), tw::BumpProfile::smooth_bump(), reference_propagator());
  return set;
}

inline tw::SmearingFunction bump_function(double center, double half_width, int order = 0,
                                          double eps = 0.05, double amplitude = 1.0) {
  tw::SmearingFunction f;
  f.profile = tw::BumpProfile::smooth_bump();
  f.temporal_half_width = eps;
  f.center = Eigen::VectorXd::Constant(1, center);
  f.half_width = Eigen::VectorXd::Constant(1, half_width);
  f.derivative_order = order;
  f.amplitude = amplitude;
  return f;
}

inline tw::SmearingFunction random_function(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return bump_function(-2.0 + 4.0 * u(rng), 0.5 + 0.5 * u(rng), u(rng) < 0.5 ? 0 : 1,
                       0.03 + 0.05 * u(rng), 0.5 + u(rng));
}

}  // namespace support
