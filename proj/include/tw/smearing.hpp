#pragma once

#include <complex>
#include <concepts>
#include <vector>

#include <Eigen/Dense>

#include "tw/geometry.hpp"
#include "tw/quadrature.hpp"

namespace tw {

class Propagator;

enum class ProfileFamily { smooth_bump, gaussian_truncated };

/// Shape of the one-dimensional factors of a separable smearing function.
///
/// smooth_bump is exp(-1/(1-s^2)) on |s| < 1, stretched to the tile half
/// width; it is exactly compactly supported. gaussian_truncated is a Gaussian
/// of standard deviation `sigma`, cut to zero beyond r_cut * sigma. Its
/// momentum transform is the untruncated closed form, which misses at most
/// erfc(r_cut / sqrt 2) of the mass (leak_bound()).
struct BumpProfile {
  ProfileFamily family = ProfileFamily::smooth_bump;
  double sigma = 0.0;
  double r_cut = 6.0;

  static BumpProfile smooth_bump() { return {}; }
  static BumpProfile gaussian(double sigma, double r_cut = 6.0) {
    return {ProfileFamily::gaussian_truncated, sigma, r_cut};
  }

  double leak_bound() const;

  /// Throws ConfigError if the profile does not fit inside the tile.
  void validate_for(const Tile& tile) const;
};

const char* to_string(ProfileFamily f);
ProfileFamily profile_family_from_string(const std::string& s);

/// exp(-1/(1-s^2)) for |s| < 1, else 0.
double bump(double s);
double bump_derivative(double s);
/// Integral of bump over [-1, 1] (0.44399381616807...).
double bump_mass();
/// Integral of bump(s) cos(q s) over [-1, 1].
double bump_cosine_transform(double q);

/// Separable, real test function
///   f(t, x) = amplitude * T(t - t0) * prod_d F_d(x_d - c_d),
/// where T is the unit-mass temporal profile chi (derivative_order 0) or
/// -chi' (derivative_order 1, i.e. f = -d/dt of the order-0 function).
struct SmearingFunction {
  BumpProfile profile;
  double t0 = 0.0;
  double temporal_half_width = 0.0;
  Eigen::VectorXd center;
  Eigen::VectorXd half_width;
  double amplitude = 1.0;
  int derivative_order = 0;
  int tile = -1;

  int dimension() const { return static_cast<int>(center.size()); }

  double operator()(double t, const Eigen::VectorXd& x) const;

  /// Temporal factor at tau = t - t0 (chi or -chi').
  double temporal(double tau) const;
  /// Spatial factor along one axis at offset u = x_d - c_d.
  double spatial(int axis, double u) const;

  /// Integral of chi(tau) cos(omega tau); chi is even so this is the full transform.
  double temporal_transform(double omega) const;
  /// Integral of F_d(u) cos(k u) along one axis.
  double spatial_transform(int axis, double k) const;

  /// f^(omega, k) = integral dV f(x) e^{i(omega t - k.x)}, in closed form.
  std::complex<double> momentum_transform(double omega, const Eigen::VectorXd& k) const;
};

template <typename S>
concept MomentumSmearing = requires(const S& s, double w, const Eigen::VectorXd& k) {
  { s.momentum_transform(w, k) } -> std::convertible_to<std::complex<double>>;
};

/// Real linear combination sum_i c_i f_i of smearing functions.
struct SmearingCombination {
  struct Term {
    double coefficient;
    SmearingFunction function;
  };
  std::vector<Term> terms;

  double operator()(double t, const Eigen::VectorXd& x) const;
  std::complex<double> momentum_transform(double omega, const Eigen::VectorXd& k) const;
};

/// A local mode (x, p) = (phi(f1), phi(f2)) with E(f1, f2) = 1.
struct LocalModePair {
  SmearingFunction f1;
  SmearingFunction f2;
  double raw_commutator = 0.0;  ///< c = E(f1, -d_t f1) before rescaling
  double normalization = 1.0;   ///< 1/c, the factor applied to f2
  double lambda = 1.0;
};

/// Builds f1 = chi F and f2 = -d_t(chi F) / c on the tile, with c computed
/// by the propagator so that E(f1, f2) = 1 on its grid.
LocalModePair make_local_mode(const Tile& tile, const BumpProfile& profile,
                              const Propagator& propagator);
LocalModePair make_local_mode(const Tile& tile, const BumpProfile& profile,
                              const SpacetimeSpec& spec, const MomentumGrid& grid);

/// Rebuilds a pair from a stored normalization constant, without re-solving.
LocalModePair restore_local_mode(const Tile& tile, const BumpProfile& profile,
                                 const SpacetimeSpec& spec, double raw_commutator,
                                 double lambda = 1.0);

/// (f1, f2) -> (lambda f1, f2 / lambda).
LocalModePair rescale_mode(const LocalModePair& pair, double lambda);

}  // namespace tw
