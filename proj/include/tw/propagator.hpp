#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "tw/errors.hpp"
#include "tw/geometry.hpp"
#include "tw/parallel.hpp"
#include "tw/quadrature.hpp"
#include "tw/smearing.hpp"

namespace tw {

// --- field states -------------------------------------------------------------

struct Vacuum {};

/// KMS state at inverse temperature beta in the rest frame of the slab.
struct Thermal {
  double beta = 1.0;
};

/// Vacuum displaced by alpha_k on local mode k, so that
/// <(x_k, p_k)> = sqrt(2 hbar) (Re alpha_k, Im alpha_k).
struct Coherent {
  std::vector<std::complex<double>> alpha;
};

/// Gaussian wavepacket G(k) = C exp(-|k - k0|^2 / (4 sigma_k^2)) exp(-i k.x0),
/// so |G|^2 has standard deviation sigma_k around k0 and the packet is
/// centred at x0 in position space.
struct OneParticleProfile {
  Eigen::VectorXd k0;
  Eigen::VectorXd x0;
  double sigma_k = 1.0;
  double norm_constant = 1.0;

  std::complex<double> operator()(const Eigen::VectorXd& k) const;

  /// Integral of |G|^2 on the grid.
  double norm_squared(const MomentumGrid& grid) const;

  /// Profile with norm_constant chosen so that norm_squared(grid) == 1.
  static OneParticleProfile normalized(Eigen::VectorXd k0, double sigma_k,
                                       const MomentumGrid& grid, Eigen::VectorXd x0 = {});
};

struct OneParticle {
  OneParticleProfile profile;
};

using FieldState = std::variant<Vacuum, Thermal, Coherent, OneParticle>;

std::string state_tag(const FieldState& state);
bool is_gaussian(const FieldState& state);

// --- propagator engine -------------------------------------------------------

struct SmearedValue {
  std::complex<double> value;
  double tail_fraction = 0.0;      ///< share of |integrand| in the outer 10% of k
  bool bandwidth_warning = false;  ///< tail_fraction > 1e-6
};

/// Momentum-space quadrature of smeared two-point objects.
///
/// Conventions: u_k(x) = e^{-i w t + i k.x} / sqrt((2 pi)^n 2 w) and
/// f^(w, k) = integral f(x) e^{i(w t - k.x)}, so that
///   W(f, g) = <phi(f) phi(g)> = hbar integral d^n k f^* g^ / ((2 pi)^n 2 w)
/// evaluated on shell. The commutator is [phi(f), phi(g)] = i hbar E(f, g)
/// with E = (2/hbar) Im W.
///
/// After construction the engine is immutable and safe to share between threads.
class Propagator {
 public:
  static constexpr double kInfraredFloor = 1e-6;
  static constexpr double kTailTolerance = 1e-6;

  Propagator(SpacetimeSpec spec, MomentumGrid grid);

  const SpacetimeSpec& spec() const { return spec_; }
  const MomentumGrid& grid() const { return grid_; }
  const Eigen::ArrayXd& omega() const { return omega_; }
  /// w_i / ((2 pi)^n 2 omega_i)
  const Eigen::ArrayXd& measure() const { return measure_; }
  Eigen::VectorXd node(Eigen::Index i) const { return grid_.k.col(i); }

  /// On-shell samples f^(omega_i, k_i).
  Eigen::ArrayXcd sample(const SmearingFunction& f) const;
  Eigen::ArrayXcd sample(const SmearingCombination& f) const;
  template <MomentumSmearing S>
  Eigen::ArrayXcd sample(const S& f) const;

  /// Vacuum W from on-shell samples.
  std::complex<double> wightman(const Eigen::ArrayXcd& a, const Eigen::ArrayXcd& b) const;
  /// hbar sum mu [(1 + n) a^* b + n a b^*], n = 1 / (e^{beta w} - 1).
  std::complex<double> thermal(const Eigen::ArrayXcd& a, const Eigen::ArrayXcd& b,
                               double beta) const;
  double tail_fraction(const Eigen::ArrayXcd& a, const Eigen::ArrayXcd& b) const;

  /// Full matrix W(f_A, f_B) for a vacuum or thermal state.
  Eigen::MatrixXcd two_point_matrix(const std::vector<Eigen::ArrayXcd>& samples,
                                    const FieldState& state) const;

  /// Throws InfraredDivergenceError for 1+1 dimensions near m = 0 when both
  /// transforms are nonzero at k = 0.
  template <MomentumSmearing F, MomentumSmearing G>
  void check_infrared(const F& f, const G& g) const;

 private:
  SpacetimeSpec spec_;
  MomentumGrid grid_;
  Eigen::ArrayXd omega_;
  Eigen::ArrayXd measure_;
  Eigen::Array<bool, Eigen::Dynamic, 1> tail_mask_;
};

template <MomentumSmearing S>
Eigen::ArrayXcd Propagator::sample(const S& f) const {
  Eigen::ArrayXcd out(grid_.size());
  for (Eigen::Index i = 0; i < grid_.size(); ++i)
    out[i] = f.momentum_transform(omega_[i], grid_.k.col(i));
  return out;
}

template <MomentumSmearing F, MomentumSmearing G>
void Propagator::check_infrared(const F& f, const G& g) const {
  if (spec_.dimension != 1 || spec_.mass > kInfraredFloor) return;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  const double fa = std::abs(f.momentum_transform(0.0, zero));
  const double ga = std::abs(g.momentum_transform(0.0, zero));
  if (fa > 1e-12 && ga > 1e-12)
    throw InfraredDivergenceError(
        "1+1 dimensional mode integral diverges at m ~ 0 for smearings with nonzero mean");
}

/// Vacuum W(f, g) with a bandwidth diagnostic.
template <MomentumSmearing F, MomentumSmearing G>
SmearedValue wightman_smeared(const Propagator& prop, const F& f, const G& g) {
  prop.check_infrared(f, g);
  const Eigen::ArrayXcd a = prop.sample(f);
  const Eigen::ArrayXcd b = prop.sample(g);
  SmearedValue v{prop.wightman(a, b), prop.tail_fraction(a, b), false};
  v.bandwidth_warning = v.tail_fraction > Propagator::kTailTolerance;
  return v;
}

/// E(f, g) = (2/hbar) Im W(f, g).
template <MomentumSmearing F, MomentumSmearing G>
double causal_smeared(const Propagator& prop, const F& f, const G& g) {
  prop.check_infrared(f, g);
  return 2.0 / prop.spec().hbar * prop.wightman(prop.sample(f), prop.sample(g)).imag();
}

template <MomentumSmearing F, MomentumSmearing G>
std::complex<double> thermal_wightman(const Propagator& prop, const F& f, const G& g,
                                      double beta) {
  if (!(beta > 0.0)) throw ConfigError("thermal state needs beta > 0");
  prop.check_infrared(f, g);
  return prop.thermal(prop.sample(f), prop.sample(g), beta);
}

/// Displacement amplitude of e^{i phi(h)} on the normalized mode G:
///   beta_G(h) = i sqrt(hbar) integral d^n k G^*(k) h^(w_k, k) / sqrt((2 pi)^n 2 w_k).
std::complex<double> overlap_beta(const Propagator& prop, const OneParticleProfile& G,
                                  const Eigen::ArrayXcd& h_samples);

template <MomentumSmearing H>
std::complex<double> overlap_beta(const Propagator& prop, const OneParticleProfile& G,
                                  const H& h) {
  return overlap_beta(prop, G, prop.sample(h));
}

}  // namespace tw
