#include "tw/smearing.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tw/errors.hpp"
#include "tw/propagator.hpp"

namespace tw {
namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

// Trapezoid rule in u after s = tanh(u). The integrand
// exp(-cosh(u)^2) sech(u)^2 decays double-exponentially and is analytic in a
// strip, so the rule converges exponentially.
struct BumpRule {
  static constexpr double step = 0.01;
  static constexpr int half_count = 330;
  Eigen::ArrayXd s;  // tanh(u_j), j = 0..half_count
  Eigen::ArrayXd w;  // step * sech^2 * bump, with the j = 0 weight halved

  BumpRule() : s(half_count + 1), w(half_count + 1) {
    for (int j = 0; j <= half_count; ++j) {
      const double u = j * step;
      const double c = std::cosh(u);
      s[j] = std::tanh(u);
      w[j] = step * std::exp(-c * c) / (c * c);
    }
    w[0] *= 0.5;
  }
};

const BumpRule& bump_rule() {
  static const BumpRule rule;
  return rule;
}

double gaussian_temporal_sigma(const BumpProfile& p, double eps) { return eps / p.r_cut; }

}  // namespace

const char* to_string(ProfileFamily f) {
  return f == ProfileFamily::smooth_bump ? "smooth_bump" : "gaussian_truncated";
}

ProfileFamily profile_family_from_string(const std::string& s) {
  if (s == "smooth_bump") return ProfileFamily::smooth_bump;
  if (s == "gaussian_truncated") return ProfileFamily::gaussian_truncated;
  throw ConfigError("unknown profile family '" + s + "'");
}

double BumpProfile::leak_bound() const {
  if (family == ProfileFamily::smooth_bump) return 0.0;
  return std::erfc(r_cut / std::numbers::sqrt2);
}

void BumpProfile::validate_for(const Tile& tile) const {
  if (family == ProfileFamily::smooth_bump) return;
  if (!(sigma > 0.0) || !(r_cut > 0.0))
    throw ConfigError("gaussian profile needs sigma > 0 and r_cut > 0");
  if (r_cut * sigma > tile.half_width.minCoeff() * (1.0 + 1e-12))
    throw ConfigError("gaussian support r_cut*sigma exceeds tile " +
                      std::to_string(tile.index) + " half width");
}

double bump(double s) {
  const double q = 1.0 - s * s;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

double bump_derivative(double s) {
  const double q = 1.0 - s * s;
  return q > 0.0 ? std::exp(-1.0 / q) * (-2.0 * s / (q * q)) : 0.0;
}

double bump_mass() {
  static const double mass = 2.0 * bump_rule().w.sum();
  return mass;
}

double bump_cosine_transform(double q) {
  const auto& r = bump_rule();
  return 2.0 * (r.w * (q * r.s).cos()).sum();
}

// --- SmearingFunction -------------------------------------------------------

double SmearingFunction::temporal(double tau) const {
  const double eps = temporal_half_width;
  if (std::abs(tau) > eps) return 0.0;
  if (profile.family == ProfileFamily::smooth_bump) {
    const double norm = 1.0 / (eps * bump_mass());
    if (derivative_order == 0) return norm * bump(tau / eps);
    return -norm * bump_derivative(tau / eps) / eps;
  }
  const double st = gaussian_temporal_sigma(profile, eps);
  const double g = std::exp(-0.5 * tau * tau / (st * st)) / (st * kSqrt2Pi);
  if (derivative_order == 0) return g;
  return g * tau / (st * st);
}

double SmearingFunction::spatial(int axis, double u) const {
  const double a = half_width[axis];
  if (profile.family == ProfileFamily::smooth_bump) return bump(u / a);
  if (std::abs(u) > profile.r_cut * profile.sigma) return 0.0;
  return std::exp(-0.5 * u * u / (profile.sigma * profile.sigma));
}

double SmearingFunction::operator()(double t, const Eigen::VectorXd& x) const {
  double v = amplitude * temporal(t - t0);
  for (int d = 0; d < dimension() && v != 0.0; ++d) v *= spatial(d, x[d] - center[d]);
  return v;
}

double SmearingFunction::temporal_transform(double omega) const {
  const double eps = temporal_half_width;
  if (profile.family == ProfileFamily::smooth_bump)
    return bump_cosine_transform(omega * eps) / bump_mass();
  const double st = gaussian_temporal_sigma(profile, eps);
  return std::exp(-0.5 * st * st * omega * omega);
}

double SmearingFunction::spatial_transform(int axis, double k) const {
  if (profile.family == ProfileFamily::smooth_bump) {
    const double a = half_width[axis];
    return a * bump_cosine_transform(k * a);
  }
  const double s = profile.sigma;
  return s * kSqrt2Pi * std::exp(-0.5 * s * s * k * k);
}

std::complex<double> SmearingFunction::momentum_transform(double omega,
                                                          const Eigen::VectorXd& k) const {
  double magnitude = amplitude * temporal_transform(omega);
  double phase = omega * t0;
  for (int d = 0; d < dimension(); ++d) {
    magnitude *= spatial_transform(d, k[d]);
    phase -= k[d] * center[d];
  }
  std::complex<double> v = std::polar(1.0, phase) * magnitude;
  if (derivative_order == 1) v *= std::complex<double>(0.0, omega);
  return v;
}

double SmearingCombination::operator()(double t, const Eigen::VectorXd& x) const {
  double v = 0.0;
  for (const auto& term : terms) v += term.coefficient * term.function(t, x);
  return v;
}

std::complex<double> SmearingCombination::momentum_transform(double omega,
                                                             const Eigen::VectorXd& k) const {
  std::complex<double> v = 0.0;
  for (const auto& term : terms) v += term.coefficient * term.function.momentum_transform(omega, k);
  return v;
}

// --- local modes --------------------------------------------------------------

namespace {

SmearingFunction base_function(const Tile& tile, const BumpProfile& profile,
                               const SpacetimeSpec& spec) {
  SmearingFunction f;
  f.profile = profile;
  f.t0 = spec.t0;
  f.temporal_half_width = tile.temporal_half_width;
  f.center = tile.center;
  f.half_width = tile.half_width;
  f.tile = tile.index;
  return f;
}

LocalModePair pair_from_constant(SmearingFunction f1, double c, double lambda) {
  SmearingFunction f2 = f1;
  f2.derivative_order = 1;
  f2.amplitude = 1.0 / c;
  LocalModePair pair{std::move(f1), std::move(f2), c, 1.0 / c, 1.0};
  return lambda == 1.0 ? pair : rescale_mode(pair, lambda);
}

}  // namespace

LocalModePair make_local_mode(const Tile& tile, const BumpProfile& profile,
                              const Propagator& propagator) {
  const SpacetimeSpec& spec = propagator.spec();
  spec.validate();
  if (tile.center.size() != spec.dimension)
    throw ConfigError("tile dimension does not match spacetime");
  profile.validate_for(tile);
  const double k_needed = 10.0 / tile.half_width.minCoeff();
  if (propagator.grid().k_max < k_needed)
    throw ConfigError("momentum grid k_max " + std::to_string(propagator.grid().k_max) +
                      " does not resolve tile " + std::to_string(tile.index) + " (need >= " +
                      std::to_string(k_needed) + ")");

  SmearingFunction f1 = base_function(tile, profile, spec);
  SmearingFunction f2_raw = f1;
  f2_raw.derivative_order = 1;
  const double c = causal_smeared(propagator, f1, f2_raw);
  if (!(std::abs(c) >= 1e-12))
    throw DegenerateModeError("E(f1, f2) vanishes on tile " + std::to_string(tile.index));
  return pair_from_constant(std::move(f1), c, 1.0);
}

LocalModePair make_local_mode(const Tile& tile, const BumpProfile& profile,
                              const SpacetimeSpec& spec, const MomentumGrid& grid) {
  return make_local_mode(tile, profile, Propagator(spec, grid));
}

LocalModePair restore_local_mode(const Tile& tile, const BumpProfile& profile,
                                 const SpacetimeSpec& spec, double raw_commutator,
                                 double lambda) {
  profile.validate_for(tile);
  if (!(std::abs(raw_commutator) >= 1e-12))
    throw DegenerateModeError("stored normalization constant is degenerate");
  return pair_from_constant(base_function(tile, profile, spec), raw_commutator, lambda);
}

LocalModePair rescale_mode(const LocalModePair& pair, double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("rescale factor lambda must be positive");
  LocalModePair out = pair;
  out.f1.amplitude *= lambda;
  out.f2.amplitude /= lambda;
  out.lambda *= lambda;
  return out;
}

}  // namespace tw
