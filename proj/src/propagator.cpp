#include "tw/propagator.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>

namespace tw {

// --- states ------------------------------------------------------------------

std::complex<double> OneParticleProfile::operator()(const Eigen::VectorXd& k) const {
  const double r2 = (k - k0).squaredNorm();
  const double phase = x0.size() == k.size() ? -k.dot(x0) : 0.0;
  return std::polar(norm_constant * std::exp(-r2 / (4.0 * sigma_k * sigma_k)), phase);
}

double OneParticleProfile::norm_squared(const MomentumGrid& grid) const {
  Eigen::ArrayXd terms(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    terms[i] = grid.weights[i] * std::norm((*this)(grid.k.col(i)));
  return pairwise_sum(terms);
}

OneParticleProfile OneParticleProfile::normalized(Eigen::VectorXd k0, double sigma_k,
                                                  const MomentumGrid& grid,
                                                  Eigen::VectorXd x0) {
  if (!(sigma_k > 0.0)) throw ConfigError("one-particle width sigma_k must be positive");
  if (k0.size() != grid.dimension) throw ConfigError("one-particle k0 has wrong dimension");
  if (x0.size() == 0) x0 = Eigen::VectorXd::Zero(grid.dimension);
  OneParticleProfile g{std::move(k0), std::move(x0), sigma_k, 1.0};
  g.norm_constant = 1.0 / std::sqrt(g.norm_squared(grid));
  return g;
}

std::string state_tag(const FieldState& state) {
  struct Visitor {
    std::string operator()(const Vacuum&) const { return "vacuum"; }
    std::string operator()(const Thermal&) const { return "thermal"; }
    std::string operator()(const Coherent&) const { return "coherent"; }
    std::string operator()(const OneParticle&) const { return "one_particle"; }
  };
  return std::visit(Visitor{}, state);
}

bool is_gaussian(const FieldState& state) { return !std::holds_alternative<OneParticle>(state); }

// --- engine ------------------------------------------------------------------

Propagator::Propagator(SpacetimeSpec spec, MomentumGrid grid)
    : spec_(std::move(spec)), grid_(std::move(grid)) {
  spec_.validate();
  if (grid_.dimension != spec_.dimension)
    throw ConfigError("momentum grid dimension does not match spacetime");
  const Eigen::Index m = grid_.size();
  const double m2 = spec_.mass * spec_.mass;
  const double volume = std::pow(2.0 * std::numbers::pi, spec_.dimension);
  omega_ = (grid_.k.colwise().squaredNorm().transpose().array() + m2).sqrt();
  measure_ = grid_.weights / (volume * 2.0 * omega_);
  tail_mask_.resize(m);
  const double edge = 0.9 * grid_.k_max;
  for (Eigen::Index i = 0; i < m; ++i)
    tail_mask_[i] = grid_.k.col(i).cwiseAbs().maxCoeff() > edge;
}

Eigen::ArrayXcd Propagator::sample(const SmearingFunction& f) const {
  if (f.dimension() != spec_.dimension)
    throw ConfigError("smearing function dimension does not match spacetime");
  const Eigen::Index na = grid_.axis.size();
  const int n = spec_.dimension;

  // Per-axis spatial factors F_d(k) e^{-i k c_d}.
  std::vector<Eigen::ArrayXcd> axis_factor(n, Eigen::ArrayXcd(na));
  for (int d = 0; d < n; ++d)
    for (Eigen::Index j = 0; j < na; ++j) {
      const double k = grid_.axis.nodes[j];
      axis_factor[d][j] = std::polar(f.spatial_transform(d, k), -k * f.center[d]);
    }

  // Temporal factor, memoized on omega (many nodes share |k| in 3D).
  std::unordered_map<double, double> temporal;
  auto chi = [&](double w) {
    auto it = temporal.find(w);
    if (it != temporal.end()) return it->second;
    const double v = f.temporal_transform(w);
    temporal.emplace(w, v);
    return v;
  };

  Eigen::ArrayXcd out(grid_.size());
  for (Eigen::Index idx = 0; idx < grid_.size(); ++idx) {
    const double w = omega_[idx];
    std::complex<double> v = f.amplitude * chi(w) * std::polar(1.0, w * f.t0);
    if (n == 1) {
      v *= axis_factor[0][idx];
    } else {
      const Eigen::Index i = idx / (na * na), j = (idx / na) % na, l = idx % na;
      v *= axis_factor[0][i] * axis_factor[1][j] * axis_factor[2][l];
    }
    if (f.derivative_order == 1) v *= std::complex<double>(0.0, w);
    out[idx] = v;
  }
  return out;
}

Eigen::ArrayXcd Propagator::sample(const SmearingCombination& f) const {
  Eigen::ArrayXcd out = Eigen::ArrayXcd::Zero(grid_.size());
  for (const auto& term : f.terms) out += term.coefficient * sample(term.function);
  return out;
}

std::complex<double> Propagator::wightman(const Eigen::ArrayXcd& a,
                                          const Eigen::ArrayXcd& b) const {
  const Eigen::ArrayXcd terms = measure_ * a.conjugate() * b;
  return spec_.hbar * pairwise_sum(terms);
}

std::complex<double> Propagator::thermal(const Eigen::ArrayXcd& a, const Eigen::ArrayXcd& b,
                                         double beta) const {
  if (!(beta > 0.0)) throw ConfigError("thermal state needs beta > 0");
  const Eigen::ArrayXd occupation = 1.0 / (beta * omega_).unaryExpr([](double x) {
    return std::expm1(x);
  });
  const Eigen::ArrayXcd terms =
      measure_ * ((1.0 + occupation) * a.conjugate() * b + occupation * a * b.conjugate());
  return spec_.hbar * pairwise_sum(terms);
}

double Propagator::tail_fraction(const Eigen::ArrayXcd& a, const Eigen::ArrayXcd& b) const {
  const Eigen::ArrayXd mag = measure_ * (a.conjugate() * b).abs();
  const double total = pairwise_sum(mag);
  if (total == 0.0) return 0.0;
  const Eigen::ArrayXd tail = tail_mask_.select(mag, 0.0);
  return pairwise_sum(tail) / total;
}

Eigen::MatrixXcd Propagator::two_point_matrix(const std::vector<Eigen::ArrayXcd>& samples,
                                              const FieldState& state) const {
  const Thermal* thermal_state = std::get_if<Thermal>(&state);
  if (!thermal_state && !std::holds_alternative<Vacuum>(state))
    throw ConfigError("two_point_matrix: state must be vacuum or thermal");
  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXcd out(n, n);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> entries;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a; b < n; ++b) entries.emplace_back(a, b);
  parallel_for(entries.size(), [&](std::size_t e) {
    const auto [a, b] = entries[e];
    const std::complex<double> v = thermal_state
                                       ? thermal(samples[a], samples[b], thermal_state->beta)
                                       : wightman(samples[a], samples[b]);
    out(a, b) = v;
    if (a != b) out(b, a) = std::conj(v);
  });
  return out;
}

std::complex<double> overlap_beta(const Propagator& prop, const OneParticleProfile& G,
                                  const Eigen::ArrayXcd& h_samples) {
  const MomentumGrid& grid = prop.grid();
  const double norm = G.norm_squared(grid);
  if (std::abs(norm - 1.0) > 1e-6)
    throw ConfigError("one-particle profile is not normalized on this grid (|G|^2 = " +
                      std::to_string(norm) + ")");
  const double volume = std::pow(2.0 * std::numbers::pi, prop.spec().dimension);
  Eigen::ArrayXcd terms(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    terms[i] = grid.weights[i] * std::conj(G(grid.k.col(i))) * h_samples[i] /
               std::sqrt(volume * 2.0 * prop.omega()[i]);
  return std::complex<double>(0.0, std::sqrt(prop.spec().hbar)) * pairwise_sum(terms);
}

}  // namespace tw
