#include "tw/modes.hpp"

#include <cmath>

#include "tw/parallel.hpp"

namespace tw {

Eigen::MatrixXd symplectic_form(int modes) {
  if (modes < 0) throw ConfigError("negative mode count");
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
  for (int k = 0; k < modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

std::vector<SmearingFunction> LocalModeSet::flattened() const {
  std::vector<SmearingFunction> out;
  out.reserve(2 * pairs.size());
  for (const auto& p : pairs) {
    out.push_back(p.f1);
    out.push_back(p.f2);
  }
  return out;
}

Eigen::MatrixXd LocalModeSet::omega() const { return symplectic_form(size()); }

LocalModeSet LocalModeSet::subset(const std::vector<int>& modes) const {
  LocalModeSet out{spec, layout, profile, {}};
  out.layout.tiles.clear();
  for (int k : modes) {
    if (k < 0 || k >= size()) throw ConfigError("mode index " + std::to_string(k) + " out of range");
    out.pairs.push_back(pairs[k]);
    out.layout.tiles.push_back(layout.tiles[k]);
  }
  return out;
}

LocalModeSet LocalModeSet::rescaled(double lambda) const {
  LocalModeSet out = *this;
  for (auto& p : out.pairs) p = rescale_mode(p, lambda);
  return out;
}

LocalModeSet assemble_modes(const TilingLayout& layout, const BumpProfile& profile,
                            const Propagator& propagator) {
  if (layout.tiles.empty()) throw ConfigError("layout has no tiles");
  const auto violations = causal_violations(layout.tiles);
  if (!violations.empty())
    throw CausalOverlapError("layout contains causally connected tiles", violations);
  LocalModeSet set{propagator.spec(), layout, profile, {}};
  set.pairs.resize(layout.tiles.size());
  parallel_for(layout.tiles.size(), [&](std::size_t k) {
    set.pairs[k] = make_local_mode(layout.tiles[k], profile, propagator);
  });
  return set;
}

LocalModeSet assemble_modes(const TilingLayout& layout, const BumpProfile& profile,
                            const MomentumGrid& grid) {
  return assemble_modes(layout, profile, Propagator(layout.spec, grid));
}

Eigen::VectorXd contraction_coefficients(const LocalModeSet& set, const Eigen::VectorXd& eta) {
  if (eta.size() != set.phase_dimension())
    throw ConfigError("eta has length " + std::to_string(eta.size()) + ", expected " +
                      std::to_string(set.phase_dimension()));
  return set.omega().transpose() * eta;
}

SmearingCombination contract(const LocalModeSet& set, const Eigen::VectorXd& eta) {
  const Eigen::VectorXd c = contraction_coefficients(set, eta);
  const auto f = set.flattened();
  SmearingCombination h;
  for (std::size_t a = 0; a < f.size(); ++a)
    if (c[a] != 0.0) h.terms.push_back({c[a], f[a]});
  return h;
}

std::vector<Eigen::ArrayXcd> sample_modes(const LocalModeSet& set, const Propagator& propagator) {
  const auto f = set.flattened();
  std::vector<Eigen::ArrayXcd> samples(f.size());
  parallel_for(f.size(), [&](std::size_t a) { samples[a] = propagator.sample(f[a]); });
  return samples;
}

CCRReport ccr_check(const LocalModeSet& set, const Propagator& propagator) {
  const Eigen::MatrixXcd w = propagator.two_point_matrix(sample_modes(set, propagator), Vacuum{});
  CCRReport r;
  r.measured = (2.0 / propagator.spec().hbar) * w.imag();
  r.residual = r.measured - set.omega();
  r.max_abs_residual = r.residual.cwiseAbs().maxCoeff();
  for (Eigen::Index a = 0; a < r.residual.rows(); ++a)
    for (Eigen::Index b = 0; b < r.residual.cols(); ++b) {
      double& slot = (a / 2 == b / 2) ? r.max_within_mode : r.max_cross_mode;
      slot = std::max(slot, std::abs(r.residual(a, b)));
    }
  r.grid_fingerprint = propagator.grid().fingerprint();
  return r;
}

CovarianceMatrix covariance(const LocalModeSet& set, const FieldState& state,
                            const Propagator& propagator) {
  if (!is_gaussian(state))
    throw NotGaussianError("covariance is defined only for Gaussian states; use the numeric "
                           "Wigner path for one-particle states");
  const int n = set.size();
  const auto samples = sample_modes(set, propagator);
  const FieldState quasifree = std::holds_alternative<Thermal>(state) ? state : Vacuum{};
  if (const auto* t = std::get_if<Thermal>(&state); t && !(t->beta > 0.0))
    throw ConfigError("thermal state needs beta > 0");

  CovarianceMatrix cov;
  cov.sigma = propagator.two_point_matrix(samples, quasifree).real();
  cov.mean = Eigen::VectorXd::Zero(2 * n);
  cov.state = state_tag(state);
  cov.grid_fingerprint = propagator.grid().fingerprint();
  cov.hbar = propagator.spec().hbar;
  if (const auto* c = std::get_if<Coherent>(&state)) {
    if (static_cast<int>(c->alpha.size()) != n)
      throw ConfigError("coherent state needs one amplitude per mode (" + std::to_string(n) +
                        ")");
    const double scale = std::sqrt(2.0 * cov.hbar);
    for (int k = 0; k < n; ++k) {
      cov.mean[2 * k] = scale * c->alpha[k].real();
      cov.mean[2 * k + 1] = scale * c->alpha[k].imag();
    }
  }
  return cov;
}

CovarianceMatrix block_diagonal_part(const CovarianceMatrix& cov) {
  CovarianceMatrix out = cov;
  for (Eigen::Index a = 0; a < out.sigma.rows(); ++a)
    for (Eigen::Index b = 0; b < out.sigma.cols(); ++b)
      if (a / 2 != b / 2) out.sigma(a, b) = 0.0;
  return out;
}

QuadraticForm wightman_quadratic_form(const CovarianceMatrix& cov) {
  const Eigen::MatrixXd omega = symplectic_form(cov.modes());
  return {omega * cov.sigma * omega.transpose()};
}

double wightman_quadratic_form(const LocalModeSet& set, const FieldState& state,
                               const Eigen::VectorXd& eta, const Propagator& propagator) {
  if (eta.size() != set.phase_dimension()) throw ConfigError("eta has wrong length");
  if (std::holds_alternative<OneParticle>(state))
    throw NotGaussianError("quadratic form is defined only for Gaussian states");
  // Smear h_eta directly; coherent displacements do not change the truncated part.
  const Eigen::ArrayXcd h = propagator.sample(contract(set, eta));
  if (const auto* t = std::get_if<Thermal>(&state)) return propagator.thermal(h, h, t->beta).real();
  return propagator.wightman(h, h).real();
}

}  // namespace tw
