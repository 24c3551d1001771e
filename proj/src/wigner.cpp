#include "tw/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tw/parallel.hpp"
#include "tw/quadrature.hpp"

namespace tw {
namespace {

using RowMajorXcd = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic,
                                  Eigen::RowMajor>;

constexpr std::size_t kChunk = 4096;

// Runs body(begin, end) over contiguous blocks of [0, count).
template <typename Body>
void parallel_chunks(Eigen::Index count, Body body) {
  const std::size_t blocks = (static_cast<std::size_t>(count) + kChunk - 1) / kChunk;
  parallel_for(blocks, [&](std::size_t b) {
    const Eigen::Index begin = static_cast<Eigen::Index>(b * kChunk);
    body(begin, std::min<Eigen::Index>(count, begin + kChunk));
  });
}

// out(o, i, r) = sum_j kernel(i, j) in(o, j, r) for a row-major tensor whose
// contracted axis has length `len`.
Eigen::VectorXcd contract_axis(const Eigen::VectorXcd& in, Eigen::Index outer, Eigen::Index len,
                               Eigen::Index inner, const Eigen::MatrixXcd& kernel) {
  const Eigen::Index out_len = kernel.rows();
  Eigen::VectorXcd out(outer * out_len * inner);
  parallel_for(static_cast<std::size_t>(outer), [&](std::size_t o) {
    Eigen::Map<const RowMajorXcd> src(in.data() + o * len * inner, len, inner);
    Eigen::Map<RowMajorXcd> dst(out.data() + o * out_len * inner, out_len, inner);
    dst.noalias() = kernel * src;
  });
  return out;
}

void check_ordering(double s) {
  if (!(s >= -1.0 && s <= 1.0))
    throw OrderingDomainError("ordering parameter s must lie in [-1, 1]");
}

}  // namespace

// --- PhaseGrid ------------------------------------------------------------------

Eigen::Index PhaseGrid::size() const {
  Eigen::Index n = 1;
  for (int d = 0; d < dimension(); ++d) n *= nodes[d];
  return n;
}

double PhaseGrid::spacing(int axis) const {
  return nodes[axis] > 1 ? (upper[axis] - lower[axis]) / (nodes[axis] - 1) : 0.0;
}

double PhaseGrid::coordinate(int axis, Eigen::Index i) const {
  if (nodes[axis] == 1) return 0.5 * (lower[axis] + upper[axis]);
  // Symmetric about the midpoint so that mirrored nodes are exact negatives.
  const double mid = 0.5 * (lower[axis] + upper[axis]);
  const double half = 0.5 * (upper[axis] - lower[axis]);
  const double u = (2.0 * i - (nodes[axis] - 1)) / static_cast<double>(nodes[axis] - 1);
  return mid + half * u;
}

Eigen::VectorXi PhaseGrid::unflatten(Eigen::Index flat) const {
  Eigen::VectorXi idx(dimension());
  for (int d = dimension() - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(flat % nodes[d]);
    flat /= nodes[d];
  }
  return idx;
}

Eigen::VectorXd PhaseGrid::point(Eigen::Index flat) const {
  const Eigen::VectorXi idx = unflatten(flat);
  Eigen::VectorXd x(dimension());
  for (int d = 0; d < dimension(); ++d) x[d] = coordinate(d, idx[d]);
  return x;
}

Eigen::ArrayXd PhaseGrid::axis_weights(int axis) const {
  Eigen::ArrayXd w = Eigen::ArrayXd::Constant(nodes[axis], spacing(axis));
  if (nodes[axis] > 1) {
    w[0] *= 0.5;
    w[nodes[axis] - 1] *= 0.5;
  } else {
    w[0] = 1.0;
  }
  return w;
}

Eigen::ArrayXd PhaseGrid::weights() const {
  std::vector<Eigen::ArrayXd> axis(dimension());
  for (int d = 0; d < dimension(); ++d) axis[d] = axis_weights(d);
  Eigen::ArrayXd w(size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const Eigen::VectorXi idx = unflatten(i);
    double v = 1.0;
    for (int d = 0; d < dimension(); ++d) v *= axis[d][idx[d]];
    w[i] = v;
  }
  return w;
}

void PhaseGrid::validate() const {
  if (dimension() == 0 || dimension() % 2 != 0)
    throw ConfigError("phase grid needs an even, nonzero number of axes");
  if (lower.size() != dimension() || upper.size() != dimension())
    throw ConfigError("phase grid ranges do not match its node counts");
  double points = 1.0;
  for (int d = 0; d < dimension(); ++d) {
    if (nodes[d] < 2) throw ConfigError("phase grid needs at least 2 nodes per axis");
    if (!(upper[d] > lower[d])) throw ConfigError("phase grid range is empty");
    points *= nodes[d];
  }
  if (points > kMaxPoints)
    throw CostGuardError("phase grid has " + std::to_string(points) + " points (limit " +
                         std::to_string(kMaxPoints) + ")");
}

PhaseGrid PhaseGrid::symmetric(int dimension, double half_range, int nodes_per_axis) {
  return {Eigen::VectorXd::Constant(dimension, -half_range),
          Eigen::VectorXd::Constant(dimension, half_range),
          Eigen::VectorXi::Constant(dimension, nodes_per_axis)};
}

PhaseGrid auto_phase_grid(const Eigen::MatrixXd& second_moments, const Eigen::VectorXd& mean,
                          int nodes_per_axis, double n_sigma) {
  const Eigen::VectorXd half = n_sigma * second_moments.diagonal().cwiseSqrt();
  PhaseGrid g{mean - half, mean + half,
              Eigen::VectorXi::Constant(second_moments.rows(), nodes_per_axis)};
  g.validate();
  return g;
}

PhaseGrid auto_phase_grid(const CovarianceMatrix& cov, int nodes_per_axis, double n_sigma) {
  return auto_phase_grid(cov.sigma, cov.mean, nodes_per_axis, n_sigma);
}

void QuasiDistribution::summarize() {
  const Eigen::ArrayXd w = grid.weights();
  normalization = pairwise_sum(Eigen::ArrayXd(values * w));
  negativity = pairwise_sum(Eigen::ArrayXd(values.abs() * w)) - normalization;
  min_value = values.minCoeff();
  max_value = values.maxCoeff();
}

// --- characteristic function ----------------------------------------------------

CharacteristicFunction::CharacteristicFunction(const LocalModeSet& set, const FieldState& state,
                                               const Propagator& propagator)
    : hbar_(propagator.spec().hbar), state_(state_tag(state)) {
  if (const auto* one = std::get_if<OneParticle>(&state)) {
    cov_ = tw::covariance(set, Vacuum{}, propagator);
    cov_.state = state_;
    const auto samples = sample_modes(set, propagator);
    overlaps_.resize(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t a = 0; a < samples.size(); ++a)
      overlaps_[a] = overlap_beta(propagator, one->profile, samples[a]);
  } else {
    cov_ = tw::covariance(set, state, propagator);
  }
  omega_ = set.omega();
  quadratic_ = wightman_quadratic_form(cov_).matrix;
  fingerprint_ = cov_.grid_fingerprint;
}

std::complex<double> CharacteristicFunction::beta(const Eigen::VectorXd& eta) const {
  if (gaussian()) return 0.0;
  const Eigen::VectorXd c = omega_.transpose() * eta;
  return (c.cast<std::complex<double>>().array() * overlaps_.array()).sum();
}

std::complex<double> CharacteristicFunction::operator()(const Eigen::VectorXd& eta) const {
  if (eta.size() != phase_dimension()) throw ConfigError("eta has wrong length");
  const double envelope = std::exp(-0.5 * eta.dot(quadratic_ * eta));
  if (gaussian()) return std::polar(envelope, eta.dot(omega_ * cov_.mean));
  return envelope * (1.0 - std::norm(beta(eta)));
}

Eigen::MatrixXd CharacteristicFunction::second_moments() const {
  if (gaussian()) return cov_.sigma;
  return cov_.sigma + 2.0 * (overlaps_.conjugate() * overlaps_.transpose()).real();
}

double CharacteristicFunction::overlap_measure() const {
  if (gaussian()) return 0.0;
  const Eigen::MatrixXd r = (overlaps_.conjugate() * overlaps_.transpose()).real();
  return cov_.sigma.ldlt().solve(r).trace();
}

std::complex<double> characteristic(const LocalModeSet& set, const FieldState& state,
                                    const Eigen::VectorXd& eta, const Propagator& propagator) {
  return CharacteristicFunction(set, state, propagator)(eta);
}

// --- Gaussian path ----------------------------------------------------------------

QuasiDistribution s_ordered(const CovarianceMatrix& cov, double s, const PhaseGrid& grid) {
  check_ordering(s);
  grid.validate();
  const int dim = static_cast<int>(cov.sigma.rows());
  if (grid.dimension() != dim) throw ConfigError("phase grid dimension does not match modes");

  const Eigen::MatrixXd sigma_s =
      cov.sigma - (0.5 * s * cov.hbar) * Eigen::MatrixXd::Identity(dim, dim);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma_s);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) {
    if (s != 0.0)
      throw OrderingDomainError("Sigma - (s hbar/2) I is not positive definite for s = " +
                                std::to_string(s));
    throw IllConditionedError("covariance matrix is not positive definite");
  }
  if (hi / lo > 1e12)
    throw IllConditionedError("covariance condition number " + std::to_string(hi / lo) +
                              " exceeds 1e12");

  const Eigen::MatrixXd precision =
      eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
      eig.eigenvectors().transpose();
  const double log_det = eig.eigenvalues().array().log().sum();
  const double log_norm = -0.5 * dim * std::log(2.0 * std::numbers::pi) - 0.5 * log_det;

  QuasiDistribution out;
  out.s = s;
  out.grid = grid;
  out.values.resize(grid.size());
  parallel_chunks(grid.size(), [&](Eigen::Index begin, Eigen::Index end) {
    for (Eigen::Index i = begin; i < end; ++i) {
      const Eigen::VectorXd d = grid.point(i) - cov.mean;
      out.values[i] = std::exp(log_norm - 0.5 * d.dot(precision * d));
    }
  });
  out.state = cov.state;
  out.method = "gaussian";
  out.grid_fingerprint = cov.grid_fingerprint;
  out.summarize();
  return out;
}

QuasiDistribution wigner_gaussian(const CovarianceMatrix& cov, const PhaseGrid& grid) {
  return s_ordered(cov, 0.0, grid);
}

QuasiDistribution wigner_gaussian(const LocalModeSet& set, const FieldState& state,
                                  const Propagator& propagator, const PhaseGrid& grid) {
  return wigner_gaussian(covariance(set, state, propagator), grid);
}

// --- numeric path -----------------------------------------------------------------

namespace {

int default_eta_nodes(int modes) { return modes == 1 ? 64 : 48; }

// chi_s(eta) = chi(eta) exp(s hbar |eta|^2 / 4)
std::complex<double> ordered_chi(const CharacteristicFunction& chi, double s,
                                 const Eigen::VectorXd& eta) {
  const std::complex<double> v = chi(eta);
  return s == 0.0 ? v : v * std::exp(0.25 * s * chi.hbar() * eta.squaredNorm());
}

// Largest |chi_s| over the faces eta_a = +-L_a, evaluated at the maximiser
// of the Gaussian envelope on each face.
double boundary_magnitude(const CharacteristicFunction& chi, double s,
                          const Eigen::MatrixXd& inverse, const Eigen::VectorXd& cutoff) {
  double worst = 0.0;
  for (int a = 0; a < cutoff.size(); ++a) {
    const Eigen::VectorXd dir = inverse.col(a) / inverse(a, a);
    for (double sign : {-1.0, 1.0})
      worst = std::max(worst, std::abs(ordered_chi(chi, s, sign * cutoff[a] * dir)));
  }
  return worst;
}

}  // namespace

Eigen::VectorXd eta_cutoffs(const CharacteristicFunction& chi, const NumericOptions& options) {
  const int dim = chi.phase_dimension();
  const Eigen::MatrixXd m_s =
      chi.quadratic() - (0.5 * options.s * chi.hbar()) * Eigen::MatrixXd::Identity(dim, dim);
  Eigen::LLT<Eigen::MatrixXd> llt(m_s);
  if (llt.info() != Eigen::Success)
    throw IllConditionedError("characteristic quadratic form is not positive definite");
  const Eigen::MatrixXd inverse = llt.solve(Eigen::MatrixXd::Identity(dim, dim));
  const double tol = NumericOptions::kBoundaryTolerance;

  if (options.eta_cutoff > 0.0) {
    const Eigen::VectorXd cutoff = Eigen::VectorXd::Constant(dim, options.eta_cutoff);
    const double edge = boundary_magnitude(chi, options.s, inverse, cutoff);
    if (edge > tol)
      throw CutoffError("|chi| = " + std::to_string(edge) + " at eta cutoff " +
                        std::to_string(options.eta_cutoff) + " exceeds 1e-8");
    return cutoff;
  }
  double level = std::log(1.0 / tol);
  for (int iter = 0; iter < 64; ++iter, level += 1.0) {
    const Eigen::VectorXd cutoff = (2.0 * level * inverse.diagonal()).cwiseSqrt();
    if (boundary_magnitude(chi, options.s, inverse, cutoff) <= tol) return cutoff;
  }
  throw CutoffError("no eta cutoff brings |chi| below 1e-8");
}

QuasiDistribution wigner_numeric(const CharacteristicFunction& chi, const PhaseGrid& grid,
                                 const NumericOptions& options) {
  const int dim = chi.phase_dimension();
  const int modes = dim / 2;
  if (modes > NumericOptions::kMaxModes)
    throw CostGuardError("numeric Wigner quadrature is limited to N <= 2 modes (got " +
                         std::to_string(modes) + ")");
  check_ordering(options.s);
  if (options.s > 0.0)
    throw OrderingDomainError("numeric path accepts only s <= 0");
  grid.validate();
  if (grid.dimension() != dim) throw ConfigError("phase grid dimension does not match modes");
  const int n = options.eta_nodes > 0 ? options.eta_nodes : default_eta_nodes(modes);
  if (n < 2) throw ConfigError("eta_nodes must be at least 2");
  double work = std::pow(static_cast<double>(n), dim) * grid.nodes.maxCoeff();
  if (work > 1e12) throw CostGuardError("numeric Wigner quadrature exceeds the work limit");

  const Eigen::VectorXd cutoff = eta_cutoffs(chi, options);
  const QuadratureRule rule = gauss_legendre(n);

  // Weighted samples chi_s(eta) prod_a w_a on the tensor grid, last axis fastest.
  Eigen::Index total = 1;
  for (int a = 0; a < dim; ++a) total *= n;
  Eigen::VectorXcd tensor(total);
  parallel_chunks(total, [&](Eigen::Index begin, Eigen::Index end) {
    Eigen::VectorXd eta(dim);
    for (Eigen::Index flat = begin; flat < end; ++flat) {
      Eigen::Index rest = flat;
      double weight = 1.0;
      for (int a = dim - 1; a >= 0; --a) {
        const Eigen::Index j = rest % n;
        rest /= n;
        eta[a] = cutoff[a] * rule.nodes[j];
        weight *= cutoff[a] * rule.weights[j];
      }
      tensor[flat] = weight * ordered_chi(chi, options.s, eta);
    }
  });

  // eta^T Omega xi = sum_k (eta_{x_k} p_k - eta_{p_k} x_k): the eta axis a
  // pairs with output coordinate a ^ 1.
  std::vector<Eigen::Index> shape(dim, n);
  for (int a = 0; a < dim; ++a) {
    const int target = a ^ 1;
    const double sign = (a % 2 == 0) ? -1.0 : 1.0;
    Eigen::MatrixXcd kernel(grid.nodes[target], n);
    for (Eigen::Index i = 0; i < kernel.rows(); ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        kernel(i, j) = std::polar(1.0, sign * cutoff[a] * rule.nodes[j] * grid.coordinate(target, i));
    Eigen::Index outer = 1, inner = 1;
    for (int b = 0; b < a; ++b) outer *= shape[b];
    for (int b = a + 1; b < dim; ++b) inner *= shape[b];
    tensor = contract_axis(tensor, outer, shape[a], inner, kernel);
    shape[a] = grid.nodes[target];
  }

  // Tensor axis a now indexes xi_{a^1}; reorder to the grid layout.
  const double scale = std::pow(2.0 * std::numbers::pi, -dim);
  QuasiDistribution out;
  out.s = options.s;
  out.grid = grid;
  out.values.resize(grid.size());
  Eigen::ArrayXd imag(grid.size());
  for (Eigen::Index flat = 0; flat < grid.size(); ++flat) {
    const Eigen::VectorXi idx = grid.unflatten(flat);
    Eigen::Index t = 0;
    for (int a = 0; a < dim; ++a) t = t * shape[a] + idx[a ^ 1];
    out.values[flat] = scale * tensor[t].real();
    imag[flat] = scale * tensor[t].imag();
  }
  const double peak = out.values.abs().maxCoeff();
  out.imaginary_residue = peak > 0.0 ? imag.abs().maxCoeff() / peak : 0.0;
  out.state = chi.state();
  out.method = "numeric";
  out.grid_fingerprint = chi.grid_fingerprint();
  out.summarize();
  return out;
}

// --- diagnostics ------------------------------------------------------------------

Negativity negativity(const QuasiDistribution& dist) {
  if (!(std::abs(dist.normalization - 1.0) <= 1e-2))
    throw NormalizationError("distribution normalization " +
                             std::to_string(dist.normalization) +
                             " is not within 1e-2 of 1; negativity volume is meaningless");
  return {dist.negativity, dist.min_value};
}

Eigen::ArrayXd marginal(const QuasiDistribution& dist, int mode, PhaseAxis axis) {
  const PhaseGrid& g = dist.grid;
  const int target = 2 * mode + (axis == PhaseAxis::momentum ? 1 : 0);
  if (mode < 0 || target >= g.dimension()) throw ConfigError("marginal mode out of range");
  std::vector<Eigen::ArrayXd> w(g.dimension());
  for (int d = 0; d < g.dimension(); ++d) w[d] = g.axis_weights(d);
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(g.nodes[target]);
  for (Eigen::Index flat = 0; flat < g.size(); ++flat) {
    const Eigen::VectorXi idx = g.unflatten(flat);
    double weight = 1.0;
    for (int d = 0; d < g.dimension(); ++d)
      if (d != target) weight *= w[d][idx[d]];
    out[idx[target]] += weight * dist.values[flat];
  }
  return out;
}

double peak_scaled_deviation(const QuasiDistribution& a, const QuasiDistribution& b,
                             double floor) {
  if (a.values.size() != b.values.size())
    throw ConfigError("distributions are sampled on different grids");
  const double peak = b.values.abs().maxCoeff();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < b.values.size(); ++i)
    if (std::abs(b.values[i]) > floor * peak)
      worst = std::max(worst, std::abs(a.values[i] - b.values[i]) / peak);
  return worst;
}

}  // namespace tw
