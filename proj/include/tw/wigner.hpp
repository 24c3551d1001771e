#pragma once

#include <complex>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "tw/modes.hpp"
#include "tw/propagator.hpp"

namespace tw {

/// Uniform tensor grid over the 2N phase-space coordinates
/// xi = (x_1, p_1, ..., x_N, p_N); the last axis varies fastest.
struct PhaseGrid {
  static constexpr double kMaxPoints = 5e7;

  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::VectorXi nodes;

  int dimension() const { return static_cast<int>(nodes.size()); }
  Eigen::Index size() const;
  double spacing(int axis) const;
  double coordinate(int axis, Eigen::Index i) const;
  /// Multi-index of a flat position.
  Eigen::VectorXi unflatten(Eigen::Index flat) const;
  Eigen::VectorXd point(Eigen::Index flat) const;
  /// Trapezoid weights along one axis.
  Eigen::ArrayXd axis_weights(int axis) const;
  /// Product trapezoid weights for every grid point.
  Eigen::ArrayXd weights() const;

  /// Throws ConfigError on a malformed grid, CostGuardError beyond kMaxPoints.
  void validate() const;

  static PhaseGrid symmetric(int dimension, double half_range, int nodes_per_axis);
};

/// Grid centred on `mean` reaching n_sigma standard deviations of the given
/// second-moment matrix along every axis.
PhaseGrid auto_phase_grid(const Eigen::MatrixXd& second_moments, const Eigen::VectorXd& mean,
                          int nodes_per_axis, double n_sigma = 6.0);
PhaseGrid auto_phase_grid(const CovarianceMatrix& cov, int nodes_per_axis, double n_sigma = 6.0);

struct QuasiDistribution {
  double s = 0.0;
  PhaseGrid grid;
  Eigen::ArrayXd values;
  double normalization = 0.0;  ///< trapezoid integral of values
  double min_value = 0.0;
  double max_value = 0.0;
  double negativity = 0.0;         ///< trapezoid integral of |W| minus that of W
  double imaginary_residue = 0.0;  ///< numeric path: max |Im W| / max |W|
  std::string state;
  std::string method;  ///< "gaussian" or "numeric"
  std::string grid_fingerprint;

  /// Fills normalization, extrema and negativity from values.
  void summarize();
};

/// chi(eta) = omega(exp(i phi(h_eta))) for any supported state.
///
/// Gaussian states: exp(-eta^T M eta / 2) exp(i eta^T Omega mean).
/// One-particle state on the normalized mode G:
///   exp(-eta^T M eta / 2) (1 - |beta_G(h_eta)|^2), M from the vacuum.
class CharacteristicFunction {
 public:
  CharacteristicFunction(const LocalModeSet& set, const FieldState& state,
                         const Propagator& propagator);

  std::complex<double> operator()(const Eigen::VectorXd& eta) const;

  int phase_dimension() const { return static_cast<int>(quadratic_.rows()); }
  double hbar() const { return hbar_; }
  bool gaussian() const { return overlaps_.size() == 0; }
  const std::string& state() const { return state_; }
  const std::string& grid_fingerprint() const { return fingerprint_; }

  /// Covariance of the underlying Gaussian part (vacuum for one-particle states).
  const CovarianceMatrix& covariance() const { return cov_; }
  const Eigen::MatrixXd& quadratic() const { return quadratic_; }

  /// b_A = beta_G(f_A); zero length for Gaussian states.
  const Eigen::VectorXcd& overlaps() const { return overlaps_; }
  /// beta_G(h_eta) = sum_A (Omega^T eta)_A b_A.
  std::complex<double> beta(const Eigen::VectorXd& eta) const;

  /// Symmetrized second moments <{xi_A, xi_B}>/2 of the state.
  Eigen::MatrixXd second_moments() const;

  /// tr(Re(b^* b^T) Sigma^{-1}); for one mode W(0) is proportional to 1 - q.
  double overlap_measure() const;

 private:
  CovarianceMatrix cov_;
  Eigen::MatrixXd omega_;
  Eigen::MatrixXd quadratic_;
  Eigen::VectorXcd overlaps_;
  double hbar_ = 1.0;
  std::string state_;
  std::string fingerprint_;
};

std::complex<double> characteristic(const LocalModeSet& set, const FieldState& state,
                                    const Eigen::VectorXd& eta, const Propagator& propagator);

/// Closed-form s-ordered distribution of a Gaussian state with
/// Sigma_s = Sigma - (s hbar / 2) I. s = 0 is the Wigner function.
QuasiDistribution s_ordered(const CovarianceMatrix& cov, double s, const PhaseGrid& grid);
QuasiDistribution wigner_gaussian(const CovarianceMatrix& cov, const PhaseGrid& grid);
QuasiDistribution wigner_gaussian(const LocalModeSet& set, const FieldState& state,
                                  const Propagator& propagator, const PhaseGrid& grid);

struct NumericOptions {
  static constexpr int kMaxModes = 2;
  static constexpr double kBoundaryTolerance = 1e-8;

  double eta_cutoff = 0.0;  ///< 0 chooses a per-axis cutoff from the quadratic form
  int eta_nodes = 0;        ///< 0 chooses 64 (N = 1) or 48 (N = 2)
  double s = 0.0;           ///< ordering; only s <= 0 is accepted here
};

/// Direct quadrature of
///   W_s(xi) = (2 pi)^{-2N} integral d^{2N} eta exp(-i eta^T Omega xi) chi(eta) e^{s hbar |eta|^2 / 4}
/// with tensor Gauss-Legendre nodes, contracted one axis at a time.
QuasiDistribution wigner_numeric(const CharacteristicFunction& chi, const PhaseGrid& grid,
                                 const NumericOptions& options = {});

/// Per-axis eta cutoffs used by wigner_numeric for the given options.
Eigen::VectorXd eta_cutoffs(const CharacteristicFunction& chi, const NumericOptions& options);

struct Negativity {
  double volume = 0.0;
  double min_value = 0.0;
};

/// Throws NormalizationError when the normalization is off by more than 1e-2.
Negativity negativity(const QuasiDistribution& dist);

enum class PhaseAxis { position, momentum };

/// Density along one coordinate with every other coordinate integrated out.
Eigen::ArrayXd marginal(const QuasiDistribution& dist, int mode, PhaseAxis axis);

/// Largest |a - b| / peak(b) over points where |b| > floor * peak(b).
double peak_scaled_deviation(const QuasiDistribution& a, const QuasiDistribution& b,
                             double floor = 1e-6);

}  // namespace tw
