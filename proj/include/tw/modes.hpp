#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tw/errors.hpp"
#include "tw/geometry.hpp"
#include "tw/propagator.hpp"
#include "tw/smearing.hpp"

namespace tw {

/// N local modes with the flattened smearing vector
/// (f1^(1), f2^(1), ..., f1^(N), f2^(N)) and its exact symplectic form.
struct LocalModeSet {
  SpacetimeSpec spec;
  TilingLayout layout;
  BumpProfile profile;
  std::vector<LocalModePair> pairs;

  int size() const { return static_cast<int>(pairs.size()); }
  int phase_dimension() const { return 2 * size(); }

  std::vector<SmearingFunction> flattened() const;
  Eigen::MatrixXd omega() const;

  /// Modes picked by index, in the given order.
  LocalModeSet subset(const std::vector<int>& modes) const;

  /// Every f1 scaled by lambda and every f2 by 1/lambda.
  LocalModeSet rescaled(double lambda) const;
};

/// Block diagonal 2N x 2N matrix with blocks [[0, 1], [-1, 0]].
Eigen::MatrixXd symplectic_form(int modes);

/// One normalized local mode per tile.
LocalModeSet assemble_modes(const TilingLayout& layout, const BumpProfile& profile,
                            const Propagator& propagator);
LocalModeSet assemble_modes(const TilingLayout& layout, const BumpProfile& profile,
                            const MomentumGrid& grid);

/// The linear combination h_eta = Omega(eta, f) = sum_AB eta_A Omega_AB f_B.
SmearingCombination contract(const LocalModeSet& set, const Eigen::VectorXd& eta);
/// Coefficients of h_eta on the flattened smearing vector, Omega^T eta.
Eigen::VectorXd contraction_coefficients(const LocalModeSet& set, const Eigen::VectorXd& eta);

/// On-shell samples of every flattened smearing function.
std::vector<Eigen::ArrayXcd> sample_modes(const LocalModeSet& set, const Propagator& propagator);

struct CCRReport {
  Eigen::MatrixXd measured;  ///< E(f_A, f_B)
  Eigen::MatrixXd residual;  ///< measured - Omega
  double max_abs_residual = 0.0;
  double max_within_mode = 0.0;  ///< largest residual inside the diagonal blocks
  double max_cross_mode = 0.0;   ///< largest residual outside them
  std::string grid_fingerprint;
};

CCRReport ccr_check(const LocalModeSet& set, const Propagator& propagator);

struct CovarianceMatrix {
  Eigen::MatrixXd sigma;  ///< Re W(f_A, f_B)
  Eigen::VectorXd mean;   ///< <(x_k, p_k)>
  std::string state;
  std::string grid_fingerprint;
  double hbar = 1.0;

  int modes() const { return static_cast<int>(sigma.rows() / 2); }
};

/// Covariance of a Gaussian state. Throws NotGaussianError for one-particle states.
CovarianceMatrix covariance(const LocalModeSet& set, const FieldState& state,
                            const Propagator& propagator);

/// Same covariance with every cross-mode block set to zero.
CovarianceMatrix block_diagonal_part(const CovarianceMatrix& cov);

/// Symplectic eigenvalues nu_1 <= ... <= nu_N of a positive definite 2N x 2N
/// matrix: the moduli of the eigenvalues of i Omega Sigma, computed from the
/// Hermitian matrix i S Omega S with S = Sigma^(1/2).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> symplectic_eigenvalues(
    const Eigen::MatrixBase<Derived>& sigma) {
  using Scalar = typename Derived::Scalar;
  using Real = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Complex = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index dim = sigma.rows();
  if (dim % 2 != 0 || sigma.cols() != dim)
    throw ConfigError("symplectic_eigenvalues needs a square matrix of even size");
  Eigen::SelfAdjointEigenSolver<Real> eig(sigma.derived());
  if (eig.eigenvalues().minCoeff() <= Scalar(0))
    throw IllConditionedError("matrix is not positive definite");
  const Real root = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() *
                    eig.eigenvectors().transpose();
  const Real omega = symplectic_form(static_cast<int>(dim / 2)).template cast<Scalar>();
  const Complex h = std::complex<Scalar>(0, 1) * (root * omega * root).template cast<std::complex<Scalar>>();
  Eigen::SelfAdjointEigenSolver<Complex> herm(h);
  return herm.eigenvalues().tail(dim / 2);
}

/// eta -> W(h_eta, h_eta) = eta^T M eta, M = Omega Sigma Omega^T.
struct QuadraticForm {
  Eigen::MatrixXd matrix;

  double operator()(const Eigen::VectorXd& eta) const { return eta.dot(matrix * eta); }
};

QuadraticForm wightman_quadratic_form(const CovarianceMatrix& cov);
/// W(h_eta, h_eta) from a direct smearing of h_eta, independent of the covariance.
double wightman_quadratic_form(const LocalModeSet& set, const FieldState& state,
                               const Eigen::VectorXd& eta, const Propagator& propagator);

}  // namespace tw
