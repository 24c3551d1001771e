#pragma once

#include <complex>
#include <string>

#include <Eigen/Dense>

#include "tw/modes.hpp"
#include "tw/propagator.hpp"
#include "tw/smearing.hpp"

namespace tw {

/// Poincare element x -> Lambda x + a with Lambda = B(rapidity, boost_axis) R(rotation).
/// rotation is an axis-angle vector (3+1 only); boost_axis is ignored in 1+1.
struct PoincareElement {
  Eigen::VectorXd translation;  ///< (a^0, a^1, ..., a^n)
  double rapidity = 0.0;
  Eigen::VectorXd boost_axis;
  Eigen::VectorXd rotation;

  int dimension() const { return static_cast<int>(translation.size()) - 1; }

  /// (n+1) x (n+1) Lorentz matrix acting on contravariant (t, x).
  Eigen::MatrixXd lorentz() const;
  Eigen::MatrixXd inverse_lorentz() const;

  /// det = +1, Lambda^0_0 >= 1 and Lambda^T G Lambda = G with G = diag(1, -1, ...).
  bool proper_orthochronous(double tol = 1e-12) const;

  /// Throws ConfigError on malformed fields.
  void validate() const;

  std::string describe() const;

  static PoincareElement identity(int dimension);
  static PoincareElement boost(int dimension, double rapidity);
};

/// Push-forward f' = f o (Lambda, a)^{-1}, evaluated in momentum space as
///   f'^(p) = exp(i (omega a^0 - k.a)) f^(Lambda^{-1} p).
template <MomentumSmearing F>
struct TransformedSmearing {
  F base;
  Eigen::VectorXd translation;
  Eigen::MatrixXd inverse;

  std::complex<double> momentum_transform(double omega, const Eigen::VectorXd& k) const {
    const Eigen::Index n = k.size();
    Eigen::VectorXd p(n + 1);
    p << omega, k;
    const Eigen::VectorXd q = inverse * p;
    const double phase = omega * translation[0] - k.dot(translation.tail(n));
    return std::polar(1.0, phase) * std::complex<double>(base.momentum_transform(q[0], q.tail(n)));
  }
};

template <MomentumSmearing F>
TransformedSmearing<F> transform_smearing(const F& f, const PoincareElement& element) {
  element.validate();
  return {f, element.translation, element.inverse_lorentz()};
}

/// ||Sigma' - Sigma||_max / ||Sigma||_max where Sigma' uses every smearing
/// function transformed by the element. State must be vacuum or thermal.
double invariance_check(const LocalModeSet& set, const PoincareElement& element,
                        const FieldState& state, const Propagator& propagator);

}  // namespace tw
