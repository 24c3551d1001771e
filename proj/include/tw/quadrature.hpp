#pragma once

#include <complex>
#include <string>

#include <Eigen/Dense>

namespace tw {

/// Nodes and weights of a one-dimensional quadrature rule.
struct QuadratureRule {
  Eigen::ArrayXd nodes;
  Eigen::ArrayXd weights;
  Eigen::Index size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

/// `panels` equal panels on [a, b], each with an n-point Gauss-Legendre rule.
QuadratureRule composite_gauss_legendre(double a, double b, int panels, int nodes_per_panel);

/// Summation over a fixed binary tree. The association order depends only on
/// the length of the input, so results are reproducible bit for bit.
template <typename Scalar>
Scalar pairwise_sum(const Scalar* x, Eigen::Index n) {
  if (n <= 32) {
    Scalar s(0);
    for (Eigen::Index i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const Eigen::Index half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

template <typename Derived>
typename Derived::Scalar pairwise_sum(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Array<Scalar, Eigen::Dynamic, 1> v = x.derived().reshaped();
  return pairwise_sum(v.data(), v.size());
}

/// Momentum-space quadrature for the mode integral d^n k.
///
/// In one spatial dimension the nodes are a composite Gauss-Legendre rule on
/// [-k_max, k_max]. In three dimensions the same per-axis rule is used as a
/// Cartesian product.
struct MomentumGrid {
  int dimension = 1;
  double k_max = 0.0;
  int panels = 0;
  int nodes_per_panel = 0;

  QuadratureRule axis;       ///< per-axis rule
  Eigen::MatrixXd k;         ///< dimension x size() node coordinates
  Eigen::ArrayXd weights;    ///< product weights, all positive

  Eigen::Index size() const { return weights.size(); }
  int nodes_per_axis() const { return panels * nodes_per_panel; }

  /// Hex digest of the defining parameters.
  std::string fingerprint() const;

  /// Grid with k_max and node count both doubled.
  MomentumGrid refined() const;
};

MomentumGrid make_momentum_grid(int dimension, double k_max, int panels, int nodes_per_panel);

/// 64-bit FNV-1a of a byte string, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace tw
