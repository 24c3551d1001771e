#include "tw/quadrature.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "tw/errors.hpp"

namespace tw {

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw ConfigError("gauss_legendre: need at least one node");
  QuadratureRule rule{Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton iteration on P_n from the Tricomi initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

QuadratureRule composite_gauss_legendre(double a, double b, int panels, int nodes_per_panel) {
  if (panels < 1) throw ConfigError("composite rule needs at least one panel");
  const QuadratureRule base = gauss_legendre(nodes_per_panel);
  QuadratureRule rule{Eigen::ArrayXd(panels * nodes_per_panel),
                      Eigen::ArrayXd(panels * nodes_per_panel)};
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double mid = lo + 0.5 * width;
    for (int j = 0; j < nodes_per_panel; ++j) {
      rule.nodes[p * nodes_per_panel + j] = mid + 0.5 * width * base.nodes[j];
      rule.weights[p * nodes_per_panel + j] = 0.5 * width * base.weights[j];
    }
  }
  return rule;
}

MomentumGrid make_momentum_grid(int dimension, double k_max, int panels, int nodes_per_panel) {
  if (dimension != 1 && dimension != 3)
    throw ConfigError("momentum grid: spatial dimension must be 1 or 3");
  if (!(k_max > 0.0)) throw ConfigError("momentum grid: k_max must be positive");
  if (panels < 1 || nodes_per_panel < 1)
    throw ConfigError("momentum grid: panels and nodes must be positive");

  MomentumGrid g;
  g.dimension = dimension;
  g.k_max = k_max;
  g.panels = panels;
  g.nodes_per_panel = nodes_per_panel;
  g.axis = composite_gauss_legendre(-k_max, k_max, panels, nodes_per_panel);

  const Eigen::Index m = g.axis.size();
  if (dimension == 1) {
    g.k = g.axis.nodes.matrix().transpose();
    g.weights = g.axis.weights;
  } else {
    const Eigen::Index total = m * m * m;
    g.k.resize(3, total);
    g.weights.resize(total);
    Eigen::Index idx = 0;
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index l = 0; l < m; ++l, ++idx) {
          g.k(0, idx) = g.axis.nodes[i];
          g.k(1, idx) = g.axis.nodes[j];
          g.k(2, idx) = g.axis.nodes[l];
          g.weights[idx] = g.axis.weights[i] * g.axis.weights[j] * g.axis.weights[l];
        }
  }
  return g;
}

std::string MomentumGrid::fingerprint() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "momentum-grid|n=%d|k_max=%.17g|panels=%d|nodes=%d",
                dimension, k_max, panels, nodes_per_panel);
  return fnv1a_hex(buf);
}

MomentumGrid MomentumGrid::refined() const {
  return make_momentum_grid(dimension, 2.0 * k_max, 2 * panels, nodes_per_panel);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace tw
