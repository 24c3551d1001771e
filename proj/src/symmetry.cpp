#include "tw/symmetry.hpp"

#include <cmath>
#include <cstdio>

#include <Eigen/Geometry>

#include "tw/parallel.hpp"

namespace tw {
namespace {

Eigen::MatrixXd metric(int n) {
  Eigen::VectorXd d = -Eigen::VectorXd::Ones(n + 1);
  d[0] = 1.0;
  return d.asDiagonal();
}

}  // namespace

void PoincareElement::validate() const {
  const int n = dimension();
  if (n != 1 && n != 3) throw ConfigError("Poincare translation must have 2 or 4 components");
  if (!std::isfinite(rapidity)) throw ConfigError("rapidity must be finite");
  if (n == 1 && rotation.size() != 0 && !rotation.isZero())
    throw ConfigError("rotations exist only in 3+1 dimensions");
  if (n == 3) {
    if (rotation.size() != 0 && rotation.size() != 3)
      throw ConfigError("rotation must be an axis-angle 3-vector");
    if (rapidity != 0.0 && (boost_axis.size() != 3 || !(boost_axis.norm() > 0.0)))
      throw ConfigError("3+1 boost needs a nonzero 3-vector boost_axis");
  }
}

Eigen::MatrixXd PoincareElement::lorentz() const {
  validate();
  const int n = dimension();
  const double ch = std::cosh(rapidity), sh = std::sinh(rapidity);
  Eigen::MatrixXd boost = Eigen::MatrixXd::Identity(n + 1, n + 1);
  if (n == 1) {
    boost << ch, sh, sh, ch;
    return boost;
  }
  Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(4, 4);
  if (rotation.size() == 3 && rotation.norm() > 0.0)
    rot.bottomRightCorner(3, 3) =
        Eigen::AngleAxisd(rotation.norm(), rotation.normalized()).toRotationMatrix();
  if (rapidity != 0.0) {
    const Eigen::Vector3d u = boost_axis.normalized();
    boost(0, 0) = ch;
    boost.block(0, 1, 1, 3) = sh * u.transpose();
    boost.block(1, 0, 3, 1) = sh * u;
    boost.bottomRightCorner(3, 3) = Eigen::Matrix3d::Identity() + (ch - 1.0) * u * u.transpose();
  }
  return boost * rot;
}

Eigen::MatrixXd PoincareElement::inverse_lorentz() const {
  const Eigen::MatrixXd g = metric(dimension());
  return g * lorentz().transpose() * g;
}

bool PoincareElement::proper_orthochronous(double tol) const {
  const Eigen::MatrixXd l = lorentz();
  const Eigen::MatrixXd g = metric(dimension());
  const double scale = l.cwiseAbs().maxCoeff();
  return std::abs(l.determinant() - 1.0) <= tol * scale * scale && l(0, 0) >= 1.0 - tol &&
         (l.transpose() * g * l - g).cwiseAbs().maxCoeff() <= tol * scale * scale;
}

std::string PoincareElement::describe() const {
  std::string s = "rapidity=";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", rapidity);
  s += buf;
  s += " translation=(";
  for (Eigen::Index i = 0; i < translation.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", translation[i]);
    s += (i ? "," : "") + std::string(buf);
  }
  return s + ")";
}

PoincareElement PoincareElement::identity(int dimension) {
  return {Eigen::VectorXd::Zero(dimension + 1), 0.0,
          dimension == 3 ? Eigen::VectorXd(Eigen::Vector3d::UnitX()) : Eigen::VectorXd(),
          Eigen::VectorXd()};
}

PoincareElement PoincareElement::boost(int dimension, double rapidity) {
  PoincareElement e = identity(dimension);
  e.rapidity = rapidity;
  return e;
}

double invariance_check(const LocalModeSet& set, const PoincareElement& element,
                        const FieldState& state, const Propagator& propagator) {
  if (!std::holds_alternative<Vacuum>(state) && !std::holds_alternative<Thermal>(state))
    throw ConfigError("invariance check supports vacuum and thermal states only");
  if (element.dimension() != set.spec.dimension)
    throw ConfigError("Poincare element dimension does not match spacetime");
  const auto f = set.flattened();
  std::vector<Eigen::ArrayXcd> original(f.size()), moved(f.size());
  parallel_for(f.size(), [&](std::size_t a) {
    original[a] = propagator.sample(f[a]);
    moved[a] = propagator.sample(transform_smearing(f[a], element));
  });
  const Eigen::MatrixXd sigma = propagator.two_point_matrix(original, state).real();
  const Eigen::MatrixXd sigma_moved = propagator.two_point_matrix(moved, state).real();
  return (sigma_moved - sigma).cwiseAbs().maxCoeff() / sigma.cwiseAbs().maxCoeff();
}

}  // namespace tw
