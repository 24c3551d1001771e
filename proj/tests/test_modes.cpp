#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"
#include "tw/modes.hpp"

namespace {

using support::reference_modes;
using support::reference_propagator;

TEST(SymplecticForm, Blocks) {
  Eigen::MatrixXd one(2, 2);
  one << 0, 1, -1, 0;
  EXPECT_EQ(tw::symplectic_form(1), one);
  const auto three = tw::symplectic_form(3);
  ASSERT_EQ(three.rows(), 6);
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      const double expected = (a / 2 == b / 2) ? one(a % 2, b % 2) : 0.0;
      EXPECT_EQ(three(a, b), expected);
    }
  EXPECT_EQ(three.transpose(), -three);
  EXPECT_EQ(three * three, -Eigen::MatrixXd::Identity(6, 6));
}

TEST(Assemble, ReferenceLayoutPairs) {
  const auto& set = reference_modes();
  ASSERT_EQ(set.size(), 4);
  EXPECT_EQ(set.phase_dimension(), 8);
  const auto flat = set.flattened();
  ASSERT_EQ(flat.size(), 8u);
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(flat[2 * k].tile, k);
    EXPECT_EQ(flat[2 * k].derivative_order, 0);
    EXPECT_EQ(flat[2 * k + 1].derivative_order, 1);
  }
  EXPECT_EQ(set.omega(), tw::symplectic_form(4));
}

TEST(Assemble, RejectsCausalOverlap) {
  auto layout = support::reference_layout(2);
  layout.tiles[1].center[0] = 0.4;
  EXPECT_THROW(
      tw::assemble_modes(layout, tw::BumpProfile::smooth_bump(), reference_propagator()),
      tw::CausalOverlapError);
}

TEST(Assemble, GridOverloadIsIdentical) {
  const auto a = tw::assemble_modes(support::reference_layout(2), tw::BumpProfile::smooth_bump(),
                                    reference_propagator());
  const auto b = tw::assemble_modes(support::reference_layout(2), tw::BumpProfile::smooth_bump(),
                                    support::reference_grid());
  for (int k = 0; k < 2; ++k) EXPECT_EQ(a.pairs[k].raw_commutator, b.pairs[k].raw_commutator);
}

TEST(CCR, ReferenceGrid) {
  const auto report = tw::ccr_check(reference_modes(), reference_propagator());
  EXPECT_LE(report.max_within_mode, 1e-10);
  EXPECT_LE(report.max_cross_mode, 1e-8);
  EXPECT_EQ(report.measured.transpose(), -report.measured);
  EXPECT_EQ(report.grid_fingerprint, support::reference_grid().fingerprint());
  EXPECT_NEAR((report.measured - tw::symplectic_form(4)).cwiseAbs().maxCoeff(),
              report.max_abs_residual, 0.0);
}

TEST(CCR, ResidualShrinksUnderRefinement) {
  const tw::Propagator coarse(support::reference_spec(), support::ccr_grid());
  const tw::Propagator fine(support::reference_spec(), support::ccr_grid().refined());
  const auto a = tw::assemble_modes(support::reference_layout(), tw::BumpProfile::smooth_bump(),
                                    coarse);
  const auto ra = tw::ccr_check(a, coarse);
  const auto b = tw::assemble_modes(support::reference_layout(), tw::BumpProfile::smooth_bump(),
                                    fine);
  const auto rb = tw::ccr_check(b, fine);
  EXPECT_LE(ra.max_abs_residual, 1e-6);
  EXPECT_GE(ra.max_abs_residual, 5.0 * rb.max_abs_residual);
}

TEST(Covariance, SymmetricPositiveAndPhysical) {
  const auto cov = tw::covariance(reference_modes(), tw::Vacuum{}, reference_propagator());
  EXPECT_EQ(cov.sigma, cov.sigma.transpose());
  EXPECT_EQ(cov.mean, Eigen::VectorXd::Zero(8));
  EXPECT_EQ(cov.modes(), 4);
  EXPECT_EQ(cov.state, "vacuum");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov.sigma);
  EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
  const Eigen::VectorXd nu = tw::symplectic_eigenvalues(cov.sigma);
  EXPECT_GE(nu.minCoeff(), 0.5 - 1e-9);
  // Local restrictions of the vacuum are mixed.
  for (int k = 0; k < 4; ++k) {
    const Eigen::Matrix2d block = cov.sigma.block<2, 2>(2 * k, 2 * k);
    const double nu_k = tw::symplectic_eigenvalues(block)[0];
    EXPECT_NEAR(nu_k, std::sqrt(block.determinant()), 1e-12);
    EXPECT_GT(nu_k, 0.5 + 1e-6);
  }
}

TEST(Covariance, ThermalExceedsVacuum) {
  const auto vac = tw::covariance(reference_modes(), tw::Vacuum{}, reference_propagator());
  const auto th = tw::covariance(reference_modes(), tw::Thermal{1.0}, reference_propagator());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(th.sigma - vac.sigma);
  EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
  EXPECT_GT(tw::symplectic_eigenvalues(th.sigma).minCoeff(),
            tw::symplectic_eigenvalues(vac.sigma).minCoeff());
}

TEST(Covariance, CoherentShiftsMeanOnly) {
  const auto set = reference_modes().subset({0, 2});
  const tw::Coherent state{{{0.5, -0.25}, {0.0, 1.0}}};
  const auto vac = tw::covariance(set, tw::Vacuum{}, reference_propagator());
  const auto coh = tw::covariance(set, state, reference_propagator());
  EXPECT_EQ(coh.sigma, vac.sigma);
  const double r = std::sqrt(2.0);
  EXPECT_NEAR(coh.mean[0], r * 0.5, 1e-15);
  EXPECT_NEAR(coh.mean[1], -r * 0.25, 1e-15);
  EXPECT_NEAR(coh.mean[2], 0.0, 1e-15);
  EXPECT_NEAR(coh.mean[3], r, 1e-15);
  EXPECT_THROW(tw::covariance(set, tw::Coherent{{1.0}}, reference_propagator()), tw::ConfigError);
}

TEST(Covariance, OneParticleIsNotGaussian) {
  const auto G = tw::OneParticleProfile::normalized(Eigen::VectorXd::Zero(1), 2.0,
                                                    support::reference_grid());
  EXPECT_THROW(tw::covariance(reference_modes(), tw::OneParticle{G}, reference_propagator()),
               tw::NotGaussianError);
}

TEST(Covariance, BlockDiagonalPart) {
  const auto cov = tw::covariance(reference_modes(), tw::Vacuum{}, reference_propagator());
  const auto diag = tw::block_diagonal_part(cov);
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b)
      EXPECT_EQ(diag.sigma(a, b), a / 2 == b / 2 ? cov.sigma(a, b) : 0.0);
}

TEST(SymplecticEigenvalues, KnownSpectrum) {
  // S diag(a, a, b, b) S^T for symplectic S has spectrum {a, b}.
  Eigen::MatrixXd sigma = Eigen::Vector4d(0.7, 0.7, 2.0, 2.0).asDiagonal();
  Eigen::MatrixXd squeeze = Eigen::Vector4d(2.0, 0.5, 1.0, 1.0).asDiagonal();
  const Eigen::MatrixXd s = squeeze * sigma * squeeze.transpose();
  const Eigen::VectorXd nu = tw::symplectic_eigenvalues(s);
  EXPECT_NEAR(nu[0], 0.7, 1e-12);
  EXPECT_NEAR(nu[1], 2.0, 1e-12);
  EXPECT_THROW(tw::symplectic_eigenvalues(Eigen::MatrixXd::Identity(3, 3)), tw::ConfigError);
  EXPECT_THROW(tw::symplectic_eigenvalues(Eigen::MatrixXd(-Eigen::MatrixXd::Identity(2, 2))),
               tw::IllConditionedError);
}

TEST(QuadraticForm, Values) {
  const auto set = reference_modes().subset({0});
  const auto& prop = reference_propagator();
  const auto cov = tw::covariance(set, tw::Vacuum{}, prop);
  const auto q = tw::wightman_quadratic_form(cov);
  EXPECT_EQ(q(Eigen::Vector2d::Zero()), 0.0);
  // Omega^T (1, 0) = (0, 1): h_eta = f2.
  const double w22 = tw::wightman_smeared(prop, set.pairs[0].f2, set.pairs[0].f2).value.real();
  EXPECT_NEAR(q(Eigen::Vector2d(1.0, 0.0)), w22, 1e-12 * w22);
}

TEST(QuadraticForm, TwoRoutesAgree) {
  const auto& prop = reference_propagator();
  const auto set = reference_modes().subset({0, 1});
  for (const tw::FieldState& state : {tw::FieldState{tw::Vacuum{}}, tw::FieldState{tw::Thermal{1.0}}}) {
    const auto q = tw::wightman_quadratic_form(tw::covariance(set, state, prop));
    const Eigen::Vector4d eta(0.3, -1.1, 0.7, 0.25);
    const double direct = tw::wightman_quadratic_form(set, state, eta, prop);
    EXPECT_NEAR(q(eta), direct, 1e-9 * std::abs(direct));
  }
}

TEST(Contract, CoefficientsAndCombination) {
  const auto set = reference_modes().subset({1});
  const Eigen::Vector2d eta(2.0, -3.0);
  const Eigen::VectorXd c = tw::contraction_coefficients(set, eta);
  EXPECT_EQ(c, Eigen::Vector2d(3.0, 2.0));
  const auto h = tw::contract(set, eta);
  ASSERT_EQ(h.terms.size(), 2u);
  EXPECT_EQ(h.terms[0].coefficient, 3.0);
  EXPECT_EQ(h.terms[1].coefficient, 2.0);
}

TEST(Subset, Rescaled) {
  const auto set = reference_modes().subset({3, 1});
  EXPECT_EQ(set.pairs[0].f1.tile, 3);
  EXPECT_EQ(set.pairs[1].f1.tile, 1);
  const auto r = set.rescaled(2.0);
  EXPECT_DOUBLE_EQ(r.pairs[0].f1.amplitude, 2.0 * set.pairs[0].f1.amplitude);
  EXPECT_DOUBLE_EQ(r.pairs[0].f2.amplitude, 0.5 * set.pairs[0].f2.amplitude);
  EXPECT_THROW(reference_modes().subset({4}), tw::ConfigError);
}

TEST(Dimension3, SingleModeSmoke) {
  const tw::SpacetimeSpec spec{3, 1.0, 0.0, 1.0, 0.0};
  const tw::Propagator prop(spec, tw::make_momentum_grid(3, 40.0, 8, 8));
  const auto layout = tw::build_tiling(spec, 1, 1.0, 0.05, 0.3);
  const auto set = tw::assemble_modes(layout, tw::BumpProfile::smooth_bump(), prop);
  const auto report = tw::ccr_check(set, prop);
  EXPECT_LE(report.max_within_mode, 1e-10);
  const auto cov = tw::covariance(set, tw::Vacuum{}, prop);
  EXPECT_GT(tw::symplectic_eigenvalues(cov.sigma)[0], 0.5);
}

}  // namespace
