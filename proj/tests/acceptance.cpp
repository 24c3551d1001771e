// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include "oracles/fock.hpp"
#include "oracles/position_space.hpp"
#include "support.hpp"
#include "tw/app.hpp"
#include "tw/symmetry.hpp"
#include "tw/wigner.hpp"

namespace {

namespace fs = std::filesystem;

// Pinned tolerances.
constexpr double kCcrTolerance = 1e-6;
constexpr double kRefinementRatio = 5.0;
constexpr double kCcrSeconds = 10.0;
constexpr double kTwoPathTolerance = 1e-9;
constexpr double kUncertaintySlack = 1e-9;
constexpr double kLocalMixedness = 1e-6;
constexpr double kGaussianNegativity = 1e-12;
constexpr double kFockTolerance = 1e-6;
constexpr double kVacuumInvariance = 1e-4;
constexpr double kThermalNonInvariance = 1e-2;
constexpr double kSymmetrySeconds = 60.0;
constexpr double kRescaleTolerance = 1e-10;
constexpr double kScaleTolerance = 1e-12;
constexpr double kOracleTolerance = 1e-6;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Outcome ccr_criterion() {
  const auto t0 = std::chrono::steady_clock::now();
  const tw::Propagator coarse(support::reference_spec(), support::ccr_grid());
  const auto set = tw::assemble_modes(support::reference_layout(), tw::BumpProfile::smooth_bump(),
                                      coarse);
  const double residual = tw::ccr_check(set, coarse).max_abs_residual;
  const double elapsed = seconds_since(t0);
  const tw::Propagator fine(support::reference_spec(), support::ccr_grid().refined());
  const auto set_fine = tw::assemble_modes(support::reference_layout(),
                                           tw::BumpProfile::smooth_bump(), fine);
  const double refined = tw::ccr_check(set_fine, fine).max_abs_residual;
  const double ratio = residual / refined;
  return {residual <= kCcrTolerance && ratio >= kRefinementRatio && elapsed <= kCcrSeconds,
          fmt("residual %.3e at k_max 40, refinement ratio %.1f, %.2f s", residual, ratio,
              elapsed)};
}

Outcome two_path_criterion() {
  const auto& prop = support::reference_propagator();
  std::mt19937_64 rng(101);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (const tw::FieldState& state :
       {tw::FieldState{tw::Vacuum{}}, tw::FieldState{tw::Thermal{1.0}}}) {
    for (const std::vector<int>& modes : {std::vector<int>{0}, std::vector<int>{1, 2}}) {
      const auto set = support::reference_modes().subset(modes);
      const auto q = tw::wightman_quadratic_form(tw::covariance(set, state, prop));
      for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd eta(set.phase_dimension());
        for (auto& e : eta) e = normal(rng);
        const double direct = tw::wightman_quadratic_form(set, state, eta, prop);
        worst = std::max(worst, std::abs(q(eta) - direct) / std::abs(direct));
      }
    }
  }
  return {worst <= kTwoPathTolerance, fmt("max relative difference %.3e", worst)};
}

Outcome uncertainty_criterion() {
  const auto& prop = support::reference_propagator();
  double global = 1e300, local = 1e300;
  for (const tw::FieldState& state :
       {tw::FieldState{tw::Vacuum{}}, tw::FieldState{tw::Thermal{1.0}}}) {
    const auto cov = tw::covariance(support::reference_modes(), state, prop);
    global = std::min(global, tw::symplectic_eigenvalues(cov.sigma).minCoeff());
    for (int k = 0; k < cov.modes(); ++k)
      local = std::min(local,
                       tw::symplectic_eigenvalues(Eigen::MatrixXd(cov.sigma.block(2 * k, 2 * k, 2, 2)))[0]);
  }
  const double half = 0.5 * prop.spec().hbar;
  return {global >= half - kUncertaintySlack && local >= half + kLocalMixedness,
          fmt("min nu %.9f, min single-mode nu %.9f", global, local)};
}

Outcome gaussian_negativity_criterion() {
  const auto& prop = support::reference_propagator();
  double worst = 0.0;
  for (const tw::FieldState& state :
       {tw::FieldState{tw::Vacuum{}}, tw::FieldState{tw::Thermal{0.5}},
        tw::FieldState{tw::Coherent{{{1.0, -0.5}, {0.25, 0.0}}}}}) {
    const auto cov = tw::covariance(support::reference_modes().subset({0, 1}), state, prop);
    const auto w = tw::wigner_gaussian(cov, tw::auto_phase_grid(cov, 21));
    worst = std::max(worst, tw::negativity(w).volume);
  }
  return {worst <= kGaussianNegativity, fmt("max negativity volume %.3e", worst)};
}

Outcome one_particle_criterion() {
  tw::QuasiDistribution fock;
  fock.grid = tw::PhaseGrid::symmetric(2, 4.0, 2001);
  fock.values.resize(fock.grid.size());
  for (Eigen::Index i = 0; i < fock.grid.size(); ++i) {
    const Eigen::VectorXd p = fock.grid.point(i);
    fock.values[i] = oracle::fock1_wigner(p[0], p[1]);
  }
  fock.summarize();
  const double fixture = tw::negativity(fock).volume;
  const double exact = 4.0 * std::exp(-0.5) - 2.0;
  const bool fixture_ok = std::abs(fixture - exact) <= kFockTolerance;

  const auto& prop = support::reference_propagator();
  const auto set = support::reference_modes().subset({0});
  std::vector<double> volumes;
  for (double sigma_k : {1.0, 2.0, 3.0}) {
    const tw::OneParticle state{tw::OneParticleProfile::normalized(
        Eigen::VectorXd::Zero(1), sigma_k, prop.grid(), set.layout.tiles[0].center)};
    const tw::CharacteristicFunction chi(set, state, prop);
    const auto grid = tw::auto_phase_grid(chi.second_moments(), Eigen::Vector2d::Zero(), 121);
    volumes.push_back(tw::negativity(tw::wigner_numeric(chi, grid)).volume);
  }
  const bool ordered = 0.0 < volumes[0] && volumes[0] < volumes[1] && volumes[1] < volumes[2] &&
                       volumes[2] < fixture;
  return {fixture_ok && ordered,
          fmt("fixture %.9f (exact %.9f); widths 1,2,3: %.5f", fixture, exact, volumes[0]) +
              fmt(" %.5f %.5f", volumes[1], volumes[2])};
}

Outcome symmetry_criterion() {
  auto element = tw::PoincareElement::boost(1, 0.5);
  element.translation = Eigen::Vector2d(0.3, 0.7);
  const auto t0 = std::chrono::steady_clock::now();
  const double vac = tw::invariance_check(support::reference_modes(), element, tw::Vacuum{},
                                          support::reference_propagator());
  const double elapsed = seconds_since(t0);
  const double thermal = tw::invariance_check(support::reference_modes(), element,
                                              tw::Thermal{1.0}, support::reference_propagator());
  const tw::Propagator fine(support::reference_spec(), support::reference_grid().refined());
  const auto set_fine = tw::assemble_modes(support::reference_layout(),
                                           tw::BumpProfile::smooth_bump(), fine);
  const double refined = tw::invariance_check(set_fine, element, tw::Vacuum{}, fine);
  const double ratio = vac / refined;
  return {vac <= kVacuumInvariance && ratio >= kRefinementRatio &&
              thermal >= kThermalNonInvariance && elapsed <= kSymmetrySeconds,
          fmt("vacuum %.3e, refinement ratio %.1f, thermal %.3e, %.2f s", vac, ratio, thermal,
              elapsed)};
}

Outcome rescale_criterion() {
  const auto& prop = support::reference_propagator();
  double worst = 0.0;
  for (int k = 0; k < 4; ++k) {
    const auto set = support::reference_modes().subset({k});
    const auto a = tw::covariance(set, tw::Vacuum{}, prop);
    const auto b = tw::covariance(set.rescaled(2.0), tw::Vacuum{}, prop);
    const auto wa = tw::wigner_gaussian(a, tw::auto_phase_grid(a, 41));
    const auto wb = tw::wigner_gaussian(b, tw::auto_phase_grid(b, 41));
    worst = std::max(worst, (wa.values - wb.values).abs().maxCoeff());
  }
  return {worst <= kRescaleTolerance, fmt("max sample difference %.3e", worst)};
}

Outcome scales_criterion() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = trial % 2 == 0 ? 1 : 3;
    const int per_axis = 1 + static_cast<int>(4 * u(rng));
    const double l_uv = 0.2 + 2.0 * u(rng), eps = 0.01 + 0.05 * u(rng);
    const double corridor = 2.0 * eps + 0.1 + u(rng);
    auto layout = tw::build_tiling({n, 1.0, 0.0, 1.0, 0.0}, per_axis, l_uv, eps, corridor);
    layout = tw::translated(layout, Eigen::VectorXd::Constant(n, 10.0 * (u(rng) - 0.5)));
    const auto scales = tw::covariant_scales(layout);
    const double count = std::pow(per_axis, n);
    const double expected = std::pow(count * std::pow(l_uv, n), 1.0 / n);
    worst = std::max(worst, std::abs(scales.l_ir - expected) / expected);
    worst = std::max(worst, std::abs(scales.l_uv - l_uv) / l_uv);
  }
  return {worst <= kScaleTolerance, fmt("max relative error %.3e over 10 layouts", worst)};
}

Outcome oracle_criterion() {
  using support::bump_function;
  std::vector<std::pair<tw::SmearingFunction, tw::SmearingFunction>> cases = {
      {bump_function(0.0, 0.5, 0), bump_function(0.0, 0.5, 1)},
      {bump_function(0.0, 0.5, 0), bump_function(0.3, 0.5, 1)},
      {bump_function(0.0, 0.4, 1), bump_function(0.3, 0.7, 0)},
      {bump_function(0.0, 0.5, 0), bump_function(0.2, 0.5, 0)},
      {bump_function(0.0, 0.5, 0), bump_function(1.3, 0.5, 1)}};
  cases[3].second.t0 = 0.04;
  double worst = 0.0;
  for (const auto& [f, g] : cases) {
    const double momentum = tw::causal_smeared(support::reference_propagator(), f, g);
    worst = std::max(worst, std::abs(momentum - oracle::causal_position_space(f, g, 1.0)));
  }
  return {worst <= kOracleTolerance, fmt("max |difference| %.3e over 5 geometries", worst)};
}

std::map<std::string, std::string> read_outputs(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() != "run_manifest.json")
      out[e.path().filename().string()] = tw::read_file(e.path().string());
  return out;
}

Outcome determinism_criterion() {
  const fs::path root = fs::temp_directory_path() / "tw_acceptance";
  fs::remove_all(root);
  std::vector<std::map<std::string, std::string>> runs;
  const std::vector<std::pair<std::string, int>> plan = {{"a", 1}, {"b", 1}, {"c", 1}, {"d", 4}};
  for (const auto& [name, threads] : plan) {
    const auto cfg = tw::RunConfig::load(
        {{"output", {{"dir", (root / name).string()}, {"numeric", true}}},
         {"cache_dir", (root / "cache").string()},
         {"threads", threads}});
    tw::run_command("all", cfg);
    runs.push_back(read_outputs(root / name));
  }
  tw::set_thread_count(1);
  bool same = true;
  for (std::size_t i = 1; i < runs.size(); ++i) same = same && runs[i] == runs[0];
  const std::size_t files = runs[0].size();
  fs::remove_all(root);
  return {same && files >= 10,
          fmt("%.0f artifacts identical across 3 runs and 1 vs 4 threads", double(files))};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"CCR on the pinned grid", ccr_criterion},
      {"two-path Wightman consistency", two_path_criterion},
      {"uncertainty relation and local mixedness", uncertainty_criterion},
      {"Gaussian states have no negativity", gaussian_negativity_criterion},
      {"one-particle negativity", one_particle_criterion},
      {"Poincare invariance", symmetry_criterion},
      {"mode rescaling", rescale_criterion},
      {"covariant scales", scales_criterion},
      {"position-space oracle", oracle_criterion},
      {"byte-deterministic artifacts", determinism_criterion},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
