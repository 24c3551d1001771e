#include <cstdlib>
#include <filesystem>

#include <gtest/gtest.h>

#include "tw/app.hpp"

namespace {

namespace fs = std::filesystem;

std::string scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tw_app_" + name);
  fs::remove_all(p);
  return p.string();
}

tw::json small_config(const std::string& dir) {
  return {{"tiling", {{"tiles_per_axis", 2}}},
          {"quadrature", {{"k_max", 40.0}, {"panels", 64}, {"nodes", 32}}},
          {"output", {{"dir", dir}, {"phase_nodes", 21}}}};
}

std::vector<tw::Issue> issues_of(const tw::json& user, const std::vector<std::string>& ov = {}) {
  try {
    tw::RunConfig::load(user, ov);
  } catch (const tw::ValidationError& e) {
    return e.issues();
  }
  return {};
}

TEST(Config, DefaultsAreTheReferenceSetup) {
  const auto c = tw::RunConfig::load(tw::json::object());
  EXPECT_EQ(c.spec.dimension, 1);
  EXPECT_EQ(c.spec.mass, 1.0);
  EXPECT_EQ(c.layout.size(), 4);
  EXPECT_EQ(c.k_max, 80.0);
  EXPECT_EQ(c.grid().size(), 4096);
  EXPECT_EQ(c.output.modes, std::vector<int>{0});
  EXPECT_EQ(c.output.s_values, (std::vector<double>{0.0, -1.0}));
  EXPECT_EQ(c.element.rapidity, 0.5);
  EXPECT_EQ(c.resolved, tw::default_config());
}

TEST(Config, DefaultModesForSmallLayouts) {
  const auto c = tw::RunConfig::load(small_config("x"));
  EXPECT_EQ(c.output.modes, (std::vector<int>{0, 1}));
}

TEST(Config, UnknownKeysRejected) {
  const auto issues = issues_of({{"spacetime", {{"mass", 2.0}}}, {"extra", 1}});
  ASSERT_EQ(issues.size(), 2u);
  EXPECT_EQ(issues[0].code, "CONFIG");
  EXPECT_NE(issues[0].message.find("'extra'"), std::string::npos);
  EXPECT_NE(issues[1].message.find("'spacetime.mass'"), std::string::npos);
  EXPECT_THROW(tw::RunConfig::load(tw::json::object(), {"quadrature.kmax=3"}), tw::ValidationError);
}

TEST(Config, CollectsEveryProblem) {
  const auto issues =
      issues_of({{"spacetime", {{"m", -1.0}}}, {"state", {{"kind", "squeezed"}}},
                 {"output", {{"s", {0.0, 1.5}}, {"phase_nodes", 1}}}});
  std::vector<std::string> codes;
  for (const auto& i : issues) codes.push_back(i.code);
  EXPECT_GE(issues.size(), 3u);
  EXPECT_NE(std::find(codes.begin(), codes.end(), "ORDERING_DOMAIN"), codes.end());
  EXPECT_NE(std::find(codes.begin(), codes.end(), "CONFIG"), codes.end());
}

TEST(Config, CausalOverlapNamesPairs) {
  const auto issues = issues_of({{"tiling", {{"corridor", 0.05}}}});
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].code, "CAUSAL_OVERLAP");
  EXPECT_EQ(issues[0].pairs, (std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}}));
}

TEST(Config, ExplicitTiles) {
  const tw::json tiles = tw::json::parse(R"([
    {"center": [0.0], "half_widths": [0.5]},
    {"center": [1.05], "half_widths": [0.5]},
    {"center": [3.0], "half_widths": [0.5]}])");
  const auto issues = issues_of({{"tiling", {{"tiles", tiles}}}});
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].code, "CAUSAL_OVERLAP");
  EXPECT_EQ(issues[0].pairs, (std::vector<std::pair<int, int>>{{0, 1}}));

  tw::json ok = tiles;
  ok[1]["center"] = {1.5};
  const auto c = tw::RunConfig::load({{"tiling", {{"tiles", ok}}}});
  EXPECT_EQ(c.layout.size(), 3);
  EXPECT_EQ(c.layout.tiles[2].center[0], 3.0);
}

TEST(Config, OverridesAndHash) {
  const auto base = tw::RunConfig::load(tw::json::object());
  const auto moved = tw::RunConfig::load(tw::json::object(), {"output.dir=elsewhere", "threads=3"});
  EXPECT_EQ(moved.output.dir, "elsewhere");
  EXPECT_EQ(moved.threads, 3);
  EXPECT_EQ(base.hash(), moved.hash());
  const auto heavier = tw::RunConfig::load(tw::json::object(), {"spacetime.m=2"});
  EXPECT_EQ(heavier.spec.mass, 2.0);
  EXPECT_NE(base.hash(), heavier.hash());
  const auto thermal = tw::RunConfig::load(tw::json::object(), {"state.kind=thermal"});
  EXPECT_EQ(thermal.state.at("kind"), "thermal");
  tw::json cfg = tw::default_config();
  EXPECT_THROW(tw::apply_override(cfg, "novalue"), tw::ConfigError);
  EXPECT_THROW(tw::apply_override(cfg, "spacetime.m.x=1"), tw::ConfigError);
}

TEST(Config, CacheDirFromEnvironment) {
  ::setenv("TWIG_CACHE_DIR", "/tmp/tw-env-cache", 1);
  const auto c = tw::RunConfig::load(tw::json::object());
  const auto o = tw::RunConfig::load(tw::json::object(), {"cache_dir=/tmp/flag"});
  ::unsetenv("TWIG_CACHE_DIR");
  EXPECT_EQ(c.cache_dir, "/tmp/tw-env-cache");
  EXPECT_EQ(o.cache_dir, "/tmp/flag");
}

TEST(Config, CostGuards) {
  EXPECT_THROW(tw::RunConfig::load({{"quadrature", {{"panels", 1000000}}}}), tw::CostGuardError);
  EXPECT_THROW(tw::RunConfig::load({{"output", {{"modes", {0, 1, 2}}, {"phase_nodes", 41}}}}),
               tw::CostGuardError);
  try {
    tw::RunConfig::load({{"quadrature", {{"panels", 1000000}}}});
  } catch (const tw::Error& e) {
    EXPECT_EQ(e.exit_code(), 4);
    EXPECT_EQ(tw::error_report(e).at("code"), "COST_GUARD");
  }
}

TEST(ErrorReport, Shapes) {
  const tw::CausalOverlapError overlap("overlap", {{0, 1}});
  const auto r = tw::error_report(overlap);
  EXPECT_EQ(r.at("status"), "error");
  EXPECT_EQ(r.at("exit_code"), 2);
  EXPECT_EQ(r.at("errors")[0].at("pairs"), tw::json::parse("[[0, 1]]"));
  EXPECT_EQ(tw::error_report(tw::OrderingDomainError("s")).at("exit_code"), 3);
  EXPECT_EQ(tw::error_report(tw::NotGaussianError("g")).at("code"), "NOT_GAUSSIAN");
  try {
    tw::RunConfig::load({{"tiling", {{"corridor", 0.05}}}, {"bogus", 1}});
    FAIL();
  } catch (const tw::ValidationError& e) {
    const auto v = tw::error_report(e);
    EXPECT_EQ(v.at("exit_code"), 2);
    EXPECT_EQ(v.at("errors").size(), 1u);  // unknown keys stop validation early
  }
}

TEST(Run, CoarseGridWarns) {
  const std::string dir = scratch("coarse");
  auto cfg = small_config(dir);
  cfg["quadrature"] = {{"k_max", 20.0}, {"panels", 8}, {"nodes", 8}};
  const auto s = tw::run_command("ccr", tw::RunConfig::load(cfg));
  EXPECT_EQ(s.at("status"), "WARN");
  EXPECT_TRUE(s.contains("warn"));
  EXPECT_GT(s.at("max_abs_residual").get<double>(), 1e-6);
  fs::remove_all(dir);
}

TEST(Run, CommandsAndArtifacts) {
  const std::string dir = scratch("all");
  const auto c = tw::RunConfig::load(small_config(dir));
  const auto s = tw::run_command("all", c);
  EXPECT_EQ(s.at("results").at("ccr").at("status"), "ok");
  EXPECT_EQ(s.at("results").at("negativity").at("negativity_volume"), 0.0);
  EXPECT_TRUE(s.at("results").at("covariance").at("uncertainty_ok").get<bool>());
  for (const char* f : {"layout.json", "ccr_matrix.txt", "omega.txt", "sigma.txt", "wigner.csv",
                        "s_ordered_0.csv", "s_ordered_1.csv", "tile.json", "ccr.json",
                        "covariance.json", "wigner.json", "negativity.json", "s-ordered.json",
                        "symmetry.json", "all.json", "run_manifest.json"})
    EXPECT_TRUE(fs::exists(fs::path(dir) / f)) << f;
  EXPECT_EQ(tw::json::parse(tw::read_file(dir + "/all.json")), s);
  EXPECT_THROW(tw::run_command("bogus", c), tw::ConfigError);
  fs::remove_all(dir);
}

TEST(Run, CacheHitGivesIdenticalOutput) {
  const std::string dir = scratch("cache");
  const auto c = tw::RunConfig::load(small_config(dir));
  tw::run_command("covariance", c);
  const std::string first = tw::read_file(dir + "/sigma.txt");
  const auto m1 = tw::json::parse(tw::read_file(dir + "/run_manifest.json"));
  EXPECT_TRUE(m1.at("cache").at("hits").empty());
  tw::run_command("covariance", c);
  const auto m2 = tw::json::parse(tw::read_file(dir + "/run_manifest.json"));
  EXPECT_FALSE(m2.at("cache").at("hits").empty());
  EXPECT_EQ(tw::read_file(dir + "/sigma.txt"), first);
  fs::remove_all(dir);
}

TEST(Run, OneParticleSkipsGaussianOnlyCommands) {
  const std::string dir = scratch("one");
  auto cfg = small_config(dir);
  cfg["state"] = {{"kind", "one_particle"}};
  cfg["output"]["modes"] = {0};
  const auto c = tw::RunConfig::load(cfg);
  EXPECT_THROW(tw::run_command("covariance", c), tw::NotGaussianError);
  const auto s = tw::run_command("negativity", c);
  EXPECT_GT(s.at("negativity_volume").get<double>(), 0.0);
  EXPECT_GT(s.at("overlap_measure").get<double>(), 1.0);
  fs::remove_all(dir);
}

}  // namespace
