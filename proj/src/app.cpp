#include "tw/app.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include "tw/modes.hpp"
#include "tw/parallel.hpp"
#include "tw/wigner.hpp"

#ifndef TW_VERSION
#define TW_VERSION "dev"
#endif

namespace tw {

ValidationError::ValidationError(std::vector<Issue> issues)
    : Error(ErrorKind::config,
            issues.empty() ? std::string("invalid configuration") : issues.front().message),
      issues_(std::move(issues)) {}

json default_config() {
  return json::parse(R"({
    "spacetime": {"n": 1, "m": 1.0, "hbar": 1.0, "t0": 0.0, "xi": 0.0},
    "tiling": {
      "tiles_per_axis": 4, "l_uv": 1.0, "epsilon": 0.05, "corridor": 0.3,
      "profile": {"family": "smooth_bump", "sigma": 0.0, "r_cut": 6.0},
      "tiles": null
    },
    "quadrature": {"k_max": 80.0, "panels": 128, "nodes": 32},
    "state": {"kind": "vacuum", "beta": 1.0, "alpha": [], "k0": null, "x0": null,
              "sigma_k": 2.0},
    "output": {"dir": "twig-out", "modes": null, "phase_nodes": 41, "n_sigma": 6.0,
               "s": [0.0, -1.0], "numeric": false, "eta_nodes": 0, "eta_cutoff": 0.0},
    "symmetry": {"rapidity": 0.5, "translation": [0.3, 0.7], "boost_axis": [1.0, 0.0, 0.0],
                 "rotation": [0.0, 0.0, 0.0]},
    "ccr": {"tolerance": 1e-6},
    "cache_dir": "",
    "threads": 0
  })");
}

namespace {

constexpr double kMaxMomentumNodes = 2e7;

// Overlays `user` on `base`, rejecting keys the defaults do not know about.
void merge_into(json& base, const json& user, const std::string& path, std::vector<Issue>& issues) {
  if (!user.is_object()) {
    issues.push_back({"CONFIG", "config" + (path.empty() ? "" : " key '" + path + "'") +
                                    " must be an object", {}});
    return;
  }
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) {
      issues.push_back({"CONFIG", "unknown config key '" + key + "'", {}});
      continue;
    }
    json& slot = base[it.key()];
    if (slot.is_object() && it.value().is_object())
      merge_into(slot, it.value(), key, issues);
    else
      slot = it.value();
  }
}

void collect(std::vector<Issue>& issues, const std::function<void()>& step) {
  try {
    step();
  } catch (const CausalOverlapError& e) {
    issues.push_back({e.code(), e.what(), e.pairs});
  } catch (const Error& e) {
    issues.push_back({e.code(), e.what(), {}});
  } catch (const json::exception& e) {
    issues.push_back({"CONFIG", std::string("malformed config value: ") + e.what(), {}});
  }
}

Eigen::VectorXd to_vector(const json& a, const std::string& what) {
  if (!a.is_array()) throw ConfigError(what + " must be an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  return v;
}

std::complex<double> to_complex(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2) return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError("coherent amplitudes must be numbers or [re, im] pairs");
}

std::vector<int> default_modes(int n_modes) {
  std::vector<int> m;
  for (int k = 0; k < std::min(n_modes, 2); ++k) m.push_back(k);
  if (n_modes > 2) m.resize(1);
  return m;
}

}  // namespace

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' must look like key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json* slot = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (!slot->is_object() || !slot->contains(part))
      throw ConfigError("unknown config key '" + key + "'");
    slot = &(*slot)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  *slot = value;
}

RunConfig RunConfig::load(const json& user, const std::vector<std::string>& overrides) {
  RunConfig c;
  std::vector<Issue> issues;
  json cfg = default_config();
  merge_into(cfg, user, "", issues);
  if (const char* env = std::getenv("TWIG_CACHE_DIR"); env && *env) cfg["cache_dir"] = env;
  for (const auto& o : overrides) collect(issues, [&] { apply_override(cfg, o); });
  if (!issues.empty()) throw ValidationError(std::move(issues));
  c.resolved = cfg;

  bool spec_ok = false, layout_ok = false;
  collect(issues, [&] {
    const json& s = cfg.at("spacetime");
    c.spec.dimension = s.at("n").get<int>();
    c.spec.mass = s.at("m").get<double>();
    c.spec.hbar = s.at("hbar").get<double>();
    c.spec.t0 = s.at("t0").get<double>();
    c.spec.curvature_coupling = s.at("xi").get<double>();
    c.spec.validate();
    spec_ok = true;
  });

  const json& t = cfg.at("tiling");
  collect(issues, [&] { c.profile = profile_from_json(t.at("profile")); });
  if (spec_ok) {
    collect(issues, [&] {
      if (t.at("tiles").is_null()) {
        c.layout = build_tiling(c.spec, t.at("tiles_per_axis").get<int>(),
                                t.at("l_uv").get<double>(), t.at("epsilon").get<double>(),
                                t.at("corridor").get<double>());
      } else {
        json doc = {{"n", c.spec.dimension}, {"m", c.spec.mass}, {"hbar", c.spec.hbar},
                    {"t0", c.spec.t0}, {"xi", c.spec.curvature_coupling},
                    {"epsilon", t.at("epsilon")}, {"corridor", t.at("corridor")},
                    {"tiles", t.at("tiles")}};
        c.layout = layout_from_json(doc);
      }
      layout_ok = true;
    });
  }
  if (layout_ok)
    for (const Tile& tile : c.layout.tiles) collect(issues, [&] { c.profile.validate_for(tile); });

  const json& q = cfg.at("quadrature");
  collect(issues, [&] {
    c.k_max = q.at("k_max").get<double>();
    c.panels = q.at("panels").get<int>();
    c.nodes = q.at("nodes").get<int>();
    if (!(c.k_max > 0.0)) throw ConfigError("quadrature.k_max must be positive");
    if (c.panels < 1 || c.nodes < 1)
      throw ConfigError("quadrature.panels and quadrature.nodes must be positive");
    if (layout_ok) {
      double min_half = std::numeric_limits<double>::infinity();
      for (const Tile& tile : c.layout.tiles) min_half = std::min(min_half, tile.half_width.minCoeff());
      if (c.k_max < 10.0 / min_half)
        throw ConfigError("quadrature.k_max must be at least 10 / (smallest tile half width) = " +
                          format_number(10.0 / min_half));
    }
  });

  const int n_modes = layout_ok ? c.layout.size() : 0;
  c.state = cfg.at("state");
  collect(issues, [&] {
    const std::string kind = c.state.at("kind").get<std::string>();
    if (kind == "thermal") {
      if (!(c.state.at("beta").get<double>() > 0.0)) throw ConfigError("state.beta must be positive");
    } else if (kind == "coherent") {
      const json& a = c.state.at("alpha");
      if (!a.is_array()) throw ConfigError("state.alpha must be a list");
      for (const auto& v : a) to_complex(v);
      if (layout_ok && static_cast<int>(a.size()) != n_modes)
        throw ConfigError("state.alpha needs one amplitude per mode (" + std::to_string(n_modes) +
                          ")");
    } else if (kind == "one_particle") {
      if (!(c.state.at("sigma_k").get<double>() > 0.0))
        throw ConfigError("state.sigma_k must be positive");
      for (const char* key : {"k0", "x0"})
        if (!c.state.at(key).is_null() &&
            to_vector(c.state.at(key), key).size() != c.spec.dimension)
          throw ConfigError(std::string("state.") + key + " must have n components");
    } else if (kind != "vacuum") {
      throw ConfigError("state.kind must be vacuum, thermal, coherent or one_particle");
    }
  });

  const json& o = cfg.at("output");
  collect(issues, [&] { c.output.s_values = o.at("s").get<std::vector<double>>(); });
  collect(issues, [&] {
    c.output.dir = o.at("dir").get<std::string>();
    if (c.output.dir.empty()) throw ConfigError("output.dir must not be empty");
    if (o.at("modes").is_null()) {
      c.output.modes = default_modes(n_modes);
    } else {
      c.output.modes = o.at("modes").get<std::vector<int>>();
      if (c.output.modes.empty()) throw ConfigError("output.modes must not be empty");
      for (int k : c.output.modes)
        if (layout_ok && (k < 0 || k >= n_modes))
          throw ConfigError("output.modes entry " + std::to_string(k) + " out of range");
    }
    c.output.phase_nodes = o.at("phase_nodes").get<int>();
    if (c.output.phase_nodes < 2) throw ConfigError("output.phase_nodes must be at least 2");
    c.output.n_sigma = o.at("n_sigma").get<double>();
    if (!(c.output.n_sigma > 0.0)) throw ConfigError("output.n_sigma must be positive");
    c.output.numeric = o.at("numeric").get<bool>();
    c.output.eta_nodes = o.at("eta_nodes").get<int>();
    c.output.eta_cutoff = o.at("eta_cutoff").get<double>();
    if (c.output.eta_nodes < 0 || c.output.eta_cutoff < 0.0)
      throw ConfigError("output.eta_nodes and output.eta_cutoff must be non-negative");
  });
  for (double s : c.output.s_values)
    if (!(s >= -1.0 && s <= 1.0))
      issues.push_back({"ORDERING_DOMAIN", "output.s value " + format_number(s) +
                                               " lies outside [-1, 1]", {}});

  if (spec_ok) {
    collect(issues, [&] {
      const json& sym = cfg.at("symmetry");
      c.element.translation = to_vector(sym.at("translation"), "symmetry.translation");
      if (c.element.translation.size() != c.spec.dimension + 1)
        throw ConfigError("symmetry.translation must have n + 1 components");
      c.element.rapidity = sym.at("rapidity").get<double>();
      if (c.spec.dimension == 3) {
        c.element.boost_axis = to_vector(sym.at("boost_axis"), "symmetry.boost_axis");
        c.element.rotation = to_vector(sym.at("rotation"), "symmetry.rotation");
      }
      c.element.validate();
    });
  }

  collect(issues, [&] {
    c.ccr_tolerance = cfg.at("ccr").at("tolerance").get<double>();
    if (!(c.ccr_tolerance > 0.0)) throw ConfigError("ccr.tolerance must be positive");
    c.cache_dir = cfg.at("cache_dir").get<std::string>();
    c.threads = cfg.at("threads").get<int>();
    if (c.threads < 0) throw ConfigError("threads must be non-negative");
  });

  if (!issues.empty()) throw ValidationError(std::move(issues));

  const double axis_nodes = static_cast<double>(c.panels) * c.nodes;
  const double momentum_nodes = std::pow(axis_nodes, c.spec.dimension);
  if (momentum_nodes > kMaxMomentumNodes)
    throw CostGuardError("momentum grid has " + format_number(momentum_nodes) +
                         " nodes (limit " + format_number(kMaxMomentumNodes) + ")");
  const double phase_points =
      std::pow(static_cast<double>(c.output.phase_nodes), 2.0 * c.output.modes.size());
  if (phase_points > PhaseGrid::kMaxPoints)
    throw CostGuardError("phase grid would have " + format_number(phase_points) +
                         " points (limit " + format_number(PhaseGrid::kMaxPoints) + ")");
  return c;
}

MomentumGrid RunConfig::grid() const {
  return make_momentum_grid(spec.dimension, k_max, panels, nodes);
}

std::string RunConfig::hash() const {
  json h = resolved;
  h["output"].erase("dir");
  h.erase("cache_dir");
  h.erase("threads");
  return fnv1a_hex(dump_json(h, 0));
}

FieldState make_state(const RunConfig& config, const std::vector<int>& modes,
                      const MomentumGrid& grid) {
  const json& s = config.state;
  const std::string kind = s.at("kind").get<std::string>();
  if (kind == "vacuum") return Vacuum{};
  if (kind == "thermal") return Thermal{s.at("beta").get<double>()};
  if (kind == "coherent") {
    Coherent c;
    for (int k : modes) c.alpha.push_back(to_complex(s.at("alpha").at(k)));
    return c;
  }
  const int n = config.spec.dimension;
  const Eigen::VectorXd k0 = s.at("k0").is_null() ? Eigen::VectorXd::Zero(n) : to_vector(s.at("k0"), "k0");
  const Eigen::VectorXd x0 = s.at("x0").is_null() ? config.layout.tiles.at(modes.front()).center
                                                  : to_vector(s.at("x0"), "x0");
  return OneParticle{OneParticleProfile::normalized(k0, s.at("sigma_k").get<double>(), grid, x0)};
}

// --- cache ------------------------------------------------------------------------

namespace {

class DirectoryLock {
 public:
  DirectoryLock(const std::string& dir, bool exclusive) {
    std::filesystem::create_directories(dir);
    fd_ = ::open((dir + "/.lock").c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ < 0) throw ConfigError("cannot open cache lock in " + dir);
    ::flock(fd_, exclusive ? LOCK_EX : LOCK_SH);
  }
  ~DirectoryLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  int fd_ = -1;
};

class Cache {
 public:
  explicit Cache(std::string dir) : dir_(std::move(dir)) {}

  std::optional<json> load(const std::string& key) const {
    const std::string path = dir_ + "/" + key + ".json";
    DirectoryLock lock(dir_, false);
    if (!std::filesystem::exists(path)) return std::nullopt;
    try {
      return json::parse(read_file(path));
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }

  void store(const std::string& key, const json& doc) const {
    DirectoryLock lock(dir_, true);
    atomic_write(dir_ + "/" + key + ".json", dump_json(doc));
  }

 private:
  std::string dir_;
};

using Clock = std::chrono::steady_clock;

class Pipeline {
 public:
  explicit Pipeline(const RunConfig& config)
      : cfg_(config),
        cache_(config.cache_dir.empty() ? config.output.dir + "/cache" : config.cache_dir) {
    manifest_["tool_version"] = TW_VERSION;
    manifest_["config_hash"] = cfg_.hash();
    manifest_["artifacts"] = json::array();
    manifest_["timings_seconds"] = json::object();
    manifest_["cache"] = {{"hits", json::array()}, {"misses", json::array()}};
  }

  const RunConfig& config() const { return cfg_; }
  json& manifest() { return manifest_; }

  template <typename F>
  auto timed(const std::string& stage, F&& body) {
    const auto start = Clock::now();
    auto result = body();
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    manifest_["timings_seconds"][stage] = manifest_["timings_seconds"].value(stage, 0.0) + secs;
    return result;
  }

  const Propagator& propagator() {
    if (!prop_) {
      prop_.emplace(cfg_.spec, cfg_.grid());
      manifest_["grid_fingerprints"] = {prop_->grid().fingerprint()};
    }
    return *prop_;
  }

  const LocalModeSet& modes() {
    if (modes_) return *modes_;
    const Propagator& prop = propagator();
    const std::string key = "modes-" + key_for({"spacetime", "tiling", "quadrature"});
    if (auto doc = cache_.load(key); doc && valid_modes(*doc)) {
      LocalModeSet set{cfg_.spec, cfg_.layout, cfg_.profile, {}};
      const auto& c = doc->at("raw_commutators");
      for (std::size_t k = 0; k < cfg_.layout.tiles.size(); ++k)
        set.pairs.push_back(restore_local_mode(cfg_.layout.tiles[k], cfg_.profile, cfg_.spec,
                                               c[k].get<double>()));
      manifest_["cache"]["hits"].push_back(key);
      modes_ = std::move(set);
      return *modes_;
    }
    modes_ = timed("modes", [&] { return assemble_modes(cfg_.layout, cfg_.profile, prop); });
    json raw = json::array();
    for (const auto& p : modes_->pairs) raw.push_back(p.raw_commutator);
    cache_.store(key, {{"raw_commutators", raw}, {"grid", prop.grid().fingerprint()}});
    manifest_["cache"]["misses"].push_back(key);
    return *modes_;
  }

  LocalModeSet selected() { return modes().subset(cfg_.output.modes); }

  FieldState state(const std::vector<int>& modes) {
    return make_state(cfg_, modes, propagator().grid());
  }

  /// Covariance of every mode, cached on disk.
  const CovarianceMatrix& full_covariance() {
    if (cov_) return *cov_;
    const std::string key = "cov-" + key_for({"spacetime", "tiling", "quadrature", "state"});
    const Propagator& prop = propagator();
    if (auto doc = cache_.load(key); doc && doc->value("grid", "") == prop.grid().fingerprint()) {
      CovarianceMatrix cov;
      cov.sigma = matrix_from_json(doc->at("sigma"));
      cov.mean = matrix_from_json(json::array({doc->at("mean")})).row(0).transpose();
      cov.state = doc->at("state").get<std::string>();
      cov.grid_fingerprint = prop.grid().fingerprint();
      cov.hbar = cfg_.spec.hbar;
      if (cov.sigma.rows() == 2 * cfg_.layout.size()) {
        manifest_["cache"]["hits"].push_back(key);
        cov_ = std::move(cov);
        return *cov_;
      }
    }
    std::vector<int> all(cfg_.layout.size());
    for (int k = 0; k < cfg_.layout.size(); ++k) all[k] = k;
    const FieldState st = state(all);
    cov_ = timed("covariance", [&] { return covariance(modes(), st, prop); });
    json mean = json::array();
    for (Eigen::Index i = 0; i < cov_->mean.size(); ++i) mean.push_back(cov_->mean[i]);
    cache_.store(key, {{"sigma", matrix_to_json(cov_->sigma)}, {"mean", mean},
                       {"state", cov_->state}, {"grid", prop.grid().fingerprint()}});
    manifest_["cache"]["misses"].push_back(key);
    return *cov_;
  }

  CovarianceMatrix covariance_of(const std::vector<int>& modes) {
    const CovarianceMatrix& full = full_covariance();
    CovarianceMatrix out = full;
    const Eigen::Index d = 2 * static_cast<Eigen::Index>(modes.size());
    out.sigma.resize(d, d);
    out.mean.resize(d);
    for (Eigen::Index a = 0; a < d; ++a) {
      const Eigen::Index fa = 2 * modes[a / 2] + a % 2;
      out.mean[a] = full.mean[fa];
      for (Eigen::Index b = 0; b < d; ++b) out.sigma(a, b) = full.sigma(fa, 2 * modes[b / 2] + b % 2);
    }
    return out;
  }

  void write(const std::string& name, const std::string& content) {
    atomic_write(cfg_.output.dir + "/" + name, content);
    manifest_["artifacts"].push_back(name);
  }

 private:
  std::string key_for(std::initializer_list<const char*> blocks) const {
    json part;
    for (const char* b : blocks) part[b] = cfg_.resolved.at(b);
    return fnv1a_hex(dump_json(part, 0));
  }

  bool valid_modes(const json& doc) {
    return doc.value("grid", "") == propagator().grid().fingerprint() &&
           doc.contains("raw_commutators") &&
           doc.at("raw_commutators").size() == cfg_.layout.tiles.size();
  }

  const RunConfig& cfg_;
  Cache cache_;
  json manifest_;
  std::optional<Propagator> prop_;
  std::optional<LocalModeSet> modes_;
  std::optional<CovarianceMatrix> cov_;
};

json int_list(const std::vector<int>& v) { return json(v); }

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json finish(Pipeline& p, const std::string& command, json summary) {
  summary["command"] = command;
  summary["config_hash"] = p.config().hash();
  p.write(command + ".json", dump_json(summary));
  return summary;
}

// --- commands ---------------------------------------------------------------------

json cmd_tile(Pipeline& p) {
  const RunConfig& c = p.config();
  const CovariantScales scales = covariant_scales(c.layout);
  double min_gap = std::numeric_limits<double>::infinity();
  for (int a = 0; a < c.layout.size(); ++a)
    for (int b = a + 1; b < c.layout.size(); ++b)
      min_gap = std::min(min_gap, spatial_gap(c.layout.tiles[a], c.layout.tiles[b]));
  p.write("layout.json", dump_json(layout_to_json(c.layout, c.profile)));
  json s = {{"N", c.layout.size()},
            {"n", c.spec.dimension},
            {"l_uv", scales.l_uv},
            {"l_ir", scales.l_ir},
            {"min_gap", c.layout.size() > 1 ? json(min_gap) : json(nullptr)},
            {"spacelike", causal_violations(c.layout.tiles).empty()},
            {"layout", "layout.json"}};
  return finish(p, "tile", s);
}

json cmd_ccr(Pipeline& p) {
  const RunConfig& c = p.config();
  const LocalModeSet& set = p.modes();
  const CCRReport r = p.timed("ccr", [&] { return ccr_check(set, p.propagator()); });
  p.write("layout.json", dump_json(layout_to_json(c.layout, c.profile, &set.pairs)));
  p.write("ccr_matrix.txt", matrix_text(r.measured, "E(f_A, f_B)", r.grid_fingerprint));
  p.write("omega.txt", matrix_text(set.omega(), "Omega", r.grid_fingerprint));
  json s = {{"N", set.size()},
            {"max_abs_residual", r.max_abs_residual},
            {"max_within_mode", r.max_within_mode},
            {"max_cross_mode", r.max_cross_mode},
            {"tolerance", c.ccr_tolerance},
            {"status", r.max_abs_residual <= c.ccr_tolerance ? "ok" : "WARN"},
            {"grid_fingerprint", r.grid_fingerprint},
            {"matrix", "ccr_matrix.txt"}};
  if (r.max_abs_residual > c.ccr_tolerance)
    s["warn"] = "CCR residual " + format_number(r.max_abs_residual) + " exceeds tolerance " +
                format_number(c.ccr_tolerance) + "; refine the momentum grid";
  return finish(p, "ccr", s);
}

json cmd_covariance(Pipeline& p) {
  const RunConfig& c = p.config();
  if (!is_gaussian(p.state({0})))
    throw NotGaussianError("covariance is defined only for Gaussian states");
  const CovarianceMatrix& cov = p.full_covariance();
  const Eigen::VectorXd nu = symplectic_eigenvalues(cov.sigma);
  p.write("sigma.txt", matrix_text(cov.sigma, "Sigma (" + cov.state + ")", cov.grid_fingerprint));
  json s = {{"N", cov.modes()},
            {"state", cov.state},
            {"hbar", c.spec.hbar},
            {"sigma", matrix_to_json(cov.sigma)},
            {"mean", vec_json(cov.mean)},
            {"symplectic_eigenvalues", vec_json(nu)},
            {"min_symplectic_eigenvalue", nu.minCoeff()},
            {"uncertainty_ok", nu.minCoeff() >= 0.5 * c.spec.hbar - 1e-9},
            {"grid_fingerprint", cov.grid_fingerprint},
            {"matrix", "sigma.txt"}};
  return finish(p, "covariance", s);
}

struct Distribution {
  QuasiDistribution dist;
  json extra = json::object();
};

Distribution compute_distribution(Pipeline& p, double s) {
  const RunConfig& c = p.config();
  const auto& modes = c.output.modes;
  const FieldState st = p.state(modes);
  const int dim = 2 * static_cast<int>(modes.size());
  const Eigen::MatrixXd shift = (0.5 * s * c.spec.hbar) * Eigen::MatrixXd::Identity(dim, dim);
  NumericOptions opt{c.output.eta_cutoff, c.output.eta_nodes, s};
  Distribution d;
  if (is_gaussian(st)) {
    const CovarianceMatrix cov = p.covariance_of(modes);
    const PhaseGrid grid = auto_phase_grid(cov.sigma - shift, cov.mean, c.output.phase_nodes,
                                           c.output.n_sigma);
    d.dist = p.timed("wigner_gaussian", [&] { return s_ordered(cov, s, grid); });
    if (c.output.numeric) {
      const CharacteristicFunction chi(p.selected(), st, p.propagator());
      const QuasiDistribution num =
          p.timed("wigner_numeric", [&] { return wigner_numeric(chi, grid, opt); });
      d.extra["numeric_max_relative_deviation"] = peak_scaled_deviation(num, d.dist);
      d.extra["numeric_normalization"] = num.normalization;
      d.extra["numeric_imaginary_residue"] = num.imaginary_residue;
    }
    return d;
  }
  const CharacteristicFunction chi(p.selected(), st, p.propagator());
  const PhaseGrid grid = auto_phase_grid(chi.second_moments() - shift, chi.covariance().mean,
                                         c.output.phase_nodes, c.output.n_sigma);
  d.dist = p.timed("wigner_numeric", [&] { return wigner_numeric(chi, grid, opt); });
  d.extra["overlap_measure"] = chi.overlap_measure();
  return d;
}

json dist_json(const Distribution& d, const std::vector<int>& modes) {
  json s = distribution_summary(d.dist);
  s["modes"] = int_list(modes);
  for (auto it = d.extra.begin(); it != d.extra.end(); ++it) s[it.key()] = it.value();
  return s;
}

json cmd_wigner(Pipeline& p) {
  const Distribution d = compute_distribution(p, 0.0);
  p.write("wigner.csv", distribution_csv(d.dist));
  json s = dist_json(d, p.config().output.modes);
  s["csv"] = "wigner.csv";
  return finish(p, "wigner", s);
}

json cmd_negativity(Pipeline& p) {
  const Distribution d = compute_distribution(p, 0.0);
  const Negativity neg = negativity(d.dist);
  json s = {{"state", d.dist.state},
            {"method", d.dist.method},
            {"modes", int_list(p.config().output.modes)},
            {"negativity_volume", neg.volume},
            {"min_value", neg.min_value},
            {"normalization", d.dist.normalization},
            {"grid_fingerprint", d.dist.grid_fingerprint}};
  for (auto it = d.extra.begin(); it != d.extra.end(); ++it) s[it.key()] = it.value();
  return finish(p, "negativity", s);
}

json cmd_s_ordered(Pipeline& p) {
  json list = json::array();
  const auto& values = p.config().output.s_values;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Distribution d = compute_distribution(p, values[i]);
    const std::string name = "s_ordered_" + std::to_string(i) + ".csv";
    p.write(name, distribution_csv(d.dist));
    json s = dist_json(d, p.config().output.modes);
    s["csv"] = name;
    list.push_back(s);
  }
  return finish(p, "s-ordered", {{"distributions", list}});
}

json cmd_symmetry(Pipeline& p) {
  const RunConfig& c = p.config();
  std::vector<int> all(c.layout.size());
  for (int k = 0; k < c.layout.size(); ++k) all[k] = k;
  const FieldState st = p.state(all);
  const double residual = p.timed(
      "symmetry", [&] { return invariance_check(p.modes(), c.element, st, p.propagator()); });
  json element = {{"rapidity", c.element.rapidity},
                  {"translation", vec_json(c.element.translation)},
                  {"proper_orthochronous", c.element.proper_orthochronous()}};
  if (c.spec.dimension == 3) {
    element["boost_axis"] = vec_json(c.element.boost_axis);
    element["rotation"] = vec_json(c.element.rotation);
  }
  json s = {{"element", element},
            {"state", state_tag(st)},
            {"residual", residual},
            {"grid_fingerprint", p.propagator().grid().fingerprint()}};
  return finish(p, "symmetry", s);
}

json cmd_all(Pipeline& p) {
  const FieldState st = p.state(p.config().output.modes);
  const bool gaussian = is_gaussian(st);
  const bool quasifree = std::holds_alternative<Vacuum>(st) || std::holds_alternative<Thermal>(st);
  json results = json::object();
  json skipped = json::array();
  results["tile"] = cmd_tile(p);
  results["ccr"] = cmd_ccr(p);
  if (gaussian)
    results["covariance"] = cmd_covariance(p);
  else
    skipped.push_back("covariance");
  results["wigner"] = cmd_wigner(p);
  results["negativity"] = cmd_negativity(p);
  results["s-ordered"] = cmd_s_ordered(p);
  if (quasifree)
    results["symmetry"] = cmd_symmetry(p);
  else
    skipped.push_back("symmetry");
  return finish(p, "all", {{"results", results}, {"skipped", skipped}});
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"tile",       "ccr",       "covariance",
                                                 "wigner",     "negativity", "s-ordered",
                                                 "symmetry",   "all"};
  return names;
}

json run_command(const std::string& command, const RunConfig& config) {
  static const std::map<std::string, json (*)(Pipeline&)> table = {
      {"tile", cmd_tile},         {"ccr", cmd_ccr},           {"covariance", cmd_covariance},
      {"wigner", cmd_wigner},     {"negativity", cmd_negativity},
      {"s-ordered", cmd_s_ordered}, {"symmetry", cmd_symmetry}, {"all", cmd_all}};
  const auto it = table.find(command);
  if (it == table.end()) throw ConfigError("unknown command '" + command + "'");
  if (config.threads > 0) set_thread_count(config.threads);
  std::filesystem::create_directories(config.output.dir);
  Pipeline p(config);
  p.manifest()["command"] = command;
  json summary = p.timed("total", [&] { return it->second(p); });
  atomic_write(config.output.dir + "/run_manifest.json", dump_json(p.manifest()));
  return summary;
}

json error_report(const Error& e) {
  json errors = json::array();
  auto add = [&](const std::string& code, const std::string& message,
                 const std::vector<std::pair<int, int>>& pairs) {
    json item = {{"code", code}, {"message", message}};
    if (!pairs.empty()) {
      json p = json::array();
      for (const auto& [a, b] : pairs) p.push_back({a, b});
      item["pairs"] = p;
    }
    errors.push_back(item);
  };
  std::string code = e.code();
  if (const auto* v = dynamic_cast<const ValidationError*>(&e)) {
    for (const auto& i : v->issues()) add(i.code, i.message, i.pairs);
    if (!v->issues().empty()) code = v->issues().front().code;
  } else if (const auto* c = dynamic_cast<const CausalOverlapError*>(&e)) {
    add(e.code(), e.what(), c->pairs);
  } else {
    add(e.code(), e.what(), {});
  }
  return {{"status", "error"}, {"code", code}, {"exit_code", e.exit_code()}, {"errors", errors}};
}

}  // namespace tw
