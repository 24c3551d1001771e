#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tw/errors.hpp"
#include "tw/geometry.hpp"
#include "tw/io.hpp"
#include "tw/propagator.hpp"
#include "tw/symmetry.hpp"

namespace tw {

/// One problem found while validating a run configuration.
struct Issue {
  std::string code;
  std::string message;
  std::vector<std::pair<int, int>> pairs;
};

/// Every configuration problem found before any computation started.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Issue> issues);
  const std::vector<Issue>& issues() const { return issues_; }

 private:
  std::vector<Issue> issues_;
};

/// Configuration defaults (the 1+1 reference setup).
json default_config();

/// Sets a dotted key ("quadrature.k_max") to a value parsed as JSON, or as a
/// string when it is not valid JSON. Throws ConfigError for unknown keys.
void apply_override(json& config, const std::string& assignment);

struct OutputOptions {
  std::string dir;
  std::vector<int> modes;
  int phase_nodes = 41;
  double n_sigma = 6.0;
  std::vector<double> s_values;
  bool numeric = false;
  int eta_nodes = 0;
  double eta_cutoff = 0.0;
};

struct RunConfig {
  json resolved;  ///< defaults merged with the file and overrides
  SpacetimeSpec spec;
  TilingLayout layout;
  BumpProfile profile;
  double k_max = 0.0;
  int panels = 0;
  int nodes = 0;
  json state;
  OutputOptions output;
  PoincareElement element;
  double ccr_tolerance = 1e-6;
  std::string cache_dir;
  int threads = 0;

  /// Merges `user` over the defaults, applies overrides, and validates every
  /// precondition. Throws ValidationError listing all problems.
  static RunConfig load(const json& user, const std::vector<std::string>& overrides = {});

  MomentumGrid grid() const;

  /// Hash of every field that can change a result.
  std::string hash() const;
};

/// Field state restricted to the given modes of the layout.
FieldState make_state(const RunConfig& config, const std::vector<int>& modes,
                      const MomentumGrid& grid);

/// Runs one subcommand, writing artifacts into config.output.dir, and returns
/// the summary document that was also written to <command>.json.
json run_command(const std::string& command, const RunConfig& config);

const std::vector<std::string>& command_names();

/// Machine-readable error document for a failure.
json error_report(const Error& e);

}  // namespace tw
