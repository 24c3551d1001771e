#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tw {

/// Failure categories. Each maps to a stable machine-readable code and a
/// process exit code used by the command line tool.
enum class ErrorKind {
  config,
  causal_overlap,
  degenerate_mode,
  infrared_divergence,
  not_gaussian,
  ill_conditioned,
  cost_guard,
  cutoff,
  ordering_domain,
  normalization,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Upper-snake code, e.g. "CAUSAL_OVERLAP".
  std::string code() const;

  /// 2 for configuration/validation, 3 for numerical-domain, 4 for cost guard.
  int exit_code() const noexcept;

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::config, w) {}
};

/// Two tile supports are not spacelike separated. Carries the offending
/// index pairs so callers can report them.
struct CausalOverlapError : Error {
  CausalOverlapError(const std::string& w,
                     std::vector<std::pair<int, int>> pairs = {})
      : Error(ErrorKind::causal_overlap, w), pairs(std::move(pairs)) {}
  std::vector<std::pair<int, int>> pairs;
};

struct DegenerateModeError : Error {
  explicit DegenerateModeError(const std::string& w)
      : Error(ErrorKind::degenerate_mode, w) {}
};

struct InfraredDivergenceError : Error {
  explicit InfraredDivergenceError(const std::string& w)
      : Error(ErrorKind::infrared_divergence, w) {}
};

struct NotGaussianError : Error {
  explicit NotGaussianError(const std::string& w)
      : Error(ErrorKind::not_gaussian, w) {}
};

struct IllConditionedError : Error {
  explicit IllConditionedError(const std::string& w)
      : Error(ErrorKind::ill_conditioned, w) {}
};

struct CostGuardError : Error {
  explicit CostGuardError(const std::string& w)
      : Error(ErrorKind::cost_guard, w) {}
};

struct CutoffError : Error {
  explicit CutoffError(const std::string& w) : Error(ErrorKind::cutoff, w) {}
};

struct OrderingDomainError : Error {
  explicit OrderingDomainError(const std::string& w)
      : Error(ErrorKind::ordering_domain, w) {}
};

struct NormalizationError : Error {
  explicit NormalizationError(const std::string& w)
      : Error(ErrorKind::normalization, w) {}
};

}  // namespace tw
