#include "tw/errors.hpp"

namespace tw {

std::string Error::code() const {
  switch (kind_) {
    case ErrorKind::config: return "CONFIG";
    case ErrorKind::causal_overlap: return "CAUSAL_OVERLAP";
    case ErrorKind::degenerate_mode: return "DEGENERATE_MODE";
    case ErrorKind::infrared_divergence: return "INFRARED_DIVERGENCE";
    case ErrorKind::not_gaussian: return "NOT_GAUSSIAN";
    case ErrorKind::ill_conditioned: return "ILL_CONDITIONED";
    case ErrorKind::cost_guard: return "COST_GUARD";
    case ErrorKind::cutoff: return "CUTOFF";
    case ErrorKind::ordering_domain: return "ORDERING_DOMAIN";
    case ErrorKind::normalization: return "NORMALIZATION";
  }
  return "UNKNOWN";
}

int Error::exit_code() const noexcept {
  switch (kind_) {
    case ErrorKind::config:
    case ErrorKind::causal_overlap: return 2;
    case ErrorKind::cost_guard: return 4;
    default: return 3;
  }
}

}  // namespace tw
