#include "tvrls/error.hpp"

namespace tvrls {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::not_positive_definite: return "NotPositiveDefinite";
    case ErrorKind::not_symmetric: return "NotSymmetric";
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::singular_inner_matrix: return "SingularInnerMatrix";
    case ErrorKind::no_convergence: return "NoConvergence";
    case ErrorKind::rank_not_attained: return "RankNotAttained";
    case ErrorKind::config: return "ConfigError";
    case ErrorKind::io: return "IoError";
  }
  return "Error";
}

Error::Error(ErrorKind kind, const std::string& what, std::optional<std::size_t> step)
    : std::runtime_error(step ? what + " (step " + std::to_string(*step) + ")" : what),
      kind_(kind),
      step_(step),
      message_(what) {}

Error Error::at_step(std::size_t step) const {
  if (step_) return *this;
  return Error(kind_, message_, step);
}

}  // namespace tvrls
