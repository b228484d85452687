#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace tvrls {

enum class ErrorKind {
  not_positive_definite,
  not_symmetric,
  dimension_mismatch,
  singular_inner_matrix,
  no_convergence,
  rank_not_attained,
  config,
  io,
};

const char* to_string(ErrorKind kind);

/// Library-wide exception. Numerical failures raised inside an estimator
/// carry the index of the measurement step that triggered them.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<std::size_t> step = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> step() const noexcept { return step_; }

  /// Copy of this error tagged with a step index (keeps an existing tag).
  Error at_step(std::size_t step) const;

 private:
  ErrorKind kind_;
  std::optional<std::size_t> step_;
  std::string message_;
};

}  // namespace tvrls
