#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nhc {

enum class ErrorKind {
  dimension_mismatch,
  invalid_argument,
  ill_conditioned_shape,
  invalid_shape,
  not_symplectic,
  not_positive_definite,
  not_complex_structure,
  rank_deficient,
  not_positive_lagrangian,
  transport_singularity,
  positivity_loss,
  step_failure,
  provider_failure,
  resolution,
  aliasing,
  config,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nhc
