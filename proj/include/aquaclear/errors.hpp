#pragma once

#include <stdexcept>
#include <string>

namespace aqua {

// Base for all domain validation / solver errors. `field` names the offending
// input (dotted path into the spec) so CLI diagnostics can point at it.
class SpecError : public std::runtime_error {
 public:
  SpecError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

#define AQUA_DEFINE_ERROR(Name)                          \
  class Name : public SpecError {                        \
   public:                                               \
    using SpecError::SpecError;                          \
  }

AQUA_DEFINE_ERROR(InvalidElasticity);
AQUA_DEFINE_ERROR(NonStochasticMatrix);
AQUA_DEFINE_ERROR(EmptyCrops);
AQUA_DEFINE_ERROR(BoundsInverted);
AQUA_DEFINE_ERROR(Reducible);
AQUA_DEFINE_ERROR(OutOfBounds);
AQUA_DEFINE_ERROR(InfeasibleBudget);
AQUA_DEFINE_ERROR(NoBracket);
AQUA_DEFINE_ERROR(DimensionMismatch);
AQUA_DEFINE_ERROR(NonFiniteValue);
AQUA_DEFINE_ERROR(StackMismatch);
AQUA_DEFINE_ERROR(EmptyWindow);

#undef AQUA_DEFINE_ERROR

}  // namespace aqua
