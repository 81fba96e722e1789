#pragma once

#include <stdexcept>
#include <string>

namespace hetcompat {

// Base for every library error. Each condition named by the operations'
// contracts gets its own type so callers can dispatch on it.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define HETCOMPAT_DEFINE_ERROR(NAME)                             \
  class NAME : public Error {                                    \
   public:                                                       \
    explicit NAME(const std::string& what = #NAME)               \
        : Error(std::string(#NAME) + ": " + what) {}             \
  }

HETCOMPAT_DEFINE_ERROR(InvalidMeasure);
HETCOMPAT_DEFINE_ERROR(NotNormalized);
HETCOMPAT_DEFINE_ERROR(SpaceMismatch);
HETCOMPAT_DEFINE_ERROR(NotDominated);
HETCOMPAT_DEFINE_ERROR(DimMismatch);
HETCOMPAT_DEFINE_ERROR(ArityMismatch);
HETCOMPAT_DEFINE_ERROR(NumericFailure);
HETCOMPAT_DEFINE_ERROR(CodomainMismatch);
HETCOMPAT_DEFINE_ERROR(InvalidRefinement);
HETCOMPAT_DEFINE_ERROR(ModeError);
HETCOMPAT_DEFINE_ERROR(TooLarge);
HETCOMPAT_DEFINE_ERROR(IncompatibleError);
HETCOMPAT_DEFINE_ERROR(OracleViolation);
HETCOMPAT_DEFINE_ERROR(InvalidProbability);
HETCOMPAT_DEFINE_ERROR(NotMonotone);
HETCOMPAT_DEFINE_ERROR(Divergent);
HETCOMPAT_DEFINE_ERROR(BracketError);
HETCOMPAT_DEFINE_ERROR(NotSingular);
HETCOMPAT_DEFINE_ERROR(DomainError);
HETCOMPAT_DEFINE_ERROR(HorizonMismatch);
HETCOMPAT_DEFINE_ERROR(HypothesisViolated);
HETCOMPAT_DEFINE_ERROR(GridError);
HETCOMPAT_DEFINE_ERROR(SchemaError);

#undef HETCOMPAT_DEFINE_ERROR

}  // namespace hetcompat
