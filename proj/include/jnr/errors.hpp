#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace jnr {

/// Base class for all library errors. `kind()` is a stable machine-readable
/// tag; `what()` carries the human-readable diagnostic.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define JNR_DEFINE_ERROR(NAME)                          \
  class NAME : public Error {                           \
   public:                                              \
    explicit NAME(const std::string& message)           \
        : Error(#NAME, message) {}                      \
  }

JNR_DEFINE_ERROR(NonHermitianInput);
JNR_DEFINE_ERROR(NoConvergence);
JNR_DEFINE_ERROR(DimensionMismatch);
JNR_DEFINE_ERROR(NonOrthonormalBasis);
JNR_DEFINE_ERROR(StrategyDimensionMismatch);
JNR_DEFINE_ERROR(UnboundedIntersection);
JNR_DEFINE_ERROR(InteriorPointInvalid);
JNR_DEFINE_ERROR(WrongDimension);
JNR_DEFINE_ERROR(NonUnitaryInput);
JNR_DEFINE_ERROR(InvalidMomentPair);
JNR_DEFINE_ERROR(QueryOutsideBracket);
JNR_DEFINE_ERROR(ParseError);
JNR_DEFINE_ERROR(IndexOutOfRange);
JNR_DEFINE_ERROR(DimensionLimit);
JNR_DEFINE_ERROR(InvalidArgument);

#undef JNR_DEFINE_ERROR

}  // namespace jnr
