#pragma once

#include <stdexcept>
#include <string>

namespace schottky {

// Every failure carries a stable machine-readable code; the CLI prints it as
// the prefix of its single diagnostic line.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define SCHOTTKY_DEFINE_ERROR(Name)                                         \
  class Name : public Error {                                               \
   public:                                                                  \
    explicit Name(const std::string& what) : Error(#Name, what) {}          \
  }

SCHOTTKY_DEFINE_ERROR(AsymmetryError);
SCHOTTKY_DEFINE_ERROR(NotPositiveDefinite);
SCHOTTKY_DEFINE_ERROR(EigenFloorError);
SCHOTTKY_DEFINE_ERROR(RadiusExceeded);
SCHOTTKY_DEFINE_ERROR(DimensionMismatch);
SCHOTTKY_DEFINE_ERROR(TableAbsent);
SCHOTTKY_DEFINE_ERROR(InvalidArgument);
SCHOTTKY_DEFINE_ERROR(NonHomogeneous);
SCHOTTKY_DEFINE_ERROR(ParseError);

#undef SCHOTTKY_DEFINE_ERROR

}  // namespace schottky
