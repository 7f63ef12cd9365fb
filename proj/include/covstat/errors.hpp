#pragma once

#include <stdexcept>
#include <string>

namespace covstat {

// Every failure the library reports derives from Error, so callers (the CLI
// mostly) can catch one type and still print something specific.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define COVSTAT_ERROR(Name)                                       \
  struct Name : Error {                                           \
    explicit Name(const std::string& what) : Error(what) {}       \
  }

COVSTAT_ERROR(IdentityWord);
COVSTAT_ERROR(DegreeMismatch);
COVSTAT_ERROR(DegreeTooLarge);
COVSTAT_ERROR(AttemptsExhausted);
COVSTAT_ERROR(NotHyperbolic);
COVSTAT_ERROR(HorizonTooSmall);
COVSTAT_ERROR(CutoffExceeded);
COVSTAT_ERROR(ParseError);
COVSTAT_ERROR(InvariantViolation);
COVSTAT_ERROR(QuadratureFailure);
COVSTAT_ERROR(SpectrumTooShort);
COVSTAT_ERROR(WordsAbsent);
COVSTAT_ERROR(ConfigError);

#undef COVSTAT_ERROR

}  // namespace covstat
