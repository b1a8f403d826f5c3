#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace verbatim {

// Root of every error the toolkit raises. Callers that only care about
// "bad data vs. bad invocation" catch this and UsageError separately.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define VERBATIM_DEFINE_ERROR(Name)            \
  class Name : public Error {                  \
  public:                                      \
    using Error::Error;                        \
  }

VERBATIM_DEFINE_ERROR(SchemaError);
VERBATIM_DEFINE_ERROR(IoError);
VERBATIM_DEFINE_ERROR(DuplicateIdError);
VERBATIM_DEFINE_ERROR(MissingFileError);
VERBATIM_DEFINE_ERROR(ArityError);
VERBATIM_DEFINE_ERROR(LexiconError);
VERBATIM_DEFINE_ERROR(ProviderError);
VERBATIM_DEFINE_ERROR(PreconditionError);
VERBATIM_DEFINE_ERROR(FormatError);
VERBATIM_DEFINE_ERROR(RangeError);
VERBATIM_DEFINE_ERROR(UnknownUtteranceError);
VERBATIM_DEFINE_ERROR(EmptyCorpusError);
VERBATIM_DEFINE_ERROR(DomainError);
VERBATIM_DEFINE_ERROR(ValidationError);
VERBATIM_DEFINE_ERROR(MissingBaselineError);
VERBATIM_DEFINE_ERROR(UsageError);

#undef VERBATIM_DEFINE_ERROR

// Completed text diverged from the rich text somewhere other than a "#" slot.
class DriftError : public Error {
public:
  DriftError(std::size_t position, std::string expected, std::string actual)
      : Error("completion drifted at token " + std::to_string(position) +
              ": expected '" + expected + "', got '" + actual + "'"),
        position_(position),
        expected_(std::move(expected)),
        actual_(std::move(actual)) {}

  // 1-based token index of the first divergence.
  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }
  const std::string& actual() const noexcept { return actual_; }

private:
  std::size_t position_;
  std::string expected_;
  std::string actual_;
};

}  // namespace verbatim
