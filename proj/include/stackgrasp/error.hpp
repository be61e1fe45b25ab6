#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stackgrasp {

enum class ErrorKind {
  kInvalidArgument,
  kFrameMismatch,
  kInfeasibleJitter,
  kDegenerateProjection,
  kFreeFall,
  kParse,
  kStorage,
  kRefusesOverwrite,
  kMissingGroundTruth,
  kUsage,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a category so the CLI can
// print a categorized error line and pick an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace stackgrasp
