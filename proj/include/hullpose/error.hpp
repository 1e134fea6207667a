#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hullpose {

enum class ErrorKind {
  DegenerateCluster,
  DegeneratePolygon,
  OriginInsideHull,
  NoVisibleEdge,
  EstimationFailed,
  FormatError,
  EmptyScan,
  EmptyInput,
  IOError,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hullpose
