#pragma once

#include <stdexcept>
#include <string>

namespace mowplan {

enum class ErrorKind {
  kInvalidInput,
  kOutOfRange,
  kDegeneratePolygon,
  kGridTooLarge,
  kTurnInfeasible,
  kDisconnectedLawn,
  kEmptyLawn,
  kUndefinedDistancePerCoverage,
  kParse,
  kSelfIntersection,
  kHoleOutsideBoundary,
  kIo,
};

const char* to_string(ErrorKind kind);

// All library failures are reported through this type. `stage` is filled in
// by the pipeline so callers can tell which step rejected the job.
class PlanningError : public std::runtime_error {
 public:
  PlanningError(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  PlanningError(ErrorKind kind, std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message),
        kind_(kind),
        stage_(std::move(stage)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  ErrorKind kind_;
  std::string stage_;
};

}  // namespace mowplan
