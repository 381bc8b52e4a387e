#pragma once

#include <stdexcept>
#include <string>

namespace relaydual {

struct NotPositiveDefinite : std::runtime_error {
  explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::runtime_error {
  explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroQuantizationNoise : std::runtime_error {
  explicit ZeroQuantizationNoise(const std::string& what) : std::runtime_error(what) {}
};

// Conditional compression denominator vanished: the conditioning block of the
// quantization covariance is (numerically) singular, i.e. the fronthaul rate
// would be infinite.
struct SingularConditioningBlock : std::runtime_error {
  explicit SingularConditioningBlock(const std::string& what) : std::runtime_error(what) {}
};

// A relay carries no beamforming energy, so its fronthaul rate is undefined;
// callers must drop such relays before solving.
struct DegenerateRelay : std::runtime_error {
  explicit DegenerateRelay(const std::string& what) : std::runtime_error(what) {}
};

struct DualsUnavailable : std::runtime_error {
  explicit DualsUnavailable(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace relaydual
