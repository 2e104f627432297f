#include "hlab/error.hpp"

namespace hlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kDegreeOverflow: return "degree-overflow";
    case ErrorCode::kInvalidDensity: return "invalid-density";
    case ErrorCode::kUnsupportedShape: return "unsupported-shape";
    case ErrorCode::kQuadratureFailure: return "quadrature-failure";
    case ErrorCode::kCoverageFailure: return "coverage-failure";
    case ErrorCode::kInconsistentHessian: return "inconsistent-hessian";
    case ErrorCode::kDegenerateRestriction: return "degenerate-restriction";
    case ErrorCode::kNonConvergence: return "non-convergence";
    case ErrorCode::kInsufficientData: return "insufficient-data";
    case ErrorCode::kSingularGramian: return "singular-gramian";
    case ErrorCode::kConfigError: return "config-error";
    case ErrorCode::kIoError: return "io-error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace hlab
