#pragma once

#include <stdexcept>
#include <string>

namespace fracprice {

/// Machine-readable failure categories; names are stable and appear in CLI error JSON.
enum class ErrorCode {
    InvalidArgument,
    Pole,
    NonConvergence,
    ToleranceNotReached,
    ThetaOutsideDiamond,
    XOutsideGrid,
    GridNotSymmetric,
    InsufficientDecay,
    ContourTruncation,
    XiZero,
    PositivityViolation,
    QuadratureBudget,
    MartingaleFailure,
    GammaOutOfRange,
    VanishingVariance,
    InsufficientQuotes,
    SchemaMismatch,
    InconsistentSpot,
    EmptyFile,
    Io,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace fracprice
