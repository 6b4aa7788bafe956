#include "fracprice/error.hpp"

namespace fracprice {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid_argument";
        case ErrorCode::Pole: return "pole_at_nonpositive_integer";
        case ErrorCode::NonConvergence: return "non_convergence";
        case ErrorCode::ToleranceNotReached: return "tolerance_not_reached";
        case ErrorCode::ThetaOutsideDiamond: return "theta_outside_diamond";
        case ErrorCode::XOutsideGrid: return "x_outside_grid";
        case ErrorCode::GridNotSymmetric: return "grid_not_symmetric";
        case ErrorCode::InsufficientDecay: return "insufficient_decay";
        case ErrorCode::ContourTruncation: return "contour_truncation_error_exceeded";
        case ErrorCode::XiZero: return "xi_zero";
        case ErrorCode::PositivityViolation: return "positivity_violation";
        case ErrorCode::QuadratureBudget: return "quadrature_budget_exceeded";
        case ErrorCode::MartingaleFailure: return "martingale_verification_failure";
        case ErrorCode::GammaOutOfRange: return "gamma_out_of_range";
        case ErrorCode::VanishingVariance: return "vanishing_variance";
        case ErrorCode::InsufficientQuotes: return "insufficient_quotes";
        case ErrorCode::SchemaMismatch: return "schema_mismatch";
        case ErrorCode::InconsistentSpot: return "inconsistent_spot_within_day";
        case ErrorCode::EmptyFile: return "empty_file";
        case ErrorCode::Io: return "io_error";
    }
    return "unknown";
}

}  // namespace fracprice
