#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fracprice/calibration.hpp"

namespace fracprice {

/// Fixed CSV header for option chains.
inline constexpr const char* kChainHeader = "date,side,strike,maturity_years,mid_price,spot,rate,div_yield";

/// Rows grouped by date in order of first appearance; quote order within a day is preserved.
/// Throws EmptyFile, SchemaMismatch (with the offending line number) or InconsistentSpot.
std::vector<MarketSnapshot> load_chain(const std::string& path);
std::vector<MarketSnapshot> parse_chain(std::istream& in, const std::string& source = "<stream>");

void write_chain(std::ostream& out, const std::vector<MarketSnapshot>& days);
void write_chain(const std::string& path, const std::vector<MarketSnapshot>& days);

// ===========================================================================
// Fit results (JSON lines)
// ===========================================================================

std::string fit_result_to_json(const FitResult& r);
FitResult fit_result_from_json(const std::string& line);

void write_fit_results(std::ostream& out, const std::vector<FitResult>& rows);
std::vector<FitResult> read_fit_results(std::istream& in);

// ===========================================================================
// Synthetic chains
// ===========================================================================

struct SynthConfig {
    ModelKind model = ModelKind::df();
    ModelParams params{1.6, 1.05, 0.15};
    int days = 5;
    /// Multiplicative price noise: mid = price (1 + noise Z).
    double noise = 0.01;
    std::uint64_t seed = 7;
    double spot = 1000.0;
    double rate = 0.01;
    double div_yield = 0.02;
    std::vector<double> maturities{1.0 / 12.0, 0.25, 0.5, 1.0};
    /// OTM quotes per maturity, split between puts below and calls above the forward.
    int quotes_per_maturity = 15;
};

/// Noisy OTM chain generated from a known model; deterministic for a fixed seed.
std::vector<MarketSnapshot> synthesize_chain(const SynthConfig& cfg);

}  // namespace fracprice
