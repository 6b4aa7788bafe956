#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fracprice/pricing.hpp"

namespace fracprice {

enum class ModelFamily { BlackScholes, LevyStable, DoubleFractional };

/// LevyStable is DoubleFractional with gamma pinned to 1.
struct ModelKind {
    ModelFamily family = ModelFamily::DoubleFractional;
    DerivativeKind kind = DerivativeKind::Caputo;

    static ModelKind bs() { return {ModelFamily::BlackScholes, DerivativeKind::Caputo}; }
    static ModelKind levy() { return {ModelFamily::LevyStable, DerivativeKind::Caputo}; }
    static ModelKind df(DerivativeKind k = DerivativeKind::Caputo) { return {ModelFamily::DoubleFractional, k}; }

    /// "bs", "levy", "df" or "df-rf".
    std::string name() const;
    static ModelKind parse(const std::string& s);
    int dimension() const;

    bool operator==(const ModelKind& o) const { return family == o.family && kind == o.kind; }
};

enum class SideFilter { All, CallsOnly, PutsOnly };

const char* to_string(SideFilter s);
SideFilter parse_side_filter(const std::string& s);

struct Interval {
    double lo, hi;
    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// For BlackScholes sigma is the lognormal volatility; otherwise the stable scale.
struct ModelParams {
    double alpha = 2.0;
    double gamma = 1.0;
    double sigma = 0.2;

    bool operator==(const ModelParams& o) const {
        return alpha == o.alpha && gamma == o.gamma && sigma == o.sigma;
    }
};

struct CalibrationConfig {
    Interval alpha{1.05, 2.0};
    Interval gamma{0.5, 1.5};
    Interval sigma{1e-4, 2.0};
    int restarts = 8;
    /// Relative spread of objective values across the simplex at convergence.
    double simplex_tol = 1e-8;
    /// Simplex diameter in transformed coordinates at convergence.
    double simplex_xtol = 1e-6;
    int max_evals = 1500;
    SideFilter side_filter = SideFilter::All;
    std::uint64_t seed = 42;

    void validate() const;
};

struct FitResult {
    std::string date;
    ModelKind model;
    ModelParams params;
    double ae = 0.0;
    int n_quotes = 0;
    bool converged = false;
    int evals = 0;
    /// "ok", "insufficient_information" or an error code name when the day failed.
    std::string status = "ok";

    bool operator==(const FitResult& o) const {
        return date == o.date && model == o.model && params == o.params && ae == o.ae && n_quotes == o.n_quotes &&
               converged == o.converged && evals == o.evals && status == o.status;
    }
};

/// Calls with K > F and puts with K < F, F the forward at the quote maturity.
std::vector<OptionQuote> otm_filter(const MarketSnapshot& snap);

std::vector<OptionQuote> side_filter(const std::vector<OptionQuote>& quotes, SideFilter side);

/// Model prices for the quotes of snap, in quote order.
std::vector<double> model_prices(const ModelKind& model, const ModelParams& p, const MarketSnapshot& snap,
                                 const std::vector<OptionQuote>& quotes);

/// Sum of |model - mid| over the OTM quotes passing the side filter; +inf when any quote fails to
/// price or the slice fails the martingale check.
double aggregated_error(const ModelKind& model, const ModelParams& p, const MarketSnapshot& snap,
                        SideFilter side = SideFilter::All);

/// Same objective over an explicit quote list; summation is order independent.
double aggregated_error(const ModelKind& model, const ModelParams& p, const MarketSnapshot& snap,
                        const std::vector<OptionQuote>& quotes);

/// Bounded Nelder-Mead with logistic reparameterisation. Extra seeds are added as restarts.
FitResult fit_day(const MarketSnapshot& snap, const ModelKind& model, const CalibrationConfig& cfg,
                  const std::vector<ModelParams>& seeds = {});

// ===========================================================================
// Series
// ===========================================================================

struct DayFits {
    std::string date;
    FitResult bs, levy, df;
    /// AE_LS / AE_DF
    double rho = 0.0;
    /// gamma / alpha of the DF fit
    double omega = 0.0;
    std::string status = "ok";
};

struct Stat {
    double mean = 0.0, std = 0.0;
    int n = 0;
};

/// Mean and sample standard deviation across days, one row per model in the Table I layout.
struct SeriesSummary {
    struct Row {
        ModelKind model;
        Stat alpha, gamma, sigma, ae;
    };
    std::vector<Row> rows;
    Stat rho, omega;
    int days = 0, failed = 0;
};

struct SeriesResult {
    std::vector<DayFits> days;
    SeriesSummary summary;
};

Stat mean_std(const std::vector<double>& v);

/// Worker count: FRACPRICE_THREADS when set and positive, else the hardware concurrency.
unsigned worker_count();

/// Fits BS, then Levy-stable, then DF seeded with the Levy-stable optimum for every day.
/// Days run concurrently; per-day failures are recorded and the series continues.
SeriesResult fit_series(const std::vector<MarketSnapshot>& days, const CalibrationConfig& cfg,
                        DerivativeKind kind = DerivativeKind::Caputo,
                        const std::function<void(const DayFits&)>& on_day = {});

SeriesSummary summarize(const std::vector<DayFits>& days, DerivativeKind kind = DerivativeKind::Caputo);

}  // namespace fracprice
