#include "fracprice/calibration.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <random>
#include <thread>

#include "fracprice/error.hpp"

namespace fracprice {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogitClamp = 25.0;

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

double to_box(double u, const Interval& b) { return b.lo + (b.hi - b.lo) * logistic(u); }

double from_box(double x, const Interval& b) {
    const double t = (x - b.lo) / (b.hi - b.lo);
    if (t <= 0.0) return -kLogitClamp;
    if (t >= 1.0) return kLogitClamp;
    return std::clamp(std::log(t / (1.0 - t)), -kLogitClamp, kLogitClamp);
}

using Point = std::vector<double>;

struct Mapper {
    ModelKind model;
    const CalibrationConfig& cfg;

    ModelParams params(const Point& u) const {
        ModelParams p;
        switch (model.family) {
            case ModelFamily::BlackScholes:
                p.sigma = to_box(u[0], cfg.sigma);
                break;
            case ModelFamily::LevyStable:
                p.alpha = to_box(u[0], cfg.alpha);
                p.sigma = to_box(u[1], cfg.sigma);
                break;
            case ModelFamily::DoubleFractional:
                p.alpha = to_box(u[0], cfg.alpha);
                p.gamma = to_box(u[1], cfg.gamma);
                p.sigma = to_box(u[2], cfg.sigma);
                break;
        }
        return p;
    }

    Point coords(const ModelParams& p) const {
        switch (model.family) {
            case ModelFamily::BlackScholes: return {from_box(p.sigma, cfg.sigma)};
            case ModelFamily::LevyStable: return {from_box(p.alpha, cfg.alpha), from_box(p.sigma, cfg.sigma)};
            case ModelFamily::DoubleFractional:
                return {from_box(p.alpha, cfg.alpha), from_box(p.gamma, cfg.gamma), from_box(p.sigma, cfg.sigma)};
        }
        return {};
    }

    /// Unit-cube point to transformed coordinates, kept away from the box faces.
    Point from_unit(const std::array<double, 3>& z) const {
        const int d = model.dimension();
        Point u(d);
        for (int i = 0; i < d; ++i) {
            const double t = 0.05 + 0.9 * z[i];
            u[i] = std::log(t / (1.0 - t));
        }
        return u;
    }
};

double radical_inverse(unsigned base, unsigned i) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}

struct NmResult {
    Point best;
    double f = kInf;
    int evals = 0;
    bool converged = false;
};

template <class F>
NmResult nelder_mead(F&& f, Point x0, double step, const CalibrationConfig& cfg) {
    const std::size_t n = x0.size();
    std::vector<Point> xs(n + 1, x0);
    std::vector<double> fs(n + 1);
    NmResult out;
    auto eval = [&](const Point& x) {
        ++out.evals;
        return f(x);
    };
    for (std::size_t i = 0; i < n; ++i) xs[i + 1][i] += step;
    for (std::size_t i = 0; i <= n; ++i) fs[i] = eval(xs[i]);

    std::vector<std::size_t> order(n + 1);
    auto sort_simplex = [&] {
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        std::vector<Point> nx(n + 1);
        std::vector<double> nf(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            nx[i] = xs[order[i]];
            nf[i] = fs[order[i]];
        }
        xs.swap(nx);
        fs.swap(nf);
    };
    auto along = [&](const Point& c, const Point& w, double t) {
        Point p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = std::clamp(c[i] + t * (w[i] - c[i]), -kLogitClamp, kLogitClamp);
        return p;
    };

    while (true) {
        sort_simplex();
        double diam = 0.0;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j) diam = std::max(diam, std::abs(xs[i][j] - xs[0][j]));
        const bool flat = std::isfinite(fs[n]) && fs[n] - fs[0] <= cfg.simplex_tol * (std::abs(fs[0]) + 1e-10);
        if (flat && diam <= cfg.simplex_xtol) {
            out.converged = true;
            break;
        }
        if (out.evals >= cfg.max_evals) break;

        Point c(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) c[j] += xs[i][j] / static_cast<double>(n);

        const Point xr = along(c, xs[n], -1.0);
        const double fr = eval(xr);
        if (fr < fs[0]) {
            const Point xe = along(c, xs[n], -2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                xs[n] = xe;
                fs[n] = fe;
            } else {
                xs[n] = xr;
                fs[n] = fr;
            }
            continue;
        }
        if (fr < fs[n - 1]) {
            xs[n] = xr;
            fs[n] = fr;
            continue;
        }
        const bool outside = fr < fs[n];
        const Point xc = outside ? along(c, xs[n], -0.5) : along(c, xs[n], 0.5);
        const double fc = eval(xc);
        if (fc < (outside ? fr : fs[n])) {
            xs[n] = xc;
            fs[n] = fc;
            continue;
        }
        for (std::size_t i = 1; i <= n; ++i) {
            xs[i] = along(xs[0], xs[i], 0.5);
            fs[i] = eval(xs[i]);
        }
    }
    sort_simplex();
    out.best = xs[0];
    out.f = fs[0];
    return out;
}

double quote_price(const ModelKind& model, const ModelParams& p, const MarketSnapshot& snap, const OptionQuote& q,
                   const std::map<double, const DfPricer*>& pricers) {
    if (model.family == ModelFamily::BlackScholes)
        return bs_price(snap.spot, q.strike, q.maturity, snap.rate, snap.div_yield, p.sigma, q.side).value;
    const DfPricer& pr = *pricers.at(q.maturity);
    const PriceResult res = pr.price(q.side, q.strike, q.maturity);
    if (!res.martingale_ok) throw Error(ErrorCode::MartingaleFailure, "martingale residual above tolerance");
    return res.value;
}

DiffusionSpec spec_for(const ModelKind& model, const ModelParams& p) {
    DiffusionSpec s;
    s.alpha = p.alpha;
    s.gamma = model.family == ModelFamily::LevyStable ? 1.0 : p.gamma;
    s.kind = model.kind;
    s.sigma = p.sigma;
    return s;
}

}  // namespace

std::string ModelKind::name() const {
    switch (family) {
        case ModelFamily::BlackScholes: return "bs";
        case ModelFamily::LevyStable: return "levy";
        case ModelFamily::DoubleFractional: return kind == DerivativeKind::Caputo ? "df" : "df-rf";
    }
    return "df";
}

ModelKind ModelKind::parse(const std::string& s) {
    if (s == "bs") return bs();
    if (s == "levy") return levy();
    if (s == "df" || s == "df-caputo") return df(DerivativeKind::Caputo);
    if (s == "df-rf") return df(DerivativeKind::RieszFeller);
    throw Error(ErrorCode::InvalidArgument, "unknown model '" + s + "'");
}

int ModelKind::dimension() const {
    switch (family) {
        case ModelFamily::BlackScholes: return 1;
        case ModelFamily::LevyStable: return 2;
        case ModelFamily::DoubleFractional: return 3;
    }
    return 3;
}

const char* to_string(SideFilter s) {
    switch (s) {
        case SideFilter::All: return "all";
        case SideFilter::CallsOnly: return "calls";
        case SideFilter::PutsOnly: return "puts";
    }
    return "all";
}

SideFilter parse_side_filter(const std::string& s) {
    if (s == "all") return SideFilter::All;
    if (s == "calls") return SideFilter::CallsOnly;
    if (s == "puts") return SideFilter::PutsOnly;
    throw Error(ErrorCode::InvalidArgument, "unknown side filter '" + s + "'");
}

void CalibrationConfig::validate() const {
    auto check = [](const Interval& b, double lo, double hi, const char* name) {
        if (!(b.lo < b.hi) || b.lo < lo || b.hi > hi)
            throw Error(ErrorCode::InvalidArgument, std::string("bounds for ") + name + " outside the model domain");
    };
    check(alpha, 1.0 + 1e-12, 2.0, "alpha");
    check(gamma, 1e-12, 2.0 - 1e-12, "gamma");
    check(sigma, 1e-12, 1e6, "sigma");
    if (alpha.lo <= 1.0) throw Error(ErrorCode::InvalidArgument, "alpha bound must exceed 1");
    if (restarts < 1) throw Error(ErrorCode::InvalidArgument, "restarts must be at least 1");
    if (!(simplex_tol > 0.0) || !(simplex_xtol > 0.0)) throw Error(ErrorCode::InvalidArgument, "simplex tolerances must be positive");
    if (max_evals < 10) throw Error(ErrorCode::InvalidArgument, "max_evals too small");
}

std::vector<OptionQuote> otm_filter(const MarketSnapshot& snap) {
    std::vector<OptionQuote> out;
    for (const auto& q : snap.quotes) {
        const double F = snap.forward(q.maturity);
        if ((q.side == OptionSide::Call && q.strike > F) || (q.side == OptionSide::Put && q.strike < F))
            out.push_back(q);
    }
    return out;
}

std::vector<OptionQuote> side_filter(const std::vector<OptionQuote>& quotes, SideFilter side) {
    if (side == SideFilter::All) return quotes;
    const OptionSide keep = side == SideFilter::CallsOnly ? OptionSide::Call : OptionSide::Put;
    std::vector<OptionQuote> out;
    for (const auto& q : quotes)
        if (q.side == keep) out.push_back(q);
    return out;
}

std::vector<double> model_prices(const ModelKind& model, const ModelParams& p, const MarketSnapshot& snap,
                                 const std::vector<OptionQuote>& quotes) {
    std::vector<double> out;
    out.reserve(quotes.size());
    std::map<double, const DfPricer*> index;
    std::unique_ptr<DfPricer> pricer;
    if (model.family != ModelFamily::BlackScholes && !quotes.empty()) {
        std::vector<double> taus;
        for (const auto& q : quotes) taus.push_back(q.maturity);
        pricer = std::make_unique<DfPricer>(spec_for(model, p), snap.spot, snap.rate, snap.div_yield, taus);
        for (double t : taus) index[t] = pricer.get();
    }
    for (const auto& q : quotes) out.push_back(quote_price(model, p, snap, q, index));
    return out;
}

double aggregated_error(const ModelKind& model, const ModelParams& p, const MarketSnapshot& snap,
                        const std::vector<OptionQuote>& quotes) {
    std::vector<double> err;
    try {
        const std::vector<double> px = model_prices(model, p, snap, quotes);
        err.reserve(px.size());
        for (std::size_t i = 0; i < px.size(); ++i) err.push_back(std::abs(px[i] - quotes[i].mid));
    } catch (const Error&) {
        return kInf;
    }
    std::sort(err.begin(), err.end());
    double s = 0.0;
    for (double e : err) s += e;
    return std::isfinite(s) ? s : kInf;
}

double aggregated_error(const ModelKind& model, const ModelParams& p, const MarketSnapshot& snap, SideFilter side) {
    return aggregated_error(model, p, snap, side_filter(otm_filter(snap), side));
}

FitResult fit_day(const MarketSnapshot& snap, const ModelKind& model, const CalibrationConfig& cfg,
                  const std::vector<ModelParams>& seeds) {
    cfg.validate();
    if (!(snap.spot > 0.0)) throw Error(ErrorCode::InvalidArgument, "snapshot spot must be positive");
    const std::vector<OptionQuote> quotes = side_filter(otm_filter(snap), cfg.side_filter);
    if (quotes.size() < 5)
        throw Error(ErrorCode::InsufficientQuotes,
                    "day " + snap.date + " has " + std::to_string(quotes.size()) + " OTM quotes, need 5");

    const Mapper map{model, cfg};
    auto objective = [&](const Point& u) { return aggregated_error(model, map.params(u), snap, quotes); };

    std::vector<Point> starts;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::array<double, 3> shift{unif(rng), unif(rng), unif(rng)};
    static constexpr std::array<unsigned, 3> kBases{2, 3, 5};
    for (int i = 1; i <= cfg.restarts; ++i) {
        std::array<double, 3> z{};
        for (int d = 0; d < 3; ++d) z[d] = std::fmod(radical_inverse(kBases[d], static_cast<unsigned>(i)) + shift[d], 1.0);
        starts.push_back(map.from_unit(z));
    }
    for (const auto& s : seeds) starts.push_back(map.coords(s));

    FitResult best;
    best.date = snap.date;
    best.model = model;
    best.n_quotes = static_cast<int>(quotes.size());
    best.ae = kInf;
    Point best_u;
    for (const auto& x0 : starts) {
        const NmResult r = nelder_mead(objective, x0, 0.6, cfg);
        best.evals += r.evals;
        if (r.f < best.ae) {
            best.ae = r.f;
            best_u = r.best;
            best.converged = r.converged;
        }
    }
    if (!best_u.empty()) {
        const NmResult r = nelder_mead(objective, best_u, 0.05, cfg);
        best.evals += r.evals;
        if (r.f <= best.ae) {
            best.ae = r.f;
            best_u = r.best;
            best.converged = r.converged;
        }
        best.params = map.params(best_u);
    }
    if (model.family == ModelFamily::LevyStable) best.params.gamma = 1.0;
    if (model.family == ModelFamily::BlackScholes) {
        best.params.alpha = 2.0;
        best.params.gamma = 1.0;
    }
    if (!std::isfinite(best.ae)) {
        best.status = error_code_name(ErrorCode::NonConvergence);
        best.converged = false;
    }
    bool informative = false;
    for (const auto& q : quotes) informative = informative || q.mid > 0.0;
    if (!informative) best.status = "insufficient_information";
    return best;
}

// ===========================================================================
// Series
// ===========================================================================

Stat mean_std(const std::vector<double>& v) {
    Stat s;
    s.n = static_cast<int>(v.size());
    if (v.empty()) return s;
    for (double x : v) s.mean += x;
    s.mean /= s.n;
    if (s.n > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(ss / (s.n - 1));
    }
    return s;
}

unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FRACPRICE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) n = static_cast<unsigned>(v);
    }
    return n;
}

namespace {

DayFits fit_one_day(const MarketSnapshot& snap, const CalibrationConfig& cfg, DerivativeKind kind) {
    DayFits d;
    d.date = snap.date;
    try {
        d.bs = fit_day(snap, ModelKind::bs(), cfg);
        d.levy = fit_day(snap, ModelKind::levy(), cfg);
        d.df = fit_day(snap, ModelKind::df(kind), cfg, {d.levy.params});
        d.rho = d.df.ae > 0.0 ? d.levy.ae / d.df.ae : kInf;
        d.omega = d.df.params.gamma / d.df.params.alpha;
        if (d.df.status != "ok") d.status = d.df.status;
    } catch (const Error& e) {
        d.status = error_code_name(e.code());
    }
    return d;
}

}  // namespace

SeriesSummary summarize(const std::vector<DayFits>& days, DerivativeKind kind) {
    SeriesSummary s;
    s.days = static_cast<int>(days.size());
    std::vector<double> rho, omega;
    std::array<std::array<std::vector<double>, 4>, 3> cols;
    for (const auto& d : days) {
        if (d.status != "ok") {
            ++s.failed;
            continue;
        }
        const std::array<const FitResult*, 3> fits{&d.bs, &d.levy, &d.df};
        for (std::size_t m = 0; m < 3; ++m) {
            cols[m][0].push_back(fits[m]->params.alpha);
            cols[m][1].push_back(fits[m]->params.gamma);
            cols[m][2].push_back(fits[m]->params.sigma);
            cols[m][3].push_back(fits[m]->ae);
        }
        if (std::isfinite(d.rho)) rho.push_back(d.rho);
        omega.push_back(d.omega);
    }
    const std::array<ModelKind, 3> kinds{ModelKind::bs(), ModelKind::levy(), ModelKind::df(kind)};
    for (std::size_t m = 0; m < 3; ++m)
        s.rows.push_back({kinds[m], mean_std(cols[m][0]), mean_std(cols[m][1]), mean_std(cols[m][2]), mean_std(cols[m][3])});
    s.rho = mean_std(rho);
    s.omega = mean_std(omega);
    return s;
}

SeriesResult fit_series(const std::vector<MarketSnapshot>& days, const CalibrationConfig& cfg, DerivativeKind kind,
                        const std::function<void(const DayFits&)>& on_day) {
    if (days.empty()) throw Error(ErrorCode::InvalidArgument, "no trading days to fit");
    cfg.validate();
    SeriesResult out;
    out.days.resize(days.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < days.size(); i = next++) out.days[i] = fit_one_day(days[i], cfg, kind);
    };
    const unsigned n = std::min<unsigned>(worker_count(), static_cast<unsigned>(days.size()));
    if (n <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (on_day)
        for (const auto& d : out.days) on_day(d);
    out.summary = summarize(out.days, kind);
    return out;
}

}  // namespace fracprice
