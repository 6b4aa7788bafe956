#include "fracprice/pricing.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "fracprice/error.hpp"
#include "fracprice/quadrature.hpp"

namespace fracprice {

namespace {

constexpr double kBodyLeft = -60.0;
constexpr int kTailPanels = 21;
constexpr double kPanelTol = 1e-15;
constexpr double kPriceClamp = 1e-8;

DiffusionSpec shape_of(const DiffusionSpec& spec) {
    DiffusionSpec s = spec;
    s.sigma = 1.0;
    return s;
}

double clamp_price(double v) {
    if (v >= 0.0) return v;
    if (v >= -kPriceClamp) return 0.0;
    throw Error(ErrorCode::PositivityViolation, "option price negative beyond round-off");
}

/// Barycentric weights for the 15 Kronrod nodes.
const std::array<double, 15>& bary_weights() {
    static const std::array<double, 15> w = [] {
        const auto& k = quad::Kronrod15::get();
        std::array<double, 15> out{};
        for (int i = 0; i < 15; ++i) {
            double p = 1.0;
            for (int j = 0; j < 15; ++j)
                if (j != i) p *= k.x[i] - k.x[j];
            out[i] = 1.0 / p;
        }
        return out;
    }();
    return w;
}

void check_market(double S, double K, double tau) {
    if (!(S > 0.0)) throw Error(ErrorCode::InvalidArgument, "spot must be positive");
    if (!(K > 0.0)) throw Error(ErrorCode::InvalidArgument, "strike must be positive");
    if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "maturity must be positive");
}

}  // namespace

const char* to_string(OptionSide s) { return s == OptionSide::Call ? "call" : "put"; }

// ===========================================================================
// Black-Scholes
// ===========================================================================

double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

PriceResult bs_price(double S, double K, double tau, double r, double q, double sigma_bs, OptionSide side) {
    if (!(S > 0.0) || !(K > 0.0) || !(tau >= 0.0) || !(sigma_bs >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "bs_price needs S, K > 0 and tau, sigma >= 0");
    PriceResult out;
    const double fwd = S * std::exp(-q * tau);
    const double kd = K * std::exp(-r * tau);
    const double sst = sigma_bs * std::sqrt(tau);
    if (sst <= 0.0) {
        out.value = side == OptionSide::Call ? std::max(fwd - kd, 0.0) : std::max(kd - fwd, 0.0);
        return out;
    }
    const double d1 = (std::log(fwd / kd) + 0.5 * sst * sst) / sst;
    const double d2 = d1 - sst;
    if (side == OptionSide::Call) out.value = fwd * norm_cdf(d1) - kd * norm_cdf(d2);
    else out.value = kd * norm_cdf(-d2) - fwd * norm_cdf(-d1);
    out.value = std::max(out.value, 0.0);
    out.drift_mu = -0.5 * sigma_bs * sigma_bs;
    return out;
}

double bs_delta(double S, double K, double tau, double r, double q, double sigma_bs) {
    if (!(S > 0.0) || !(K > 0.0) || !(tau > 0.0) || !(sigma_bs > 0.0))
        throw Error(ErrorCode::InvalidArgument, "bs_delta needs positive S, K, tau, sigma");
    const double sst = sigma_bs * std::sqrt(tau);
    const double d1 = (std::log(S / K) + (r - q) * tau + 0.5 * sst * sst) / sst;
    return std::exp(-q * tau) * norm_cdf(d1);
}

// ===========================================================================
// TerminalMeasure
// ===========================================================================

TerminalMeasure::TerminalMeasure(const DiffusionSpec& spec, double ell_max, const ContourConfig& cfg)
    : spec_(spec), green_(shape_of(spec), cfg), ell_max_(ell_max) {
    if (!(ell_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "ell_max must be positive");

    // right edge: stop at the contour noise floor or once the weighted density is negligible
    double peak = green_.unit_origin();
    for (int i = -80; i <= 80; ++i) peak = std::max(peak, std::abs(green_.unit(0.05 * i)));
    noise_ = 1e-15 * peak;
    const double floor = noise_;
    double x_hi = 1.0;
    int quiet = 0;
    for (double x = 1.0; x < 200.0; x += 0.5) {
        const double g = std::abs(green_.unit(x));
        x_hi = x;
        if (g < floor) break;
        if (g * std::exp(std::min(ell_max_ * x, 700.0)) < 1e-18) {
            if (++quiet == 2) break;
        } else {
            quiet = 0;
        }
    }

    // power-law tail panels, most negative first
    const int tail_panels = spec_.alpha < 2.0 ? kTailPanels : 0;
    double lo_edge = kBodyLeft * std::ldexp(1.0, tail_panels);
    for (int k = tail_panels - 1; k >= 0; --k) {
        const double a = kBodyLeft * std::ldexp(1.0, k + 1);
        const double b = kBodyLeft * std::ldexp(1.0, k);
        add_panel(a, b, 1.0, 0);
    }
    if (spec_.alpha < 2.0) {
        const double X = -lo_edge;
        for (int m = 1; m <= 3; ++m)
            far_mass_ += green_.tail_coefficient(m) * std::pow(X, -m * spec_.alpha) / (m * spec_.alpha);
        far_mass_ = std::max(far_mass_, 0.0);
    }
    far_point_ = 2.0 * lo_edge;

    std::vector<double> cuts = {kBodyLeft, -40.0, -26.0, -17.0, -11.0, -7.0, -4.5, -3.0, -2.0, -1.25, -0.6, -0.25, 0.0};
    for (double x = 0.25; x < x_hi; x += (x < 2.0 ? 0.35 : 1.0)) cuts.push_back(x);
    cuts.push_back(x_hi);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) add_panel(cuts[i], cuts[i + 1], kPanelTol, 48);
}

void TerminalMeasure::add_panel(double a, double b, double tol, int depth) {
    const auto& k = quad::Kronrod15::get();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    std::array<double, 15> xs{}, gs{};
    double sk = 0.0, sg = 0.0;
    for (int i = 0; i < 15; ++i) {
        xs[i] = c + h * k.x[i];
        gs[i] = green_.unit(xs[i]);
        const double wgt = 1.0 + std::exp(std::min(ell_max_ * xs[i], 700.0));
        sk += k.wk[i] * gs[i] * wgt;
        sg += k.wg[i] * gs[i] * wgt;
    }
    // resolution limit: relative round-off plus the absolute noise of G
    double floor = 0.0;
    for (int i = 0; i < 15; ++i)
        floor += k.wk[i] * (1e-13 * std::abs(gs[i]) + 10.0 * noise_) *
                 (1.0 + std::exp(std::min(ell_max_ * xs[i], 700.0)));
    const double err = std::abs(sk - sg) * h;
    if (err > tol && err > floor * h && h > 1e-9 && depth > 0) {
        add_panel(a, c, tol, depth - 1);
        add_panel(c, b, tol, depth - 1);
        return;
    }
    panels_.push_back(Panel{a, b, x_.size(), err});
    for (int i = 0; i < 15; ++i) {
        x_.push_back(xs[i]);
        g_.push_back(gs[i]);
        wg_.push_back(k.wk[i] * h * gs[i]);
    }
}

double TerminalMeasure::interpolate(std::size_t p, double x) const {
    const auto& k = quad::Kronrod15::get();
    const auto& bw = bary_weights();
    const Panel& pn = panels_[p];
    const double t = (2.0 * x - pn.a - pn.b) / (pn.b - pn.a);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double d = t - k.x[i];
        if (d == 0.0) return g_[pn.first + i];
        const double q = bw[i] / d;
        num += q * g_[pn.first + i];
        den += q;
    }
    return num / den;
}

std::size_t TerminalMeasure::locate(double x) const {
    if (x > panels_.back().b) return panels_.size();
    auto it = std::upper_bound(panels_.begin(), panels_.end(), x,
                               [](double v, const Panel& p) { return v < p.a; });
    if (it == panels_.begin()) return 0;
    return static_cast<std::size_t>(it - panels_.begin()) - 1;
}

double TerminalMeasure::total_mass() const {
    double s = far_mass_;
    for (double w : wg_) s += w;
    return s;
}

std::shared_ptr<const TerminalMeasure> TerminalMeasure::shared(const DiffusionSpec& spec, double ell_needed) {
    // ell_max snapped to a power of two so the result never depends on what was cached before
    const double ell = std::exp2(std::ceil(std::log2(std::max(ell_needed, 1e-3))));
    thread_local std::shared_ptr<const TerminalMeasure> last;
    if (last && last->spec().alpha == spec.alpha && last->spec().gamma == spec.gamma &&
        last->spec().kind == spec.kind && last->ell_max() == ell)
        return last;
    last = std::make_shared<const TerminalMeasure>(shape_of(spec), ell, contour_for(spec));
    return last;
}

// ===========================================================================
// MaturitySlice
// ===========================================================================

MaturitySlice::MaturitySlice(std::shared_ptr<const TerminalMeasure> m, const DiffusionSpec& spec, double S,
                             double tau, double r, double q)
    : m_(std::move(m)), tau_(tau), r_(r), q_(q) {
    if (!(S > 0.0) || !(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "slice needs S > 0, tau > 0");
    if (spec.alpha != m_->spec().alpha || spec.gamma != m_->spec().gamma || spec.kind != m_->spec().kind)
        throw Error(ErrorCode::InvalidArgument, "slice spec does not match the measure shape");
    ell_ = spec.unit_length(tau);
    F_ = S * std::exp((r - q) * tau);
    const double closed = exponential_moment(spec, 1.0, tau);
    A_ = F_ / closed;
    mu_ = esscher_drift(spec, tau);

    const auto& x = m_->nodes();
    const auto& w = m_->weights();
    const std::size_t n = x.size();
    u0_.assign(n + 1, 0.0);
    u1_.assign(n + 1, 0.0);
    u2_.assign(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        const double e = std::exp(ell_ * x[i]);
        u0_[i] = u0_[i + 1] + w[i];
        u1_[i] = u1_[i + 1] + w[i] * e;
        u2_[i] = u2_[i + 1] + w[i] * e * e;
    }
    mart_res_ = u1_[0] / closed - 1.0;
}

MaturitySlice::Partial MaturitySlice::right_of(double xs) const {
    Partial out;
    const auto& panels = m_->panels();
    if (xs <= panels.front().a) {
        out.m0 = u0_[0];
        out.m1 = u1_[0];
        out.m2 = u2_[0];
        return out;
    }
    const std::size_t p = m_->locate(xs);
    if (p >= panels.size()) return out;
    const auto& pn = panels[p];
    const std::size_t next = p + 1 < panels.size() ? panels[p + 1].first : m_->nodes().size();
    out.m0 = u0_[next];
    out.m1 = u1_[next];
    out.m2 = u2_[next];
    const auto& gl = quad::GaussLegendre::get(24);
    const double c = 0.5 * (xs + pn.b), h = 0.5 * (pn.b - xs);
    if (h <= 0.0) return out;
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
        const double x = c + h * gl.x[i];
        const double gw = gl.w[i] * h * m_->interpolate(p, x);
        const double e = std::exp(ell_ * x);
        out.m0 += gw;
        out.m1 += gw * e;
        out.m2 += gw * e * e;
    }
    return out;
}

double MaturitySlice::call_expectation(double K) const {
    const Partial r = right_of(std::log(K / A_) / ell_);
    return std::max(A_ * r.m1 - K * r.m0, 0.0);
}

double MaturitySlice::put_expectation(double K) const {
    const Partial r = right_of(std::log(K / A_) / ell_);
    const double t0 = u0_[0] + m_->far_mass();
    const double t1 = u1_[0] + m_->far_mass() * std::exp(ell_ * m_->far_point());
    return std::max(K * (t0 - r.m0) - A_ * (t1 - r.m1), 0.0);
}

double MaturitySlice::call_times_spot(double K) const {
    const Partial r = right_of(std::log(K / A_) / ell_);
    return A_ * A_ * r.m2 - K * A_ * r.m1;
}

double MaturitySlice::call_squared(double K) const {
    const Partial r = right_of(std::log(K / A_) / ell_);
    return A_ * A_ * r.m2 - 2.0 * A_ * K * r.m1 + K * K * r.m0;
}

double MaturitySlice::spot_moment(int order) const {
    if (order == 0) return u0_[0] + m_->far_mass();
    if (order == 1) return A_ * u1_[0];
    if (order == 2) return A_ * A_ * u2_[0];
    throw Error(ErrorCode::InvalidArgument, "spot_moment supports orders 0, 1, 2");
}

double MaturitySlice::call_error(double K) const {
    const double xs = std::log(K / A_) / ell_;
    double err = 0.0;
    for (const auto& p : m_->panels()) {
        if (p.b < xs) continue;
        err += p.error * (A_ + K);
    }
    return err;
}

// ===========================================================================
// DfPricer
// ===========================================================================

DfPricer::DfPricer(const DiffusionSpec& spec, double S, double r, double q, std::vector<double> maturities)
    : spec_(spec), S_(S), r_(r), q_(q) {
    spec_.validate();
    if (maturities.empty()) throw Error(ErrorCode::InvalidArgument, "no maturities");
    std::sort(maturities.begin(), maturities.end());
    maturities.erase(std::unique(maturities.begin(), maturities.end()), maturities.end());
    double ell = 0.0;
    for (double t : maturities) {
        if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "maturity must be positive");
        ell = std::max(ell, spec_.unit_length(t));
    }
    measure_ = TerminalMeasure::shared(spec_, 2.0 * ell);
    for (double t : maturities) slices_.emplace_back(measure_, spec_, S_, t, r_, q_);
}

const MaturitySlice& DfPricer::slice(double tau) const {
    for (const auto& s : slices_)
        if (s.tau() == tau) return s;
    throw Error(ErrorCode::InvalidArgument, "maturity not prepared in this pricer");
}

PriceResult DfPricer::price(OptionSide side, double K, double tau) const {
    check_market(S_, K, tau);
    const MaturitySlice& s = slice(tau);
    PriceResult out;
    const double disc = s.discount();
    const double call = disc * s.call_expectation(K);
    if (side == OptionSide::Call) out.value = call;
    else out.value = call - S_ * std::exp(-q_ * tau) + K * disc;
    out.value = clamp_price(out.value);
    out.quadrature_error = disc * s.call_error(K);
    out.drift_mu = s.drift();
    out.martingale_residual = std::abs(s.martingale_residual());
    out.martingale_ok = out.martingale_residual <= 1e-4;
    out.formal_drift = drift_is_formal(spec_);
    return out;
}

PriceResult df_call_price(const DiffusionSpec& spec, double S, double K, double tau, double r, double q) {
    check_market(S, K, tau);
    return DfPricer(spec, S, r, q, {tau}).price(OptionSide::Call, K, tau);
}

PriceResult df_put_price(const DiffusionSpec& spec, double S, double K, double tau, double r, double q) {
    check_market(S, K, tau);
    return DfPricer(spec, S, r, q, {tau}).price(OptionSide::Put, K, tau);
}

PriceResult df_put_price_direct(const DiffusionSpec& spec, double S, double K, double tau, double r, double q) {
    check_market(S, K, tau);
    DfPricer pr(spec, S, r, q, {tau});
    const MaturitySlice& s = pr.slice(tau);
    PriceResult out;
    out.value = clamp_price(s.discount() * s.put_expectation(K));
    out.quadrature_error = s.discount() * s.call_error(K);
    out.drift_mu = s.drift();
    out.martingale_residual = std::abs(s.martingale_residual());
    out.martingale_ok = out.martingale_residual <= 1e-4;
    out.formal_drift = drift_is_formal(spec);
    return out;
}

double martingale_check(const DiffusionSpec& spec, double tau) {
    DfPricer pr(spec, 1.0, 0.0, 0.0, {tau});
    return pr.slice(tau).martingale_residual();
}

}  // namespace fracprice
