#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fracprice/calibration.hpp"
#include "fracprice/dataio.hpp"
#include "fracprice/error.hpp"
#include "fracprice/green.hpp"
#include "fracprice/hedging.hpp"
#include "fracprice/manifest.hpp"
#include "fracprice/pricing.hpp"

namespace fs = std::filesystem;
using namespace fracprice;

namespace {

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw Error(ErrorCode::InvalidArgument, "grid must be start:stop:count, got '" + spec + "'");
    double a = 0.0, b = 0.0;
    long n = 0;
    try {
        std::size_t pa = 0, pb = 0, pn = 0;
        a = std::stod(parts[0], &pa);
        b = std::stod(parts[1], &pb);
        n = std::stol(parts[2], &pn);
        if (pa != parts[0].size() || pb != parts[1].size() || pn != parts[2].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument, "grid must be start:stop:count, got '" + spec + "'");
    }
    if (n < 1 || n > 10000000) throw Error(ErrorCode::InvalidArgument, "grid count must be between 1 and 1e7");
    if (!std::isfinite(a) || !std::isfinite(b)) throw Error(ErrorCode::InvalidArgument, "grid bounds must be finite");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

DerivativeKind parse_kind(const std::string& s) {
    if (s == "caputo") return DerivativeKind::Caputo;
    if (s == "rf") return DerivativeKind::RieszFeller;
    throw Error(ErrorCode::InvalidArgument, "kind must be caputo or rf");
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    return out;
}

void finish(RunManifest& m, const std::vector<std::string>& outputs, const std::string& manifest_path) {
    for (const auto& o : outputs) m.add_output(o);
    m.write(manifest_path);
}

int emit_error(const std::string& code, const std::string& message) {
    nlohmann::ordered_json j;
    j["error"] = code;
    j["message"] = message;
    std::cerr << j.dump() << std::endl;
    return 2;
}

struct ModelOpts {
    double alpha = 2.0, gamma = 1.0, sigma = 0.2;
    std::string kind = "caputo";

    void add(CLI::App* app) {
        app->add_option("--alpha", alpha, "space-fractional order in (1, 2]");
        app->add_option("--gamma", gamma, "time-fractional order in (0, 2)");
        app->add_option("--sigma", sigma, "scale (lognormal vol for --model bs)");
        app->add_option("--kind", kind, "caputo or rf")->check(CLI::IsMember({"caputo", "rf"}));
    }
    DiffusionSpec spec() const {
        DiffusionSpec s{alpha, gamma, parse_kind(kind), sigma};
        s.validate();
        return s;
    }
    void record(RunManifest& m) const {
        m.config.push_back({"alpha", num(alpha)});
        m.config.push_back({"gamma", num(gamma)});
        m.config.push_back({"sigma", num(sigma)});
        m.config.push_back({"kind", kind});
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Double-fractional diffusion option pricing"};
    app.require_subcommand(1);
    std::string manifest_override;
    app.add_option("--manifest", manifest_override, "manifest path (default: next to the output)");

    // green
    auto* green = app.add_subcommand("green", "Green function curve g(xi, tau)");
    ModelOpts g_model;
    g_model.sigma = 1.0;
    g_model.add(green);
    double g_tau = 1.0;
    std::string g_grid = "-5:5:101", g_out, g_method = "mb";
    green->add_option("--tau", g_tau, "time");
    green->add_option("--grid", g_grid, "xi grid start:stop:count");
    green->add_option("--method", g_method, "mb, fourier or kernel")->check(CLI::IsMember({"mb", "fourier", "kernel"}));
    green->add_option("--out", g_out, "output TSV")->required();

    // price
    auto* price = app.add_subcommand("price", "European option price ladder");
    ModelOpts p_model;
    p_model.add(price);
    std::string p_modelname = "df", p_side = "call", p_out, p_strikes;
    double p_spot = 1000.0, p_strike = 1000.0, p_tau = 0.25, p_rate = 0.0, p_div = 0.0;
    price->add_option("--model", p_modelname, "bs, levy or df")->check(CLI::IsMember({"bs", "levy", "df"}));
    price->add_option("--side", p_side, "call or put")->check(CLI::IsMember({"call", "put"}));
    price->add_option("--spot", p_spot, "spot price");
    price->add_option("--strike", p_strike, "single strike");
    price->add_option("--strikes", p_strikes, "strike grid start:stop:count");
    price->add_option("--tau", p_tau, "maturity in years");
    price->add_option("--rate", p_rate, "interest rate");
    price->add_option("--div", p_div, "dividend yield");
    price->add_option("--out", p_out, "output TSV")->required();

    // calibrate
    auto* calib = app.add_subcommand("calibrate", "Per-day model fits on an option chain");
    std::string c_chain, c_model = "all", c_side = "all", c_out, c_kind = "caputo";
    int c_restarts = 8;
    std::uint64_t c_seed = 42;
    calib->add_option("--chain", c_chain, "chain CSV")->required();
    calib->add_option("--model", c_model, "all, bs, levy, df or df-rf")
        ->check(CLI::IsMember({"all", "bs", "levy", "df", "df-rf"}));
    calib->add_option("--side", c_side, "all, calls or puts")->check(CLI::IsMember({"all", "calls", "puts"}));
    calib->add_option("--kind", c_kind, "DF kind for --model all")->check(CLI::IsMember({"caputo", "rf"}));
    calib->add_option("--restarts", c_restarts, "low-discrepancy restarts");
    calib->add_option("--seed", c_seed, "restart seed");
    calib->add_option("--out", c_out, "output directory")->required();

    // hedge
    auto* hedge = app.add_subcommand("hedge", "Variance-optimal hedge ratio ladder");
    ModelOpts h_model;
    h_model.add(hedge);
    std::string h_modelname = "df", h_side = "call", h_strikes = "800:1200:9", h_out;
    double h_spot = 1000.0, h_tau = 0.25, h_rate = 0.0, h_div = 0.0, h_bsvol = -1.0;
    hedge->add_option("--model", h_modelname, "bs or df")->check(CLI::IsMember({"bs", "df"}));
    hedge->add_option("--side", h_side, "call or put")->check(CLI::IsMember({"call", "put"}));
    hedge->add_option("--spot", h_spot, "spot price");
    hedge->add_option("--strikes", h_strikes, "strike grid start:stop:count");
    hedge->add_option("--tau", h_tau, "maturity in years");
    hedge->add_option("--rate", h_rate, "interest rate");
    hedge->add_option("--div", h_div, "dividend yield");
    hedge->add_option("--bs-vol", h_bsvol, "lognormal vol for the delta column (default sigma*sqrt(2))");
    hedge->add_option("--out", h_out, "output TSV")->required();

    // kernels
    auto* kernels = app.add_subcommand("kernels", "Smearing kernels over pseudo-time l");
    double k_gamma = 0.8, k_tau = 1.0;
    std::string k_grid = "0.01:5:500", k_out;
    kernels->add_option("--gamma", k_gamma, "time-fractional order in (0, 1)");
    kernels->add_option("--tau", k_tau, "time");
    kernels->add_option("--grid", k_grid, "l grid start:stop:count");
    kernels->add_option("--out", k_out, "output TSV")->required();

    // synth
    auto* synth = app.add_subcommand("synth", "Noisy synthetic option chain from a known model");
    ModelOpts s_model;
    s_model.alpha = 1.6;
    s_model.gamma = 1.05;
    s_model.sigma = 0.15;
    s_model.add(synth);
    int s_days = 5, s_quotes = 15;
    double s_noise = 0.01, s_spot = 1000.0;
    std::uint64_t s_seed = 7;
    std::string s_out;
    synth->add_option("--days", s_days, "trading days");
    synth->add_option("--noise", s_noise, "multiplicative price noise");
    synth->add_option("--seed", s_seed, "noise seed");
    synth->add_option("--spot", s_spot, "initial spot");
    synth->add_option("--quotes", s_quotes, "OTM quotes per maturity");
    synth->add_option("--out", s_out, "output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return emit_error("invalid_argument", e.what());
    }

    auto manifest_for = [&](const std::string& out) {
        if (!manifest_override.empty()) return manifest_override;
        return out + ".manifest.json";
    };

    try {
        RunManifest m;
        if (*green) {
            m.command = "green";
            g_model.record(m);
            m.config.push_back({"tau", num(g_tau)});
            m.config.push_back({"grid", g_grid});
            m.config.push_back({"method", g_method});
            const DiffusionSpec spec = g_model.spec();
            if (!(g_tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");
            const auto xs = parse_grid(g_grid);
            std::vector<double> gs;
            if (g_method == "fourier") {
                gs = green_fourier_batch(spec, g_tau, xs);
            } else {
                for (double x : xs)
                    gs.push_back(g_method == "kernel" ? green_via_kernel(spec, x, g_tau)
                                 : x == 0.0           ? green_at_origin(spec, g_tau)
                                                      : green_mellin_barnes(spec, ContourConfig{}, x, g_tau));
            }
            auto out = open_out(g_out);
            out << "xi\tg\tlog10_g\n";
            for (std::size_t i = 0; i < xs.size(); ++i)
                out << num(xs[i]) << '\t' << num(gs[i]) << '\t' << (gs[i] > 0.0 ? num(std::log10(gs[i])) : "-inf")
                    << '\n';
            out.close();
            finish(m, {g_out}, manifest_for(g_out));
        } else if (*price) {
            m.command = "price";
            p_model.record(m);
            m.config.push_back({"model", p_modelname});
            m.config.push_back({"side", p_side});
            m.config.push_back({"spot", num(p_spot)});
            m.config.push_back({"strikes", p_strikes.empty() ? num(p_strike) : p_strikes});
            m.config.push_back({"tau", num(p_tau)});
            m.config.push_back({"rate", num(p_rate)});
            m.config.push_back({"div", num(p_div)});
            const auto strikes = p_strikes.empty() ? std::vector<double>{p_strike} : parse_grid(p_strikes);
            const OptionSide side = p_side == "call" ? OptionSide::Call : OptionSide::Put;
            auto out = open_out(p_out);
            out << "strike\ttau\tprice\tquadrature_error\tdrift_mu\tmartingale_residual\n";
            if (p_modelname == "bs") {
                for (double K : strikes) {
                    const auto r = bs_price(p_spot, K, p_tau, p_rate, p_div, p_model.sigma, side);
                    out << num(K) << '\t' << num(p_tau) << '\t' << num(r.value) << "\t0\t" << num(r.drift_mu)
                        << "\t0\n";
                }
            } else {
                DiffusionSpec spec = p_model.spec();
                if (p_modelname == "levy") spec.gamma = 1.0;
                DfPricer pricer(spec, p_spot, p_rate, p_div, {p_tau});
                for (double K : strikes) {
                    const auto r = pricer.price(side, K, p_tau);
                    out << num(K) << '\t' << num(p_tau) << '\t' << num(r.value) << '\t' << num(r.quadrature_error)
                        << '\t' << num(r.drift_mu) << '\t' << num(r.martingale_residual) << '\n';
                }
            }
            out.close();
            finish(m, {p_out}, manifest_for(p_out));
        } else if (*calib) {
            m.command = "calibrate";
            m.seed = c_seed;
            m.config.push_back({"chain", fs::path(c_chain).filename().string()});
            m.config.push_back({"model", c_model});
            m.config.push_back({"side", c_side});
            m.config.push_back({"restarts", std::to_string(c_restarts)});
            CalibrationConfig cfg;
            cfg.restarts = c_restarts;
            cfg.seed = c_seed;
            cfg.side_filter = parse_side_filter(c_side);
            cfg.validate();
            const auto days = load_chain(c_chain);
            fs::create_directories(c_out);
            const std::string fits_path = (fs::path(c_out) / "fits.jsonl").string();
            std::vector<std::string> outputs{fits_path};
            std::vector<FitResult> fits;
            if (c_model == "all") {
                m.config.push_back({"kind", c_kind});
                const auto series = fit_series(days, cfg, parse_kind(c_kind));
                const std::string days_path = (fs::path(c_out) / "days.tsv").string();
                const std::string sum_path = (fs::path(c_out) / "summary.tsv").string();
                auto dout = open_out(days_path);
                dout << "date\tstatus\tbs_sigma\tbs_ae\tls_alpha\tls_sigma\tls_ae\tdf_alpha\tdf_gamma\tdf_sigma\tdf_ae\trho"
                        "\tomega\n";
                for (const auto& d : series.days) {
                    fits.push_back(d.bs);
                    fits.push_back(d.levy);
                    fits.push_back(d.df);
                    dout << d.date << '\t' << d.status << '\t' << num(d.bs.params.sigma) << '\t' << num(d.bs.ae) << '\t'
                         << num(d.levy.params.alpha) << '\t' << num(d.levy.params.sigma) << '\t' << num(d.levy.ae)
                         << '\t' << num(d.df.params.alpha) << '\t' << num(d.df.params.gamma) << '\t'
                         << num(d.df.params.sigma) << '\t' << num(d.df.ae) << '\t' << num(d.rho) << '\t'
                         << num(d.omega) << '\n';
                }
                dout.close();
                auto sout = open_out(sum_path);
                sout << "model\talpha_mean\talpha_std\tgamma_mean\tgamma_std\tsigma_mean\tsigma_std\tae_mean\tae_std\n";
                for (const auto& r : series.summary.rows)
                    sout << r.model.name() << '\t' << num(r.alpha.mean) << '\t' << num(r.alpha.std) << '\t'
                         << num(r.gamma.mean) << '\t' << num(r.gamma.std) << '\t' << num(r.sigma.mean) << '\t'
                         << num(r.sigma.std) << '\t' << num(r.ae.mean) << '\t' << num(r.ae.std) << '\n';
                sout << "rho\t" << num(series.summary.rho.mean) << '\t' << num(series.summary.rho.std) << '\n';
                sout << "omega\t" << num(series.summary.omega.mean) << '\t' << num(series.summary.omega.std) << '\n';
                sout << "days\t" << series.summary.days << "\tfailed\t" << series.summary.failed << '\n';
                sout.close();
                outputs.push_back(days_path);
                outputs.push_back(sum_path);
            } else {
                const ModelKind model = ModelKind::parse(c_model);
                for (const auto& d : days) {
                    try {
                        fits.push_back(fit_day(d, model, cfg));
                    } catch (const Error& e) {
                        FitResult f;
                        f.date = d.date;
                        f.model = model;
                        f.ae = std::numeric_limits<double>::infinity();
                        f.status = error_code_name(e.code());
                        fits.push_back(f);
                    }
                }
            }
            {
                auto fout = open_out(fits_path);
                write_fit_results(fout, fits);
            }
            finish(m, outputs, manifest_override.empty() ? (fs::path(c_out) / "manifest.json").string()
                                                         : manifest_override);
        } else if (*hedge) {
            m.command = "hedge";
            h_model.record(m);
            m.config.push_back({"model", h_modelname});
            m.config.push_back({"side", h_side});
            m.config.push_back({"spot", num(h_spot)});
            m.config.push_back({"strikes", h_strikes});
            m.config.push_back({"tau", num(h_tau)});
            m.config.push_back({"rate", num(h_rate)});
            m.config.push_back({"div", num(h_div)});
            HedgeInput inp;
            if (h_modelname == "df") inp.spec = h_model.spec();
            else inp.bs_vol = h_model.sigma;
            const double dvol = h_bsvol > 0.0 ? h_bsvol
                                : h_modelname == "bs" ? h_model.sigma
                                                      : h_model.sigma * std::sqrt(2.0);
            m.config.push_back({"bs_vol", num(dvol)});
            inp.S0 = h_spot;
            inp.tau = h_tau;
            inp.r = h_rate;
            inp.q = h_div;
            inp.side = h_side == "call" ? OptionSide::Call : OptionSide::Put;
            auto out = open_out(h_out);
            out << "strike\tphi_star\tbs_delta\trisk_at_phi_star\tunhedged_risk\tphi_uncentred\n";
            for (double K : parse_grid(h_strikes)) {
                inp.K = K;
                const HedgeMoments hm = hedge_moments(inp);
                const double phi = optimal_phi(hm, inp.S0);
                double delta = bs_delta(h_spot, K, h_tau, h_rate, h_div, dvol);
                if (inp.side == OptionSide::Put) delta -= std::exp(-h_div * h_tau);
                out << num(K) << '\t' << num(phi) << '\t' << num(delta) << '\t' << num(portfolio_risk(phi, hm, inp.S0))
                    << '\t' << num(portfolio_risk(0.0, hm, inp.S0)) << '\t' << num(optimal_phi_literal(inp)) << '\n';
            }
            out.close();
            finish(m, {h_out}, manifest_for(h_out));
        } else if (*kernels) {
            m.command = "kernels";
            m.config.push_back({"gamma", num(k_gamma)});
            m.config.push_back({"tau", num(k_tau)});
            m.config.push_back({"grid", k_grid});
            auto out = open_out(k_out);
            out << "l\trf\tcaputo\n";
            for (double l : parse_grid(k_grid))
                out << num(l) << '\t' << num(smearing_kernel_rf(k_gamma, k_tau, l)) << '\t'
                    << num(smearing_kernel_caputo(k_gamma, k_tau, l)) << '\n';
            out.close();
            finish(m, {k_out}, manifest_for(k_out));
        } else if (*synth) {
            m.command = "synth";
            m.seed = s_seed;
            s_model.record(m);
            m.config.push_back({"days", std::to_string(s_days)});
            m.config.push_back({"noise", num(s_noise)});
            m.config.push_back({"spot", num(s_spot)});
            m.config.push_back({"quotes", std::to_string(s_quotes)});
            SynthConfig sc;
            const DiffusionSpec spec = s_model.spec();
            sc.model = ModelKind::df(spec.kind);
            sc.params = {spec.alpha, spec.gamma, spec.sigma};
            sc.days = s_days;
            sc.noise = s_noise;
            sc.seed = s_seed;
            sc.spot = s_spot;
            sc.quotes_per_maturity = s_quotes;
            const auto chain = synthesize_chain(sc);
            if (fs::path(s_out).has_parent_path()) fs::create_directories(fs::path(s_out).parent_path());
            write_chain(s_out, chain);
            finish(m, {s_out}, manifest_for(s_out));
        }
    } catch (const Error& e) {
        return emit_error(error_code_name(e.code()), e.what());
    } catch (const std::exception& e) {
        return emit_error("internal", e.what());
    }
    return 0;
}
