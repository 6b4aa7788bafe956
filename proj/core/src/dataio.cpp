#include "fracprice/dataio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <regex>
#include <sstream>

#include "json.hpp"

#include "fracprice/error.hpp"

namespace fracprice {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void row_error(const std::string& src, int line, const std::string& what) {
    throw Error(ErrorCode::SchemaMismatch, src + ":" + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& field, const std::string& name, const std::string& src, int line) {
    const std::string t = trim(field);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
        row_error(src, line, "field " + name + " is not a number: '" + t + "'");
    return v;
}

std::string fmt(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

std::vector<MarketSnapshot> parse_chain(std::istream& in, const std::string& src) {
    static const std::regex iso_date(R"(\d{4}-(0[1-9]|1[0-2])-(0[1-9]|[12]\d|3[01]))");
    std::string line;
    int lineno = 0;
    bool header = false;
    std::vector<MarketSnapshot> days;
    std::map<std::string, std::size_t> index;
    std::map<std::string, int> first_line;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        if (!header) {
            if (trim(line) != kChainHeader)
                throw Error(ErrorCode::SchemaMismatch,
                            src + ":" + std::to_string(lineno) + ": header must be '" + kChainHeader + "'");
            header = true;
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 8)
            row_error(src, lineno, "expected 8 fields, found " + std::to_string(f.size()));
        const std::string date = trim(f[0]);
        if (!std::regex_match(date, iso_date)) row_error(src, lineno, "date is not ISO-8601 (YYYY-MM-DD): '" + date + "'");
        const std::string side = trim(f[1]);
        if (side != "C" && side != "P") row_error(src, lineno, "side must be C or P, found '" + side + "'");
        OptionQuote q;
        q.side = side == "C" ? OptionSide::Call : OptionSide::Put;
        q.strike = parse_number(f[2], "strike", src, lineno);
        q.maturity = parse_number(f[3], "maturity_years", src, lineno);
        q.mid = parse_number(f[4], "mid_price", src, lineno);
        const double spot = parse_number(f[5], "spot", src, lineno);
        const double rate = parse_number(f[6], "rate", src, lineno);
        const double div = parse_number(f[7], "div_yield", src, lineno);
        if (!(q.strike > 0.0)) row_error(src, lineno, "strike must be positive");
        if (!(q.maturity > 0.0)) row_error(src, lineno, "maturity_years must be positive");
        if (!(q.mid >= 0.0)) row_error(src, lineno, "mid_price must be non-negative");
        if (!(spot > 0.0)) row_error(src, lineno, "spot must be positive");

        auto it = index.find(date);
        if (it == index.end()) {
            MarketSnapshot s;
            s.date = date;
            s.spot = spot;
            s.rate = rate;
            s.div_yield = div;
            index.emplace(date, days.size());
            first_line.emplace(date, lineno);
            days.push_back(std::move(s));
            it = index.find(date);
        }
        MarketSnapshot& s = days[it->second];
        if (s.spot != spot || s.rate != rate || s.div_yield != div)
            throw Error(ErrorCode::InconsistentSpot, src + ":" + std::to_string(lineno) + ": spot/rate/div_yield for " +
                                                         date + " differ from line " +
                                                         std::to_string(first_line[date]));
        s.quotes.push_back(q);
    }
    if (!header) throw Error(ErrorCode::EmptyFile, src + ": file is empty");
    if (days.empty()) throw Error(ErrorCode::EmptyFile, src + ": no data rows");
    return days;
}

std::vector<MarketSnapshot> load_chain(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    return parse_chain(in, path);
}

void write_chain(std::ostream& out, const std::vector<MarketSnapshot>& days) {
    out << kChainHeader << '\n';
    for (const auto& d : days)
        for (const auto& q : d.quotes)
            out << d.date << ',' << (q.side == OptionSide::Call ? 'C' : 'P') << ',' << fmt(q.strike) << ','
                << fmt(q.maturity) << ',' << fmt(q.mid) << ',' << fmt(d.spot) << ',' << fmt(d.rate) << ','
                << fmt(d.div_yield) << '\n';
}

void write_chain(const std::string& path, const std::vector<MarketSnapshot>& days) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    write_chain(out, days);
}

// ===========================================================================
// Fit results
// ===========================================================================

std::string fit_result_to_json(const FitResult& r) {
    nlohmann::ordered_json j;
    j["date"] = r.date;
    j["model"] = r.model.name();
    j["alpha"] = r.params.alpha;
    j["gamma"] = r.params.gamma;
    j["sigma"] = r.params.sigma;
    j["ae"] = std::isfinite(r.ae) ? nlohmann::ordered_json(r.ae) : nlohmann::ordered_json(nullptr);
    j["n_quotes"] = r.n_quotes;
    j["converged"] = r.converged;
    j["evals"] = r.evals;
    j["status"] = r.status;
    return j.dump();
}

FitResult fit_result_from_json(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
        FitResult r;
        r.date = j.at("date").get<std::string>();
        r.model = ModelKind::parse(j.at("model").get<std::string>());
        r.params.alpha = j.at("alpha").get<double>();
        r.params.gamma = j.at("gamma").get<double>();
        r.params.sigma = j.at("sigma").get<double>();
        r.ae = j.at("ae").is_null() ? std::numeric_limits<double>::infinity() : j.at("ae").get<double>();
        r.n_quotes = j.at("n_quotes").get<int>();
        r.converged = j.at("converged").get<bool>();
        r.evals = j.at("evals").get<int>();
        r.status = j.at("status").get<std::string>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaMismatch, std::string("fit result record: ") + e.what());
    }
}

void write_fit_results(std::ostream& out, const std::vector<FitResult>& rows) {
    for (const auto& r : rows) out << fit_result_to_json(r) << '\n';
}

std::vector<FitResult> read_fit_results(std::istream& in) {
    std::vector<FitResult> out;
    std::string line;
    while (std::getline(in, line))
        if (!trim(line).empty()) out.push_back(fit_result_from_json(line));
    return out;
}

// ===========================================================================
// Synthetic chains
// ===========================================================================

std::vector<MarketSnapshot> synthesize_chain(const SynthConfig& cfg) {
    if (cfg.days < 1) throw Error(ErrorCode::InvalidArgument, "days must be at least 1");
    if (!(cfg.noise >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise must be non-negative");
    if (cfg.quotes_per_maturity < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 quotes per maturity");
    if (cfg.maturities.empty()) throw Error(ErrorCode::InvalidArgument, "no maturities");

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<MarketSnapshot> out;
    double spot = cfg.spot;
    for (int d = 0; d < cfg.days; ++d) {
        MarketSnapshot snap;
        char date[16];
        std::snprintf(date, sizeof date, "2008-11-%02d", 3 + d % 28);
        snap.date = date;
        if (d > 0) spot *= std::exp(0.01 * gauss(rng));
        snap.spot = std::round(spot * 100.0) / 100.0;
        snap.rate = cfg.rate;
        snap.div_yield = cfg.div_yield;

        const int n_put = cfg.quotes_per_maturity / 2;
        const int n_call = cfg.quotes_per_maturity - n_put;
        for (double tau : cfg.maturities) {
            const double F = snap.forward(tau);
            const double width = 0.08 + 0.25 * std::sqrt(tau);
            for (int j = n_put; j >= 1; --j)
                snap.quotes.push_back({OptionSide::Put, F * std::exp(-width * j / n_put), tau, 0.0});
            for (int j = 1; j <= n_call; ++j)
                snap.quotes.push_back({OptionSide::Call, F * std::exp(width * j / n_call), tau, 0.0});
        }
        const std::vector<double> px = model_prices(cfg.model, cfg.params, snap, snap.quotes);
        for (std::size_t i = 0; i < px.size(); ++i) snap.quotes[i].mid = px[i] * (1.0 + cfg.noise * gauss(rng));
        for (auto& q : snap.quotes) q.mid = std::max(q.mid, 0.0);
        out.push_back(std::move(snap));
    }
    return out;
}

}  // namespace fracprice
