#include "fracprice/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

namespace fracprice::quad {

const Kronrod15& Kronrod15::get() {
    static const Kronrod15 rule = [] {
        using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
        const auto& xa = GK::abscissa();
        const auto& wka = GK::weights();
        using G7 = boost::math::quadrature::gauss<double, 7>;
        const auto& xga = G7::abscissa();
        const auto& wga = G7::weights();
        auto gauss_weight = [&](double x) {
            for (std::size_t j = 0; j < xga.size(); ++j)
                if (std::abs(xga[j] - x) < 1e-14) return wga[j];
            return 0.0;
        };
        Kronrod15 r;
        std::size_t m = 0;
        for (std::size_t i = xa.size(); i-- > 1;) {
            r.x[m] = -xa[i];
            r.wk[m] = wka[i];
            r.wg[m] = gauss_weight(xa[i]);
            ++m;
        }
        r.x[m] = 0.0;
        r.wk[m] = wka[0];
        r.wg[m] = gauss_weight(0.0);
        ++m;
        for (std::size_t i = 1; i < xa.size(); ++i) {
            r.x[m] = xa[i];
            r.wk[m] = wka[i];
            r.wg[m] = gauss_weight(xa[i]);
            ++m;
        }
        return r;
    }();
    return rule;
}

const GaussLegendre& GaussLegendre::get(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, std::unique_ptr<GaussLegendre>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return *it->second;

    auto rule = std::make_unique<GaussLegendre>();
    const int ni = static_cast<int>(n);
    auto zeros = boost::math::legendre_p_zeros<double>(ni);
    auto weight = [ni](double z) {
        double dp = boost::math::legendre_p_prime<double>(ni, z);
        return 2.0 / ((1.0 - z * z) * dp * dp);
    };
    for (std::size_t i = zeros.size(); i-- > 0;) {
        if (zeros[i] == 0.0) continue;
        rule->x.push_back(-zeros[i]);
        rule->w.push_back(weight(zeros[i]));
    }
    for (double z : zeros) {
        rule->x.push_back(z);
        rule->w.push_back(weight(z));
    }
    auto& ref = *rule;
    cache.emplace(n, std::move(rule));
    return ref;
}

}  // namespace fracprice::quad
