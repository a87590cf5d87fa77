#ifndef ENTROFIT_BLACK_SCHOLES_HPP
#define ENTROFIT_BLACK_SCHOLES_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "entrofit/special_functions.hpp"

namespace entrofit {

// Undiscounted Black call on the forward: E[(S-K)+] with S lognormal,
// E[S] = F, total volatility sigma*sqrt(T).
inline double black_call(double forward, double strike, double sigma, double maturity) {
    if (strike <= 0.0) return forward;
    const double s = sigma * std::sqrt(maturity);
    if (s <= 0.0) return std::max(forward - strike, 0.0);
    const double d1 = (std::log(forward / strike) + 0.5 * s * s) / s;
    return forward * norm_cdf(d1) - strike * norm_cdf(d1 - s);
}

inline double black_digital(double forward, double strike, double sigma, double maturity) {
    if (strike <= 0.0) return 1.0;
    const double s = sigma * std::sqrt(maturity);
    const double d2 = (std::log(forward / strike) - 0.5 * s * s) / s;
    return norm_cdf(d2);
}

inline double black_vega(double forward, double strike, double sigma, double maturity) {
    const double s = sigma * std::sqrt(maturity);
    const double d1 = (std::log(forward / strike) + 0.5 * s * s) / s;
    return forward * norm_pdf(d1) * std::sqrt(maturity);
}

// Implied volatility of an undiscounted call price: safeguarded Newton on
// vega with a bisection bracket fallback.
inline double implied_vol(double price, double forward, double strike, double maturity) {
    const double intrinsic = std::max(forward - strike, 0.0);
    if (!(price > intrinsic) || !(price < forward))
        throw std::domain_error("implied_vol: price outside the open no-arbitrage bounds");
    double lo = 1e-8, hi = 5.0;
    while (black_call(forward, strike, hi, maturity) < price) {
        hi *= 2.0;
        if (hi > 100.0) throw std::domain_error("implied_vol: price above attainable range");
    }
    double sigma = 0.25;
    for (int it = 0; it < 100; ++it) {
        const double err = black_call(forward, strike, sigma, maturity) - price;
        if (std::abs(err) < 1e-10 * std::max(1.0, price)) return sigma;
        (err < 0.0 ? lo : hi) = sigma;
        const double v = black_vega(forward, strike, sigma, maturity);
        double next = sigma - err / v;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        sigma = next;
    }
    return sigma;
}

}  // namespace entrofit

#endif  // ENTROFIT_BLACK_SCHOLES_HPP
