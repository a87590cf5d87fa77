// Prior density contract. A prior is an evaluator p(S) on [0, inf) together
// with a truncation bound for its effective support and the endpoint beta*
// of the cumulant effective domain on that support.
#ifndef ENTROFIT_PRIOR_HPP
#define ENTROFIT_PRIOR_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>

#include "entrofit/special_functions.hpp"

namespace entrofit {

struct PriorDensity {
    std::function<double(double)> pdf;
    // Upper truncation: the point where the prior cdf exceeds 1 - 1e-12
    // (infinite for the Lebesgue prior, whose tails are handled in closed
    // form).
    double support_hint = std::numeric_limits<double>::infinity();
    // Largest beta with e^{beta S} p(S) integrable over the tail of the
    // effective support. Exactly 0 for Lebesgue; estimated from the log-tail
    // slope over the last decade of support_hint otherwise.
    double moment_bound = 0.0;
    bool lebesgue = false;

    double operator()(double S) const { return lebesgue ? 1.0 : pdf(S); }
};

using PriorPtr = std::shared_ptr<const PriorDensity>;

inline PriorPtr make_lebesgue_prior() {
    auto p = std::make_shared<PriorDensity>();
    p->pdf = [](double) { return 1.0; };
    p->support_hint = std::numeric_limits<double>::infinity();
    p->moment_bound = 0.0;
    p->lebesgue = true;
    return p;
}

// Inverse standard normal cdf by bisection plus Newton polish; only used for
// closed-form support bounds, so simplicity beats speed here.
inline double norm_ppf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("norm_ppf: p in (0,1) required");
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (norm_cdf(mid) < p ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 4; ++i) {
        const double err = norm_cdf(x) - p;
        const double d = norm_pdf(x);
        if (d <= 0.0) break;
        x -= err / d;
    }
    return x;
}

// Estimate beta* from the decay of ln p over the last decade of the support.
inline double moment_bound_from_tail(const std::function<double(double)>& pdf,
                                     double support) {
    const double s2 = support;
    const double s1 = support / 10.0;
    const double p1 = pdf(s1);
    const double p2 = pdf(s2);
    if (!(p1 > 0.0) || !(p2 > 0.0)) return 0.0;
    return (std::log(p1) - std::log(p2)) / (s2 - s1);
}

// Lognormal terminal density with mean `forward` and volatility sigma over
// maturity T (the Black-Scholes prior).
inline PriorPtr make_lognormal_prior(double forward, double sigma, double maturity) {
    if (!(forward > 0.0 && sigma > 0.0 && maturity > 0.0))
        throw std::invalid_argument("make_lognormal_prior: bad parameters");
    const double s = sigma * std::sqrt(maturity);
    const double mu = std::log(forward) - 0.5 * s * s;
    auto p = std::make_shared<PriorDensity>();
    p->pdf = [mu, s](double S) {
        if (!(S > 0.0)) return 0.0;
        const double z = (std::log(S) - mu) / s;
        return norm_pdf(z) / (S * s);
    };
    p->support_hint = std::exp(mu + s * norm_ppf(1.0 - 1e-12));
    p->moment_bound = moment_bound_from_tail(p->pdf, p->support_hint);
    return p;
}

}  // namespace entrofit

#endif  // ENTROFIT_PRIOR_HPP
