// Fair variance swap rates off a fitted terminal density: the log-contract
// route and the entropy route (which must agree), plus the closed-form
// exponential-integral evaluation available for Lebesgue-prior fits.
#ifndef ENTROFIT_VARSWAP_HPP
#define ENTROFIT_VARSWAP_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include "entrofit/quadrature.hpp"
#include "entrofit/special_functions.hpp"
#include "entrofit/tilted_density.hpp"

namespace entrofit {

struct DriftSpec {
    // (2/T) E[int_0^T mu dt]; risk-neutral deterministic rates give 2(r-d)
    double scaled_drift = 0.0;

    static DriftSpec risk_neutral(double rate, double dividend) {
        return DriftSpec{2.0 * (rate - dividend)};
    }
};

struct VarSwapResult {
    double sigma2_fair = 0.0;
    double sigma_fair = 0.0;
    double log_contract = 0.0;    // E[ln S(T)]
    double entropy_price = 0.0;   // H(q), price density
    double entropy_log = 0.0;     // H~(q~), log-price density
    // reporting-only metadata: realized variance uses 252 business days
    static constexpr int annualization_days = 252;
};

namespace detail {

// Integrate f(S) q(S) over the density support where f carries a ln S
// factor; below S_cut the substitution S = e^y keeps the panels accurate.
template <class F>
inline double integrate_log_weighted(const TiltedDensity& q, const F& f,
                                     const QuadratureSpec& spec) {
    const double S_cut = 1e-6 * q.chain().forward;
    double total = 0.0;
    q.for_buckets_above(0.0, [&](int i, double lo, double hi) {
        double lo_reg = lo;
        if (lo < S_cut) {
            const double hi_sub = std::min(S_cut, hi);
            const double y_hi = std::log(hi_sub);
            const double y_lo = y_hi - 45.0;
            auto g = [&](double y) {
                const double S = std::exp(y);
                return f(i, S) * S;
            };
            total += q.integrate_bucket(i, y_lo, y_hi, g, spec);
            lo_reg = hi_sub;
            if (!(lo_reg < hi)) return;
        }
        auto g = [&](double S) { return f(i, S); };
        total += q.integrate_bucket(i, lo_reg, hi, g, spec);
    });
    return total;
}

// Ei(z) e^{-z}, safe for large positive z where Ei alone overflows.
inline double ei_times_exp_neg(double z) {
    if (z > 40.0) {
        double term = 1.0, sum = 1.0;
        for (int k = 1; k < 60; ++k) {
            const double next = term * k / z;
            if (next >= term) break;
            term = next;
            sum += term;
            if (term < 1e-16 * sum) break;
        }
        return sum / z;
    }
    return expint_ei(z) * std::exp(-z);
}

// int_a^b ln(S) e^{beta S} dS for |beta| b small: Taylor in beta around the
// uniform-weight case (the Ei primitive is 0/0 there).
inline double log_weight_integral_taylor(double a, double b, double beta) {
    auto I = [](int k, double S) {
        if (S == 0.0) return 0.0;
        const double kp = k + 1.0;
        return std::pow(S, kp) * (kp * std::log(S) - 1.0) / (kp * kp);
    };
    double sum = 0.0, bk = 1.0;
    for (int k = 0; k <= 3; ++k) {
        sum += bk * (I(k, b) - I(k, a));
        bk *= beta / (k + 1.0);
    }
    return sum;
}

}  // namespace detail

// E[ln S(T)] by bucket quadrature (any prior).
inline double log_contract(const TiltedDensity& q,
                           QuadratureSpec spec = TiltedDensity::entropy_spec()) {
    return detail::integrate_log_weighted(
        q,
        [&](int i, double S) {
            return std::log(S) * std::exp(q.log_tilt(i, S)) * q.prior()(S);
        },
        spec);
}

// Closed form for the Lebesgue prior: per-bucket primitive
// (alpha/beta) [e^{beta S} ln S - Ei(beta S)], with the gamma-and-log limit
// at S = 0 and the zero limit at infinity (beta_n < 0).
inline double log_contract_med_closed(const TiltedDensity& q) {
    if (!q.prior().lebesgue)
        throw std::domain_error("log_contract_med_closed: requires the Lebesgue prior");
    const int nb = q.buckets();
    if (!(q.beta(nb - 1) < 0.0))
        throw std::domain_error("log_contract_med_closed: last-bucket beta must be negative");
    double total = 0.0;
    for (int i = 0; i < nb; ++i) {
        const double beta = q.beta(i);
        const double la = q.log_alpha(i);
        const double a = q.chain().K(i);
        const double b = q.chain().K(i + 1);
        if (!std::isinf(b) && std::abs(beta) * b < 1e-4) {
            total += std::exp(la) * detail::log_weight_integral_taylor(a, b, beta);
            continue;
        }
        // alpha/beta * [e^{beta S} ln S - Ei(beta S)] evaluated through
        // e^{la + beta S} (ln S - Ei(beta S) e^{-beta S}) to dodge overflow
        auto F = [&](double S) {
            return std::exp(la + beta * S) * (std::log(S) - detail::ei_times_exp_neg(beta * S));
        };
        double upper, lower;
        upper = std::isinf(b) ? 0.0 : F(b);
        if (a == 0.0) {
            lower = std::exp(la) * (-kEulerGamma - std::log(std::abs(beta)));
        } else {
            lower = F(a);
        }
        total += (upper - lower) / beta;
    }
    return total;
}

// Entropy of the log-price density by change of variables:
// H~(q~) = -int q(S) ln(S q(S)) dS.
inline double log_density_entropy(const TiltedDensity& q,
                                  QuadratureSpec spec = TiltedDensity::entropy_spec()) {
    return detail::integrate_log_weighted(
        q,
        [&](int i, double S) {
            const double p = q.prior()(S);
            if (!(p > 0.0)) return 0.0;
            const double lt = q.log_tilt(i, S);
            const double qv = std::exp(lt) * p;
            return qv > 0.0 ? -qv * (std::log(S) + lt + std::log(p)) : 0.0;
        },
        spec);
}

struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Both routes to the fair rate; they must agree, otherwise some quadrature
// upstream silently failed.
inline VarSwapResult fair_rate(const TiltedDensity& q, const DriftSpec& drift, double spot) {
    const double T = q.chain().maturity;
    VarSwapResult out;
    out.log_contract = log_contract(q);
    out.entropy_price = q.entropy();
    out.entropy_log = log_density_entropy(q);
    const double via_log = drift.scaled_drift + 2.0 / T * (std::log(spot) - out.log_contract);
    const double via_entropy =
        drift.scaled_drift +
        2.0 / T * (std::log(spot) - (out.entropy_price - out.entropy_log));
    if (std::abs(via_log - via_entropy) > 1e-6)
        throw ConsistencyError(
            "fair_rate: log-contract and entropy routes disagree by " +
            std::to_string(std::abs(via_log - via_entropy)));
    out.sigma2_fair = via_log;
    out.sigma_fair = via_log >= 0.0 ? std::sqrt(via_log) : 0.0;
    return out;
}

}  // namespace entrofit

#endif  // ENTROFIT_VARSWAP_HPP
