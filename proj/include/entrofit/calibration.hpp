// Levenberg-Marquardt calibration of the characteristic-function models to
// implied-volatility quotes, and the two goodness-of-fit measures (squared
// vol errors, relative entropy of the market-matching MRED vs the prior).
#ifndef ENTROFIT_CALIBRATION_HPP
#define ENTROFIT_CALIBRATION_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "entrofit/black_scholes.hpp"
#include "entrofit/cf_models.hpp"
#include "entrofit/mred_newton.hpp"
#include "entrofit/option_chain.hpp"

namespace entrofit {

struct Quote {
    double strike = 0.0;
    double vol = 0.0;
    double weight = 1.0;

    void validate() const {
        if (!(strike > 0.0)) throw std::invalid_argument("Quote: strike must be > 0");
        if (!(vol > 0.0 && vol < 5.0)) throw std::invalid_argument("Quote: vol outside (0, 5)");
        if (!(weight >= 0.0)) throw std::invalid_argument("Quote: weight must be >= 0");
    }
};

// Build a vol quote from an observed discounted call price.
inline Quote quote_from_price(double price, const MarketEnv& env, double strike,
                              double weight = 1.0) {
    const double undisc = price * std::exp(env.rate * env.maturity);
    Quote q{strike, implied_vol(undisc, env.forward(), strike, env.maturity), weight};
    q.validate();
    return q;
}

struct FitReport {
    ModelParams params;
    double sse = 0.0;               // sum of squared vol errors
    double relative_entropy = 0.0;  // H* of the market-matching MRED vs this prior
    int iterations = 0;
    bool converged = false;
};

// Model implied vol at one strike (prices through the Pi integrals, then
// inverts Black on the forward).
inline double model_implied_vol(const ModelParams& model, const MarketEnv& env, double strike,
                                const InversionSpec& spec = {}) {
    const double undisc =
        price_call_cf(model, env, strike, spec) * std::exp(env.rate * env.maturity);
    return implied_vol(undisc, env.forward(), strike, env.maturity);
}

namespace detail {

// Gaussian elimination with partial pivoting; systems here are at most 5x5.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> A,
                                       std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(A[i][k]) > std::abs(A[piv][k])) piv = i;
        if (std::abs(A[piv][k]) < 1e-300)
            throw std::runtime_error("solve_dense: singular normal equations");
        std::swap(A[piv], A[k]);
        std::swap(b[piv], b[k]);
        for (int i = k + 1; i < n; ++i) {
            const double m = A[i][k] / A[k][k];
            for (int j = k; j < n; ++j) A[i][j] -= m * A[k][j];
            b[i] -= m * b[k];
        }
    }
    std::vector<double> x(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
        x[i] = s / A[i][i];
    }
    return x;
}

// Unconstrained internal coordinates: log for positive parameters, tanh for
// the correlation. The VG moment condition is kept valid by clamping theta
// back into the admissible region before pricing (clamp-with-retry).
struct ParamMap {
    enum class Kind { Bs, Heston, Sz, Vg } kind;

    static ParamMap for_model(const ModelParams& m) {
        switch (m.index()) {
            case 0: return {Kind::Bs};
            case 1: return {Kind::Heston};
            case 2: return {Kind::Sz};
            default: return {Kind::Vg};
        }
    }
    int dim() const {
        switch (kind) {
            case Kind::Bs: return 1;
            case Kind::Heston: return 5;
            case Kind::Sz: return 5;
            default: return 3;
        }
    }
    std::vector<double> to_internal(const ModelParams& m) const {
        switch (kind) {
            case Kind::Bs: {
                const auto& p = std::get<BsParams>(m);
                return {std::log(p.sigma)};
            }
            case Kind::Heston: {
                const auto& p = std::get<HestonParams>(m);
                return {std::log(p.kappa), std::log(p.theta), std::atanh(p.rho * 0.999),
                        std::log(p.sigma), std::log(p.v0)};
            }
            case Kind::Sz: {
                const auto& p = std::get<SzParams>(m);
                return {std::log(p.kappa), std::log(p.theta), std::atanh(p.rho * 0.999),
                        std::log(p.sigma), std::log(p.v0)};
            }
            default: {
                const auto& p = std::get<VgParams>(m);
                return {p.theta, std::log(p.sigma), std::log(p.nu)};
            }
        }
    }
    ModelParams to_model(const std::vector<double>& x) const {
        switch (kind) {
            case Kind::Bs: return BsParams{std::exp(x[0])};
            case Kind::Heston:
                return HestonParams{std::exp(x[0]), std::exp(x[1]), std::tanh(x[2]),
                                    std::exp(x[3]), std::exp(x[4]), 0.0};
            case Kind::Sz:
                return SzParams{std::exp(x[0]), std::exp(x[1]), std::tanh(x[2]),
                                std::exp(x[3]), std::exp(x[4])};
            default: {
                VgParams p{x[0], std::exp(x[1]), std::exp(x[2])};
                const double cap = (1.0 - 0.5 * p.sigma * p.sigma * p.nu) / p.nu - 1e-6;
                if (p.theta > cap) p.theta = cap;  // keep omega defined
                return p;
            }
        }
    }
};

}  // namespace detail

struct CalibrationOptions {
    int max_iterations = 500;
    double lm_lambda0 = 1e-3;
    double lm_nu = 2.0;  // multiplicative damping schedule
    double fd_step = 1e-6;
    double sse_tol = 1e-14;
};

// One LM run from a given start; returns {params, sse, iterations, converged}.
inline FitReport levenberg_marquardt(const ModelParams& start, const MarketEnv& env,
                                     const std::vector<Quote>& quotes,
                                     const CalibrationOptions& opts = {}) {
    const detail::ParamMap map = detail::ParamMap::for_model(start);
    const int dim = map.dim();
    const int m = static_cast<int>(quotes.size());
    if (m < dim)
        throw std::invalid_argument("levenberg_marquardt: need at least as many quotes as parameters");

    auto residuals = [&](const std::vector<double>& x, std::vector<double>& r) -> bool {
        const ModelParams cand = map.to_model(x);
        try {
            validate(cand);
            for (int i = 0; i < m; ++i) {
                const double vol = model_implied_vol(cand, env, quotes[i].strike);
                r[i] = std::sqrt(quotes[i].weight) * (quotes[i].vol - vol);
            }
        } catch (const std::exception&) {
            return false;
        }
        return true;
    };

    std::vector<double> x = map.to_internal(start);
    std::vector<double> r(m), r_try(m);
    if (!residuals(x, r))
        throw std::invalid_argument("levenberg_marquardt: start point does not price");
    auto sse_of = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double e : v) s += e * e;
        return s;
    };
    double sse = sse_of(r);
    double lambda = opts.lm_lambda0;
    int it = 0;
    bool converged = false;
    for (; it < opts.max_iterations; ++it) {
        // forward-difference Jacobian
        std::vector<std::vector<double>> J(m, std::vector<double>(dim));
        for (int j = 0; j < dim; ++j) {
            std::vector<double> xh = x;
            const double h = opts.fd_step * (1.0 + std::abs(x[j]));
            xh[j] += h;
            std::vector<double> rh(m);
            if (!residuals(xh, rh)) {
                xh[j] = x[j] - h;
                if (!residuals(xh, rh)) throw std::runtime_error("levenberg_marquardt: Jacobian failed");
                for (int i = 0; i < m; ++i) J[i][j] = (r[i] - rh[i]) / h;
            } else {
                for (int i = 0; i < m; ++i) J[i][j] = (rh[i] - r[i]) / h;
            }
        }
        std::vector<std::vector<double>> JtJ(dim, std::vector<double>(dim, 0.0));
        std::vector<double> Jtr(dim, 0.0);
        for (int i = 0; i < m; ++i)
            for (int a = 0; a < dim; ++a) {
                Jtr[a] += J[i][a] * r[i];
                for (int b = a; b < dim; ++b) JtJ[a][b] += J[i][a] * J[i][b];
            }
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < a; ++b) JtJ[a][b] = JtJ[b][a];

        bool accepted = false;
        for (int attempt = 0; attempt < 60; ++attempt) {
            std::vector<std::vector<double>> A = JtJ;
            for (int a = 0; a < dim; ++a) A[a][a] += lambda * std::max(JtJ[a][a], 1e-12);
            std::vector<double> delta;
            try {
                delta = detail::solve_dense(A, Jtr);
            } catch (const std::runtime_error&) {
                lambda *= 10.0;
                continue;
            }
            std::vector<double> x_try = x;
            for (int a = 0; a < dim; ++a) x_try[a] += delta[a];
            if (residuals(x_try, r_try)) {
                const double sse_try = sse_of(r_try);
                if (sse_try < sse) {
                    x = std::move(x_try);
                    r = r_try;
                    const double drop = sse - sse_try;
                    sse = sse_try;
                    lambda = std::max(lambda / opts.lm_nu, 1e-12);
                    accepted = true;
                    if (drop < opts.sse_tol) converged = true;
                    break;
                }
            }
            lambda *= opts.lm_nu;
            if (lambda > 1e12) break;
        }
        if (!accepted || converged || sse < 1e-16) {
            converged = converged || accepted || sse < 1e-16;
            break;
        }
    }
    FitReport rep;
    rep.params = map.to_model(x);
    rep.sse = sse;
    rep.iterations = it;
    rep.converged = converged;
    return rep;
}

namespace detail {

inline std::vector<ModelParams> default_starts(const ModelParams& kind, double atm_vol) {
    const double v = atm_vol * atm_vol;
    switch (kind.index()) {
        case 0: return {BsParams{atm_vol}, BsParams{atm_vol * 1.5}, BsParams{atm_vol * 0.5}};
        case 1:
            return {HestonParams{1.0, v, -0.5, 0.5, v, 0.0},
                    HestonParams{2.0, 1.5 * v, -0.7, 0.8, 0.7 * v, 0.0},
                    HestonParams{0.5, v, -0.2, 0.3, v, 0.0}};
        case 2:
            return {SzParams{1.0, atm_vol, -0.5, 0.3, atm_vol},
                    SzParams{2.0, 1.2 * atm_vol, -0.7, 0.5, 0.8 * atm_vol},
                    SzParams{0.5, atm_vol, -0.2, 0.2, atm_vol}};
        default:
            return {VgParams{-0.1, atm_vol, 0.3}, VgParams{-0.3, atm_vol * 0.8, 0.5},
                    VgParams{0.0, atm_vol, 0.15}};
    }
}

}  // namespace detail

// Fixed three-start heuristic around the ATM vol level; best run wins.
inline FitReport calibrate(const ModelParams& kind, const MarketEnv& env,
                           const std::vector<Quote>& quotes,
                           const CalibrationOptions& opts = {}) {
    for (const Quote& q : quotes) q.validate();
    double atm_vol = quotes.front().vol;
    double best_dist = std::abs(std::log(quotes.front().strike / env.forward()));
    for (const Quote& q : quotes) {
        const double d = std::abs(std::log(q.strike / env.forward()));
        if (d < best_dist) {
            best_dist = d;
            atm_vol = q.vol;
        }
    }
    FitReport best;
    bool have = false;
    for (const ModelParams& start : detail::default_starts(kind, atm_vol)) {
        try {
            FitReport rep = levenberg_marquardt(start, env, quotes, opts);
            if (!have || rep.sse < best.sse) {
                best = rep;
                have = true;
            }
        } catch (const std::exception&) {
            // a start that cannot price is simply skipped
        }
    }
    if (!have) throw std::runtime_error("calibrate: all starts failed");
    return best;
}

struct FitQuality {
    double sse = 0.0;
    double relative_entropy = 0.0;
};

// Table-3 style pair: squared vol errors of the model, and the relative
// entropy of the chain-matching MRED against the model prior.
inline FitQuality fit_quality(const ModelParams& model, const MarketEnv& env,
                              const OptionChain& chain, const std::vector<Quote>& quotes) {
    FitQuality out;
    for (const Quote& q : quotes) {
        const double vol = model_implied_vol(model, env, q.strike);
        out.sse += q.weight * (q.vol - vol) * (q.vol - vol);
    }
    PriorPtr prior = as_prior(model, env);
    MredFit fit = minimize_relative_entropy(prior, chain);
    out.relative_entropy = fit.objective;
    return out;
}

}  // namespace entrofit

#endif  // ENTROFIT_CALIBRATION_HPP
