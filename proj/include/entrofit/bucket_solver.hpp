// Per-bucket solver: given the bucket probability mass and the conditional
// mean implied by call/digital quotes, find the exponential tilt (alpha_i,
// beta_i) by Newton on the cumulant derivative. The cumulant and its two
// derivatives come from one shared quadrature pass; the Lebesgue prior has
// closed forms and needs no quadrature at all.
#ifndef ENTROFIT_BUCKET_SOLVER_HPP
#define ENTROFIT_BUCKET_SOLVER_HPP

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "entrofit/option_chain.hpp"
#include "entrofit/prior.hpp"
#include "entrofit/quadrature.hpp"

namespace entrofit {

struct BucketTarget {
    int index = 0;
    double K_lo = 0.0;
    double K_hi = 0.0;  // +inf for the last bucket
    double mass = 0.0;  // p_i = D_i - D_{i+1}
    double Kbar = 0.0;  // conditional mean implied by the quotes

    void validate() const {
        if (!(mass > 0.0))
            throw ArbitrageError("bucket " + std::to_string(index) + ": mass must be positive",
                                 index);
        if (!(Kbar > K_lo && Kbar < K_hi))
            throw ArbitrageError("bucket " + std::to_string(index) + ": conditional mean " +
                                     std::to_string(Kbar) + " outside (" + std::to_string(K_lo) +
                                     ", " + std::to_string(K_hi) + ")",
                                 index);
    }
};

struct CumulantEval {
    double c = 0.0;    // ln integral of e^{beta S} p over the bucket
    double cp = 0.0;   // tilted conditional mean
    double cpp = 0.0;  // tilted conditional variance, > 0
};

struct SolverError : std::runtime_error {
    int bucket;
    SolverError(const std::string& what, int b) : std::runtime_error(what), bucket(b) {}
};

// Closed-form cumulants for the Lebesgue prior. The finite-bucket displays
// are 0/0 at beta = 0; below |beta (K_hi - K_lo)| < 1e-4 a short Taylor
// expansion around the uniform case takes over.
inline CumulantEval lebesgue_cumulant(double K_lo, double K_hi, double beta, int index = -1) {
    CumulantEval out;
    if (std::isinf(K_hi)) {
        if (!(beta < 0.0))
            throw SolverError("lebesgue_cumulant: last bucket requires beta < 0, got beta = " +
                                  std::to_string(beta),
                              index);
        out.c = beta * K_lo - std::log(-beta);
        out.cp = K_lo - 1.0 / beta;
        out.cpp = 1.0 / (beta * beta);
        return out;
    }
    const double width = K_hi - K_lo;
    const double mid = 0.5 * (K_lo + K_hi);
    const double z = 0.5 * beta * width;
    if (std::abs(beta * width) < 1e-4) {
        const double z2 = z * z;
        out.c = std::log(width) + beta * mid + z2 / 6.0 - z2 * z2 / 180.0;
        out.cp = mid + 0.5 * width * (z / 3.0 - z * z2 / 45.0 + 2.0 * z * z2 * z2 / 945.0);
        out.cpp = 0.25 * width * width * (1.0 / 3.0 - z2 / 15.0 + 2.0 * z2 * z2 / 189.0);
        return out;
    }
    const double az = std::abs(z);
    // ln(sinh z / z), even in z, written to avoid overflow
    const double lsz = az + std::log(-std::expm1(-2.0 * az) / (2.0 * az));
    out.c = std::log(width) + beta * mid + lsz;
    const double e2 = std::exp(-2.0 * az);
    const double coth = (1.0 + e2) / (1.0 - e2) * (z > 0 ? 1.0 : -1.0);
    out.cp = mid + 0.5 * width * (coth - 1.0 / z);
    const double inv_sinh = 2.0 * std::exp(-az) / (1.0 - e2);  // 1/sinh|z|
    out.cpp = 0.25 * width * width * (1.0 / (z * z) - inv_sinh * inv_sinh);
    return out;
}

// Cumulant triple by quadrature against the prior, shifted by K_ref so the
// exponent stays non-positive over the bucket (no overflow for large |beta|).
inline CumulantEval cumulant(const PriorDensity& prior, double K_lo, double K_hi, double beta,
                             int index = -1) {
    if (prior.lebesgue) return lebesgue_cumulant(K_lo, K_hi, beta, index);
    const bool last = std::isinf(K_hi);
    if (last && !(beta < prior.moment_bound))
        throw SolverError("cumulant: beta = " + std::to_string(beta) +
                              " at or beyond the effective-domain endpoint beta* = " +
                              std::to_string(prior.moment_bound),
                          index);
    const double hi = std::min(K_hi, prior.support_hint);
    if (!(K_lo < hi))
        throw SolverError("cumulant: bucket [" + std::to_string(K_lo) +
                              ", inf) beyond the prior support", index);
    const double K_ref = beta > 0.0 ? hi : K_lo;
    QuadratureSpec spec;
    spec.rel_tol = 3e-12;
    spec.abs_tol = 1e-300;
    spec.max_subdivisions = 4000;
    auto f = [&](double S) -> std::array<double, 3> {
        const double w = std::exp(beta * (S - K_ref)) * prior.pdf(S);
        const double d = S - K_ref;
        return {w, d * w, d * d * w};
    };
    bool ok = true;
    std::array<double, 3> I = integrate_adaptive_vec<3>(f, K_lo, hi, spec, &ok);
    if (!ok || !(I[0] > 0.0))
        throw SolverError("cumulant: quadrature failed on bucket [" + std::to_string(K_lo) +
                              ", " + std::to_string(hi) + ") at beta = " + std::to_string(beta),
                          index);
    CumulantEval out;
    out.c = beta * K_ref + std::log(I[0]);
    const double m1 = I[1] / I[0];
    out.cp = K_ref + m1;
    out.cpp = I[2] / I[0] - m1 * m1;
    assert(out.cpp > 0.0 && "cumulant must be strictly convex");
    return out;
}

namespace detail {

inline double beta_ceiling(const PriorDensity& prior, const BucketTarget& t) {
    if (std::isinf(t.K_hi)) return prior.lebesgue ? 0.0 : prior.moment_bound;
    return std::numeric_limits<double>::infinity();
}

}  // namespace detail

// Solve c'(beta) = Kbar. Newton with c'' as the derivative, safeguarded by a
// geometrically expanded bracket (c' is strictly increasing, so once the
// bracket straddles the target the root is pinned).
inline double solve_beta(const PriorDensity& prior, const BucketTarget& target,
                         double initial_guess = 0.0) {
    target.validate();
    const bool last = std::isinf(target.K_hi);
    if (prior.lebesgue && last) return -1.0 / (target.Kbar - target.K_lo);  // exact root

    const double tol = last ? 1e-10 * target.Kbar : 1e-10 * (target.K_hi - target.K_lo);
    const double ceiling = detail::beta_ceiling(prior, target);
    const double scale =
        last ? 1.0 / (target.Kbar - target.K_lo) : 2.0 / (target.K_hi - target.K_lo);

    auto cp_at = [&](double b) { return cumulant(prior, target.K_lo, target.K_hi, b, target.index).cp; };

    double beta = initial_guess;
    if (!(beta < ceiling)) beta = std::min(0.0, ceiling - scale);
    double f0 = cp_at(beta) - target.Kbar;
    if (std::abs(f0) < tol) return beta;

    // expand a bracket [lo, hi] with f(lo) < 0 < f(hi)
    double lo, hi, flo, fhi;
    if (f0 < 0.0) {
        lo = beta; flo = f0;
        double step = scale;
        hi = beta;
        for (int i = 0;; ++i) {
            if (i >= 200)
                throw SolverError("solve_beta: failed to bracket above (Kbar = " +
                                      std::to_string(target.Kbar) + ")", target.index);
            if (std::isinf(ceiling)) {
                hi = hi + step;
                step *= 2.0;
            } else {
                // approach the effective-domain endpoint geometrically
                hi = ceiling - 0.5 * (ceiling - hi);
                if (ceiling - hi < 1e-14 * std::max(1.0, std::abs(ceiling)) + 1e-300)
                    throw SolverError(
                        "solve_beta: conditional mean " + std::to_string(target.Kbar) +
                            " unreachable below the effective-domain endpoint beta* = " +
                            std::to_string(ceiling),
                        target.index);
            }
            fhi = cp_at(hi) - target.Kbar;
            if (fhi > 0.0) break;
            lo = hi; flo = fhi;
        }
    } else {
        hi = beta; fhi = f0;
        double step = scale;
        lo = beta;
        for (int i = 0;; ++i) {
            if (i >= 200)
                throw SolverError("solve_beta: failed to bracket below (Kbar = " +
                                      std::to_string(target.Kbar) + ")", target.index);
            lo = lo - step;
            step *= 2.0;
            flo = cp_at(lo) - target.Kbar;
            if (flo < 0.0) break;
            hi = lo; fhi = flo;
        }
    }

    // Newton polish inside the bracket, bisection when a step leaves it
    for (int it = 0; it < 100; ++it) {
        CumulantEval ce = cumulant(prior, target.K_lo, target.K_hi, beta, target.index);
        const double f = ce.cp - target.Kbar;
        if (std::abs(f) < tol) return beta;
        if (f > 0.0) { hi = beta; fhi = f; }
        else { lo = beta; flo = f; }
        double next = beta - f / ce.cpp;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == beta) next = 0.5 * (lo + hi);
        if (next == beta) return beta;  // bracket collapsed to machine precision
        beta = next;
    }
    CumulantEval ce = cumulant(prior, target.K_lo, target.K_hi, beta, target.index);
    if (std::abs(ce.cp - target.Kbar) < 10.0 * tol) return beta;
    throw SolverError("solve_beta: iteration cap hit, residual = " +
                          std::to_string(ce.cp - target.Kbar),
                      target.index);
}

// alpha_i = p_i e^{-c_i(beta_i)}; returned in log form so extreme tilts
// cannot overflow.
inline double solve_log_alpha(const PriorDensity& prior, const BucketTarget& target,
                              double beta) {
    const CumulantEval ce = cumulant(prior, target.K_lo, target.K_hi, beta, target.index);
    return std::log(target.mass) - ce.c;
}

// Bucket targets implied by a full set of call and digital quotes.
inline std::vector<BucketTarget> bucket_targets(const OptionChain& chain,
                                                const std::vector<double>& digitals) {
    const int n = chain.n();
    if (static_cast<int>(digitals.size()) != n)
        throw std::invalid_argument("bucket_targets: digitals size mismatch");
    auto D = [&](int i) {
        if (i <= 0) return 1.0;
        if (i > n) return 0.0;
        return digitals[i - 1];
    };
    std::vector<BucketTarget> out(n + 1);
    for (int i = 0; i <= n; ++i) {
        BucketTarget& t = out[i];
        t.index = i;
        t.K_lo = chain.K(i);
        t.K_hi = chain.K(i + 1);
        t.mass = D(i) - D(i + 1);
        const double asset_lo = chain.C(i) + chain.K(i) * D(i);
        const double asset_hi = (i + 1 <= n) ? chain.C(i + 1) + chain.K(i + 1) * D(i + 1) : 0.0;
        t.Kbar = (asset_lo - asset_hi) / t.mass;
    }
    return out;
}

}  // namespace entrofit

#endif  // ENTROFIT_BUCKET_SOLVER_HPP
