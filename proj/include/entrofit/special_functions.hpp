// In-repo special functions: normal distribution helpers, Lanczos gamma,
// modified Bessel K of real order, and the exponential integral Ei. Kept
// dependency-free so the branch rules stay explicit.
#ifndef ENTROFIT_SPECIAL_FUNCTIONS_HPP
#define ENTROFIT_SPECIAL_FUNCTIONS_HPP

#include <cmath>
#include <limits>
#include <stdexcept>

namespace entrofit {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

inline double norm_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779399460599343819;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

// Gamma function for positive arguments (Lanczos, g = 7, 9 terms).
inline double tgamma_pos(double x) {
    if (!(x > 0.0)) throw std::domain_error("tgamma_pos: requires x > 0");
    static const double g = 7.0;
    static const double c[9] = {
        0.99999999999980993,   676.5203681218851,    -1259.1392167224028,
        771.32342877765313,    -176.61502916214059,  12.507343278686905,
        -0.13857109526572012,  9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // reflection keeps the series argument in its sweet spot
        return M_PI / (std::sin(M_PI * x) * tgamma_pos(1.0 - x));
    }
    const double z = x - 1.0;
    double a = c[0];
    for (int i = 1; i < 9; ++i) a += c[i] / (z + i);
    const double t = z + g + 0.5;
    return std::sqrt(2.0 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

namespace detail {

// (1/Gamma(1-mu) -/+ 1/Gamma(1+mu)) combinations for the Temme series,
// stable for mu near 0.
inline void temme_gammas(double mu, double& gam1, double& gam2, double& gampl,
                         double& gammi) {
    gampl = 1.0 / tgamma_pos(1.0 + mu);
    gammi = 1.0 / tgamma_pos(1.0 - mu);
    if (std::abs(mu) < 1e-4) {
        // 1/Gamma(1+z) = 1 + g z + a z^2 + b z^3 + ...
        static const double b3 = 0.0420026350340952355290039348754298;  // -(g^3/6 - g pi^2/12 + zeta(3)/3)
        gam1 = -kEulerGamma + b3 * mu * mu;
    } else {
        gam1 = (gammi - gampl) / (2.0 * mu);
    }
    gam2 = 0.5 * (gammi + gampl);
}

}  // namespace detail

// Modified Bessel function of the second kind, real order nu (K is even in
// the order). Temme series for x < 2, Steed continued fraction otherwise.
inline double bessel_k(double nu, double x) {
    if (!(x > 0.0)) throw std::domain_error("bessel_k: requires x > 0");
    nu = std::abs(nu);
    const double eps = std::numeric_limits<double>::epsilon();
    const int max_iter = 10000;
    const int nl = static_cast<int>(nu + 0.5);
    const double mu = nu - nl;  // in [-1/2, 1/2]
    const double mu2 = mu * mu;
    double rkmu, rk1;
    if (x < 2.0) {
        const double x2 = 0.5 * x;
        const double pimu = M_PI * mu;
        const double fact = (std::abs(pimu) < eps) ? 1.0 : pimu / std::sin(pimu);
        double d = -std::log(x2);
        double e = mu * d;
        const double fact2 = (std::abs(e) < eps) ? 1.0 : std::sinh(e) / e;
        double gam1, gam2, gampl, gammi;
        detail::temme_gammas(mu, gam1, gam2, gampl, gammi);
        double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
        double sum = ff;
        e = std::exp(e);
        double p = 0.5 * e / gampl;
        double q = 0.5 / (e * gammi);
        double c = 1.0;
        d = x2 * x2;
        double sum1 = p;
        int i = 1;
        for (; i <= max_iter; ++i) {
            ff = (i * ff + p + q) / (i * i - mu2);
            c *= d / i;
            p /= (i - mu);
            q /= (i + mu);
            const double del = c * ff;
            sum += del;
            const double del1 = c * (p - i * ff);
            sum1 += del1;
            if (std::abs(del) < std::abs(sum) * eps) break;
        }
        if (i > max_iter) throw std::runtime_error("bessel_k: series failed to converge");
        rkmu = sum;
        rk1 = sum1 * (2.0 / x);
    } else {
        double b = 2.0 * (1.0 + x);
        double d = 1.0 / b;
        double h = d, delh = d;
        double q1 = 0.0, q2 = 1.0;
        const double a1 = 0.25 - mu2;
        double q = a1, c = a1, a = -a1;
        double s = 1.0 + q * delh;
        int i = 2;
        for (; i <= max_iter; ++i) {
            a -= 2.0 * (i - 1);
            c = -a * c / i;
            const double qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            const double dels = q * delh;
            s += dels;
            if (std::abs(dels / s) < eps) break;
        }
        if (i > max_iter) throw std::runtime_error("bessel_k: continued fraction failed");
        h = a1 * h;
        rkmu = std::sqrt(M_PI / (2.0 * x)) * std::exp(-x) / s;
        rk1 = rkmu * (mu + x + 0.5 - h) / x;
    }
    for (int j = 1; j <= nl; ++j) {
        const double rktemp = (mu + j) * (2.0 / x) * rk1 + rkmu;
        rkmu = rk1;
        rk1 = rktemp;
    }
    return rkmu;
}

// Exponential integral Ei(s), s != 0. Power series where it is
// well-conditioned, Lentz continued fraction for deep negative arguments,
// asymptotic expansion for large positive ones.
inline double expint_ei(double s) {
    if (s == 0.0) throw std::domain_error("expint_ei: pole at s = 0");
    const double eps = 1e-16;
    if (s > 40.0) {
        // e^s/s * sum k!/s^k, truncated at the smallest term
        double term = 1.0, sum = 1.0;
        for (int k = 1; k < 60; ++k) {
            const double next = term * k / s;
            if (next >= term) break;
            term = next;
            sum += term;
            if (term < eps * sum) break;
        }
        return std::exp(s) * sum / s;
    }
    if (s >= -5.0) {
        // Ei(s) = gamma + ln|s| + sum s^k/(k k!)
        double term = 1.0, sum = 0.0;
        for (int k = 1; k <= 200; ++k) {
            term *= s / k;
            const double del = term / k;
            sum += del;
            if (std::abs(del) < eps * (std::abs(sum) + 1e-300)) break;
        }
        return kEulerGamma + std::log(std::abs(s)) + sum;
    }
    // s < -5: Ei(s) = -E1(-s) via modified Lentz on the standard fraction
    const double x = -s;
    const double tiny = 1e-290;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int k = 1; k <= 400; ++k) {
        const double ak = -static_cast<double>(k) * k;
        b += 2.0;
        d = 1.0 / (ak * d + b);
        c = b + ak / c;
        if (c == 0.0) c = tiny;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return -std::exp(-x) * h;
}

}  // namespace entrofit

#endif  // ENTROFIT_SPECIAL_FUNCTIONS_HPP
