// Characteristic-function model zoo: Black-Scholes, Heston, Schobel-Zhu and
// Variance Gamma. Provides the characteristic functions with their branch
// conventions, Fourier-inverted densities and distribution functions, the
// in-the-money probabilities under stock and bond numeraires, and the
// wrapping of each model's terminal density as a PriorDensity.
#ifndef ENTROFIT_CF_MODELS_HPP
#define ENTROFIT_CF_MODELS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "entrofit/black_scholes.hpp"
#include "entrofit/pchip.hpp"
#include "entrofit/prior.hpp"
#include "entrofit/quadrature.hpp"
#include "entrofit/special_functions.hpp"

namespace entrofit {

using complex_t = std::complex<double>;

struct MarketEnv {
    double spot = 0.0;
    double rate = 0.0;
    double dividend = 0.0;
    double maturity = 0.0;

    double forward() const { return spot * std::exp((rate - dividend) * maturity); }
    void validate() const {
        if (!(spot > 0.0 && maturity > 0.0))
            throw std::invalid_argument("MarketEnv: spot and maturity must be positive");
    }
};

struct BsParams {
    double sigma = 0.0;
    void validate() const {
        if (!(sigma > 0.0)) throw std::invalid_argument("BsParams: sigma must be > 0");
    }
};

struct HestonParams {
    double kappa = 0.0;
    double theta = 0.0;
    double rho = 0.0;
    double sigma = 0.0;
    double v0 = 0.0;
    double lambda = 0.0;  // market price of volatility risk; fixed to 0 for pricing

    void validate() const {
        if (!(kappa > 0.0 && theta > 0.0 && sigma > 0.0 && v0 >= 0.0))
            throw std::invalid_argument("HestonParams: kappa, theta, sigma > 0 and v0 >= 0");
        if (!(rho >= -1.0 && rho <= 1.0))
            throw std::invalid_argument("HestonParams: rho in [-1, 1]");
    }
};

struct SzParams {
    double kappa = 0.0;
    double theta = 0.0;  // long-run volatility level
    double rho = 0.0;
    double sigma = 0.0;  // volatility of volatility
    double v0 = 0.0;     // initial volatility

    void validate() const {
        if (!(kappa > 0.0 && sigma > 0.0 && v0 >= 0.0))
            throw std::invalid_argument("SzParams: kappa, sigma > 0 and v0 >= 0");
        if (!(rho >= -1.0 && rho <= 1.0)) throw std::invalid_argument("SzParams: rho in [-1, 1]");
    }
};

struct VgParams {
    double theta = 0.0;
    double sigma = 0.0;
    double nu = 0.0;

    double omega() const {
        const double arg = 1.0 - theta * nu - 0.5 * sigma * sigma * nu;
        return std::log(arg) / nu;
    }
    void validate() const {
        if (!(sigma > 0.0 && nu > 0.0))
            throw std::invalid_argument("VgParams: sigma and nu must be > 0");
        if (!(1.0 - theta * nu - 0.5 * sigma * sigma * nu > 0.0))
            throw std::invalid_argument("VgParams: 1 - theta nu - sigma^2 nu/2 must be > 0");
    }
};

using ModelParams = std::variant<BsParams, HestonParams, SzParams, VgParams>;

inline std::string model_name(const ModelParams& m) {
    switch (m.index()) {
        case 0: return "bs";
        case 1: return "heston";
        case 2: return "sz";
        default: return "vg";
    }
}

inline void validate(const ModelParams& m) {
    std::visit([](const auto& p) { p.validate(); }, m);
}

namespace detail {

inline const complex_t kI{0.0, 1.0};

// Gauss-Legendre nodes/weights on [-1, 1], cached per order.
inline const std::vector<std::pair<double, double>>& gauss_legendre_64() {
    static const std::vector<std::pair<double, double>> table = [] {
        const int n = 64;
        std::vector<std::pair<double, double>> nw(n);
        for (int i = 0; i < n / 2; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
                }
                pp = n * (x * p0 - p1) / (x * x - 1.0);
                const double dx = p0 / pp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            const double w = 2.0 / ((1.0 - x * x) * pp * pp);
            nw[i] = {-x, w};
            nw[n - 1 - i] = {x, w};
        }
        return nw;
    }();
    return table;
}

inline complex_t bs_cf(const BsParams& p, const MarketEnv& env, complex_t u) {
    const double T = env.maturity;
    const double mu = std::log(env.spot) +
                      (env.rate - env.dividend - 0.5 * p.sigma * p.sigma) * T;
    return std::exp(kI * u * mu - 0.5 * p.sigma * p.sigma * u * u * T);
}

// Heston characteristic function with the d2 = -d1 root throughout, so the
// complex logarithm never crosses its cut for the maturities in scope.
inline complex_t heston_cf(const HestonParams& p, const MarketEnv& env, complex_t u) {
    const double T = env.maturity;
    const double s2 = p.sigma * p.sigma;
    const double b = p.kappa + p.lambda;
    const complex_t ir = kI * p.rho * p.sigma * u;
    const complex_t d1 = std::sqrt((ir - b) * (ir - b) + s2 * (kI * u + u * u));
    const complex_t d2 = -d1;
    const complex_t g = (b - ir + d2) / (b - ir - d2);
    const complex_t edt = std::exp(d2 * T);
    const complex_t C = (env.rate - env.dividend) * u * kI * T +
                        p.kappa * p.theta / s2 *
                            ((b - ir + d2) * T - 2.0 * std::log((1.0 - g * edt) / (1.0 - g)));
    const complex_t D = (b - ir + d2) / s2 * (1.0 - edt) / (1.0 - g * edt);
    return std::exp(C + D * p.v0 + kI * u * std::log(env.spot));
}

// Schobel-Zhu characteristic function: exact solution of the Riccati system
// for the Ornstein-Uhlenbeck volatility, written with the even-in-gamma
// combinations so the square-root branch drops out. The two theta-dependent
// time integrals have no elementary closed form free of extra logarithm
// branches, so they are evaluated by fixed Gauss-Legendre quadrature (the
// integrands are smooth and bounded).
inline complex_t sz_cf(const SzParams& p, const MarketEnv& env, complex_t u) {
    const double T = env.maturity;
    const double s2 = p.sigma * p.sigma;
    const complex_t uu = u * u + kI * u;
    const complex_t A = p.kappa - kI * p.rho * p.sigma * u;
    const complex_t gam = std::sqrt(A * A + s2 * uu);
    const complex_t E = std::exp(-2.0 * gam * T);
    const complex_t den = (gam + A) + (gam - A) * E;
    const complex_t Dh = -uu * (1.0 - E) / den;
    const complex_t one_m_e = 1.0 - std::exp(-gam * T);
    const complex_t B = -p.kappa * p.theta * uu / gam * one_m_e * one_m_e / den;
    complex_t M1 = 0.0, M2 = 0.0;
    if (p.theta != 0.0) {
        for (const auto& [xi, wi] : gauss_legendre_64()) {
            const double s = 0.5 * T * (xi + 1.0);
            const complex_t e1 = std::exp(-gam * s);
            const complex_t dns = (gam + A) + (gam - A) * e1 * e1;
            const complex_t f1 = (1.0 - e1) * (1.0 - e1) / dns;
            M1 += (0.5 * T * wi) * f1;
            M2 += (0.5 * T * wi) * f1 * f1;
        }
    }
    const double kth = p.kappa * p.theta;
    const complex_t C = (env.rate - env.dividend) * kI * u * T + 0.5 * A * T -
                        0.5 * (gam * T + std::log(den / (2.0 * gam))) -
                        kth * kth * uu / gam * M1 +
                        0.5 * s2 * kth * kth * uu * uu / (gam * gam) * M2;
    return std::exp(kI * u * std::log(env.spot) + 0.5 * Dh * p.v0 * p.v0 + B * p.v0 + C);
}

// Variance Gamma: principal-branch complex power (the base has positive real
// part on the strip used by the pricing integrals, so this is safe).
inline complex_t vg_cf(const VgParams& p, const MarketEnv& env, complex_t u) {
    const double T = env.maturity;
    const double drift = std::log(env.spot) + (env.rate - env.dividend + p.omega()) * T;
    const complex_t base = 1.0 - kI * p.theta * p.nu * u + 0.5 * p.sigma * p.sigma * p.nu * u * u;
    return std::exp(kI * u * drift) * std::pow(base, -T / p.nu);
}

}  // namespace detail

// phi(u) = E[e^{i u ln S(T)}].
inline complex_t charfn(const ModelParams& model, const MarketEnv& env, complex_t u) {
    env.validate();
    return std::visit(
        [&](const auto& p) -> complex_t {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, BsParams>) return detail::bs_cf(p, env, u);
            else if constexpr (std::is_same_v<P, HestonParams>) return detail::heston_cf(p, env, u);
            else if constexpr (std::is_same_v<P, SzParams>) return detail::sz_cf(p, env, u);
            else return detail::vg_cf(p, env, u);
        },
        model);
}

struct InversionSpec {
    double truncation = 0.0;       // 0 = choose adaptively
    double max_truncation = 2e6;   // give up (with a warning flag) beyond this
    int grid_points = 4097;        // cached density grid resolution
    bool truncation_warning = false;
};

// Smallest a (by doubling) with |phi(a)| below the target envelope.
inline double choose_truncation(const ModelParams& model, const MarketEnv& env,
                                InversionSpec& spec, double target = 1e-12) {
    if (spec.truncation > 0.0) return spec.truncation;
    double a = 64.0;
    while (std::abs(charfn(model, env, a)) >= target) {
        a *= 2.0;
        if (a > spec.max_truncation) {
            spec.truncation_warning = true;
            break;
        }
    }
    spec.truncation = std::min(a, spec.max_truncation);
    return spec.truncation;
}

namespace detail {

inline QuadratureSpec fourier_spec() {
    QuadratureSpec s;
    s.rel_tol = 1e-11;
    s.abs_tol = 1e-13;
    s.max_subdivisions = 20000;
    return s;
}

// Integral over (0, a] of Re[e^{-iu shift} psi(u)] with the 1/u factor
// optionally included; the integrand has a finite u -> 0 limit which we
// reach by freezing evaluations below a tiny floor.
template <class Psi>
inline double gil_pelaez_integral(const Psi& psi, double a, bool over_iu) {
    auto f = [&](double u) {
        const double ue = std::max(u, 1e-10);
        complex_t v = psi(ue);
        if (over_iu) v /= complex_t(0.0, ue);
        return v.real();
    };
    QuadratureResult r = integrate_adaptive(f, 0.0, a, fourier_spec());
    if (!r.converged)
        throw QuadratureError("gil_pelaez_integral: truncated Fourier integral failed");
    return r.value;
}

}  // namespace detail

// Density of x = ln S(T) by Fourier inversion.
inline double invert_pdf(const ModelParams& model, const MarketEnv& env, double x,
                         InversionSpec spec = {}) {
    const double a = choose_truncation(model, env, spec);
    auto psi = [&](double u) { return std::exp(-detail::kI * u * x) * charfn(model, env, u); };
    const double v = detail::gil_pelaez_integral(psi, a, false) / M_PI;
    if (v < -1e-6) throw std::runtime_error("invert_pdf: negative density beyond tolerance");
    return std::max(v, 0.0);
}

enum class Numeraire { Stock, Bond };

// In-the-money probabilities Pi1/Pi2; the phase is centered at the forward
// log-price so the oscillation the quadrature sees is only the log-moneyness.
inline double cdf_bar(const ModelParams& model, const MarketEnv& env, double strike,
                      Numeraire measure, InversionSpec spec = {}) {
    if (!(strike > 0.0)) return 1.0;
    const double a = choose_truncation(model, env, spec);
    const double xc = std::log(env.forward());
    const double m = std::log(strike) - xc;
    double value;
    if (measure == Numeraire::Bond) {
        auto psi = [&](double u) {
            return std::exp(-detail::kI * u * m) *
                   (std::exp(-detail::kI * u * xc) * charfn(model, env, u));
        };
        value = 0.5 + detail::gil_pelaez_integral(psi, a, true) / M_PI;
    } else {
        const complex_t phi_mi = charfn(model, env, complex_t(0.0, -1.0));
        auto psi = [&](double u) {
            const complex_t shifted = charfn(model, env, complex_t(u, -1.0)) / phi_mi;
            return std::exp(-detail::kI * u * m) * (std::exp(-detail::kI * u * xc) * shifted);
        };
        value = 0.5 + detail::gil_pelaez_integral(psi, a, true) / M_PI;
    }
    return std::clamp(value, 0.0, 1.0);
}

// Discounted European prices via C = e^{-dT} S Pi1 - e^{-rT} K Pi2,
// D = e^{-rT} Pi2.
inline double price_call_cf(const ModelParams& model, const MarketEnv& env, double strike,
                            const InversionSpec& spec = {}) {
    const double p1 = cdf_bar(model, env, strike, Numeraire::Stock, spec);
    const double p2 = cdf_bar(model, env, strike, Numeraire::Bond, spec);
    return std::exp(-env.dividend * env.maturity) * env.spot * p1 -
           std::exp(-env.rate * env.maturity) * strike * p2;
}

inline double price_digital_cf(const ModelParams& model, const MarketEnv& env, double strike,
                               const InversionSpec& spec = {}) {
    return std::exp(-env.rate * env.maturity) *
           cdf_bar(model, env, strike, Numeraire::Bond, spec);
}

// Closed-form log-price densities where the model provides one.
inline double bs_pdf_closed(const BsParams& p, const MarketEnv& env, double x) {
    const double T = env.maturity;
    const double mu = std::log(env.spot) + (env.rate - env.dividend - 0.5 * p.sigma * p.sigma) * T;
    const double s = p.sigma * std::sqrt(T);
    return norm_pdf((x - mu) / s) / s;
}

// Variance Gamma density of x = ln S(T): Gamma and Bessel-K evaluated by the
// in-repo special functions. The singularity at xt = 0 is removable for
// T/nu > 1/2 (limit below); for T/nu <= 1/2 it is integrable and the caller
// sees a large clamped value.
inline double vg_pdf_closed(const VgParams& p, const MarketEnv& env, double x) {
    p.validate();
    const double T = env.maturity;
    const double xt = x - std::log(env.spot) - (env.rate - env.dividend + p.omega()) * T;
    const double s2 = p.sigma * p.sigma;
    const double A2 = 2.0 * s2 / p.nu + p.theta * p.theta;
    const double A = std::sqrt(A2);
    const double eta = T / p.nu - 0.5;  // Bessel order
    const double norm = 2.0 * std::exp(p.theta * xt / s2) /
                        (std::pow(p.nu, T / p.nu) * std::sqrt(2.0 * M_PI) * p.sigma *
                         tgamma_pos(T / p.nu));
    const double z = std::abs(xt) * A / s2;
    if (z < 1e-12) {
        if (eta > 0.0)
            return norm * 0.5 * tgamma_pos(eta) * std::pow(2.0 * s2 / A2, eta);
        const double zc = 1e-12;  // integrable singularity: clamp the argument
        return norm * std::pow(zc * s2 / A2, eta) * bessel_k(eta, zc);
    }
    if (z > 700.0) return 0.0;  // Bessel tail underflows
    return norm * std::pow(std::abs(xt) / A, eta) * bessel_k(eta, z);
}

// ---------------------------------------------------------------------------
// Priors from models
// ---------------------------------------------------------------------------

namespace detail {

// Build log-price density values on the uniform grid x0 + j h in one
// adaptive pass over u: every x shares the panels and the characteristic
// function evaluations, and the complex phase advances by a constant ratio
// between neighbouring grid points. The split criterion is the worst
// component, so the pointwise absolute error is bounded by the target.
inline std::vector<double> fourier_density_grid(const ModelParams& model, const MarketEnv& env,
                                                double x0, double h, std::size_t n, double a,
                                                double pointwise_abs = 1e-13) {
    std::vector<double> acc(n, 0.0);
    struct Seg {
        double a, b;
    };
    std::vector<Seg> stack{{0.0, a}};
    std::vector<double> k15(n), g7(n);
    const double tol_total = pointwise_abs * M_PI;

    long panels = 0;
    while (!stack.empty()) {
        const Seg seg = stack.back();
        stack.pop_back();
        std::fill(k15.begin(), k15.end(), 0.0);
        std::fill(g7.begin(), g7.end(), 0.0);
        const double c = 0.5 * (seg.a + seg.b);
        const double half = 0.5 * (seg.b - seg.a);
        for (int j = -7; j <= 7; ++j) {
            const int aj = std::abs(j);
            const double u = c + (j < 0 ? -half : half) * kKronrodNodes[aj];
            const double ue = std::max(u, 1e-12);
            const complex_t phi = charfn(model, env, ue);
            complex_t z = phi * std::exp(-kI * ue * x0);
            const complex_t r = std::exp(-kI * ue * h);
            const double wk = kKronrodWeights[aj];
            const bool in_g7 = (aj % 2 == 0);
            const double wg = in_g7 ? kGaussWeights[aj / 2] : 0.0;
            for (std::size_t m = 0; m < n; ++m) {
                const double re = z.real();
                k15[m] += wk * re;
                if (in_g7) g7[m] += wg * re;
                z *= r;
            }
        }
        ++panels;
        double err = 0.0;
        for (std::size_t m = 0; m < n; ++m) err = std::max(err, std::abs(k15[m] - g7[m]) * half);
        const double budget = tol_total * (seg.b - seg.a) / a;
        if (err < budget || (seg.b - seg.a) < 1e-10 * a || panels > 60000) {
            for (std::size_t m = 0; m < n; ++m) acc[m] += k15[m] * half;
        } else {
            stack.push_back({seg.a, c});
            stack.push_back({c, seg.b});
        }
    }
    for (double& v : acc) v = std::max(v / M_PI, 0.0);
    return acc;
}

// Mass of the segment [x_k, x_{k+1}] assuming exponential variation between
// the two nodal density values (exact for exponential tails).
inline double exp_segment_mass(double p0, double p1, double dx) {
    if (!(p0 > 0.0) || !(p1 > 0.0)) return 0.5 * (std::max(p0, 0.0) + std::max(p1, 0.0)) * dx;
    const double r = std::log(p0 / p1);
    if (std::abs(r) < 1e-8) return 0.5 * (p0 + p1) * dx;
    return (p0 - p1) * dx / r;
}

}  // namespace detail

// Gil-Pelaez distribution function of x = ln S(T).
inline double cdf_x(const ModelParams& model, const MarketEnv& env, double x,
                    InversionSpec spec = {}) {
    const double a = choose_truncation(model, env, spec);
    auto psi = [&](double u) { return std::exp(-detail::kI * u * x) * charfn(model, env, u); };
    return std::clamp(0.5 - detail::gil_pelaez_integral(psi, a, true) / M_PI, 0.0, 1.0);
}

namespace detail {

struct TailScan {
    double x_lo = 0.0;   // left point where the left-tail mass is ~1e-13, with margin
    double x_hi = 0.0;   // right point where the right-tail mass crosses 1e-12
};

// Locate the support window from density values on a coarse uniform grid,
// treating the tails as piecewise exponential between nodes (exact for the
// exponential tails all four models have in log-price).
inline TailScan scan_tails(const std::vector<double>& x, const std::vector<double>& p,
                           double right_target, double left_target) {
    const std::size_t n = x.size();
    const double dx = x[1] - x[0];
    // cumulative tail masses
    std::vector<double> right(n, 0.0);
    for (std::size_t k = n - 1; k-- > 0;)
        right[k] = right[k + 1] + exp_segment_mass(p[k], p[k + 1], dx);
    std::vector<double> left(n, 0.0);
    for (std::size_t k = 1; k < n; ++k)
        left[k] = left[k - 1] + exp_segment_mass(p[k - 1], p[k], dx);

    TailScan out;
    // rightmost crossing of the right tail through the target
    std::size_t j = n - 1;
    while (j > 0 && right[j] < right_target) --j;
    if (j >= n - 1) {
        // extrapolate beyond the grid with the terminal slope
        const double lam = std::max(std::log(std::max(p[n - 2], 1e-300) /
                                             std::max(p[n - 1], 1e-300)) / dx, 0.05);
        const double tail_end = std::max(p[n - 1], 1e-300) / lam;
        out.x_hi = x[n - 1] + std::log(std::max(tail_end / right_target, 1.0)) / lam;
    } else {
        const double t0 = right[j], t1 = right[j + 1];
        const double w = (t1 > 0.0 && t0 > t1)
                             ? std::log(t0 / right_target) / std::log(t0 / t1)
                             : 0.5;
        out.x_hi = x[j] + dx * std::min(std::max(w, 0.0), 1.0);
    }
    // leftmost crossing of the left tail, pushed out by a slope margin
    std::size_t i = 0;
    while (i + 1 < n && left[i] < left_target) ++i;
    double lam_lo = 1.0;
    if (i + 1 < n && p[i] > 0.0 && p[i + 1] > 0.0)
        lam_lo = std::max(std::log(p[i + 1] / p[i]) / dx, 0.05);
    out.x_lo = x[i > 0 ? i - 1 : 0] - 3.0 / lam_lo;
    return out;
}

}  // namespace detail

// Wrap a model's terminal asset-price density as a PriorDensity. Closed-form
// densities are used when the model has one; Heston and Schobel-Zhu go
// through a cached Fourier inversion on a uniform log-price grid with
// shape-preserving interpolation. The support bound is the point where the
// right-tail mass drops to 1e-12, located by bracketing the integrated tail
// on a scouting grid; beta* comes from the log-tail slope over the last
// decade of support.
inline PriorPtr as_prior(const ModelParams& model, const MarketEnv& env,
                         InversionSpec spec = {}) {
    validate(model);
    env.validate();
    if (const auto* bs = std::get_if<BsParams>(&model))
        return make_lognormal_prior(env.forward(), bs->sigma, env.maturity);

    const double x_f = std::log(env.forward());

    if (const auto* vg = std::get_if<VgParams>(&model)) {
        // closed-form density; scan its tails directly
        VgParams vp = *vg;
        MarketEnv e = env;
        double W = 25.0;
        std::vector<double> xs, ps;
        for (int attempt = 0;; ++attempt) {
            const std::size_t n = 513;
            xs.resize(n);
            ps.resize(n);
            for (std::size_t k = 0; k < n; ++k) {
                xs[k] = x_f - W + 2.0 * W * static_cast<double>(k) / (n - 1);
                ps[k] = vg_pdf_closed(vp, e, xs[k]);
            }
            if ((ps.front() < 3e-13 && ps.back() < 3e-13) || attempt >= 3 || W >= 200.0) break;
            W *= 2.0;
        }
        const detail::TailScan tails = detail::scan_tails(xs, ps, 1e-12, 1e-13);
        auto p = std::make_shared<PriorDensity>();
        p->support_hint = std::exp(tails.x_hi);
        const double x_lo = tails.x_lo, x_hi = tails.x_hi;
        p->pdf = [vp, e, x_lo, x_hi](double S) {
            if (!(S > 0.0)) return 0.0;
            const double x = std::log(S);
            if (x < x_lo || x > x_hi) return 0.0;
            return vg_pdf_closed(vp, e, x) / S;
        };
        p->moment_bound = moment_bound_from_tail(p->pdf, p->support_hint);
        return p;
    }

    const double a = choose_truncation(model, env, spec);

    // stage 1: coarse scouting pass to locate the tails
    double W = 25.0;
    std::vector<double> xs1, ps1;
    for (int attempt = 0;; ++attempt) {
        const std::size_t n1 = 513;
        const double x0 = x_f - W;
        const double h1 = 2.0 * W / (n1 - 1);
        ps1 = detail::fourier_density_grid(model, env, x0, h1, n1, a, 3e-14);
        xs1.resize(n1);
        for (std::size_t k = 0; k < n1; ++k) xs1[k] = x0 + h1 * k;
        if ((ps1.front() < 3e-13 && ps1.back() < 3e-13) || attempt >= 3 || W >= 200.0) break;
        W *= 2.0;
    }
    const detail::TailScan tails = detail::scan_tails(xs1, ps1, 1e-12, 1e-13);

    // stage 2: final grid over the trimmed window
    const std::size_t n2 = static_cast<std::size_t>(spec.grid_points);
    const double h2 = (tails.x_hi - tails.x_lo) / static_cast<double>(n2 - 1);
    std::vector<double> vals =
        detail::fourier_density_grid(model, env, tails.x_lo, h2, n2, a, 1e-13);
    std::vector<double> xs2(n2);
    for (std::size_t k = 0; k < n2; ++k) xs2[k] = tails.x_lo + h2 * k;

    auto p = std::make_shared<PriorDensity>();
    p->support_hint = std::exp(tails.x_hi);
    auto interp = std::make_shared<PchipInterpolant>(std::move(xs2), std::move(vals));
    p->pdf = [interp](double S) {
        if (!(S > 0.0)) return 0.0;
        const double v = (*interp)(std::log(S));
        return v > 0.0 ? v / S : 0.0;
    };
    p->moment_bound = moment_bound_from_tail(p->pdf, p->support_hint);
    return p;
}

}  // namespace entrofit

#endif  // ENTROFIT_CF_MODELS_HPP
