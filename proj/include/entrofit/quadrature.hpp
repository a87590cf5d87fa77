// Adaptive Gauss-Kronrod quadrature used by all pricing and entropy
// integrals. Buckets are integrated separately by the callers so the
// piecewise-exponential kinks of the fitted densities never cross a panel.
#ifndef ENTROFIT_QUADRATURE_HPP
#define ENTROFIT_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace entrofit {

struct QuadratureSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    int max_subdivisions = 2000;

    void validate() const {
        if (rel_tol <= 0.0 || abs_tol <= 0.0)
            throw std::invalid_argument("QuadratureSpec: tolerances must be positive");
        if (max_subdivisions < 1)
            throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
    }
};

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.000000000000000000000000000000000e+00,
    2.077849550078984676006894037732449e-01,
    4.058451513773971669066064120769615e-01,
    5.860872354676911302941448382587296e-01,
    7.415311855993944398638647732807884e-01,
    8.648644233597690727897127886409262e-01,
    9.491079123427585245261896840478513e-01,
    9.914553711208126392068546975263285e-01};

inline constexpr std::array<double, 8> kKronrodWeights = {
    2.094821410847278280129991748917143e-01,
    2.044329400752988924141619992346491e-01,
    1.903505780647854099132564024210137e-01,
    1.690047266392679028265834265985503e-01,
    1.406532597155259187451895905102379e-01,
    1.047900103222501838398763225415180e-01,
    6.309209262997855329070066318920429e-02,
    2.293532201052922496373200805896959e-02};

inline constexpr std::array<double, 4> kGaussWeights = {
    4.179591836734693877551020408163265e-01,
    3.818300505051189449503697754889751e-01,
    2.797053914892766679014677714237796e-01,
    1.294849661688696932706114326790820e-01};

// One Gauss-Kronrod 7-15 panel. Returns the K15 estimate and the
// |K15 - G7| error estimate.
template <class F>
inline void gk15(const F& f, double a, double b, double& result, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double f0 = f(c);
    double resk = kKronrodWeights[0] * f0;
    double resg = kGaussWeights[0] * f0;
    for (int j = 1; j < 8; ++j) {
        const double x = h * kKronrodNodes[j];
        const double f1 = f(c - x);
        const double f2 = f(c + x);
        resk += kKronrodWeights[j] * (f1 + f2);
        if (j % 2 == 0) resg += kGaussWeights[j / 2] * (f1 + f2);
    }
    result = resk * h;
    err = std::abs((resk - resg) * h);
}

struct Panel {
    double a, b, value, error;
};

}  // namespace detail

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int subdivisions = 0;
    bool converged = true;
};

// Adaptive bisection on [a, b], worst-panel first (max-heap on the error).
template <class F>
inline QuadratureResult integrate_adaptive(const F& f, double a, double b,
                                           const QuadratureSpec& spec = {}) {
    QuadratureResult out;
    if (a == b) return out;
    auto by_error = [](const detail::Panel& x, const detail::Panel& y) {
        return x.error < y.error;
    };
    std::vector<detail::Panel> heap;
    double v, e;
    detail::gk15(f, a, b, v, e);
    heap.push_back({a, b, v, e});
    double total = v, total_err = e;
    int n = 1;
    while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total)) &&
           n < spec.max_subdivisions) {
        std::pop_heap(heap.begin(), heap.end(), by_error);
        detail::Panel p = heap.back();
        heap.pop_back();
        const double m = 0.5 * (p.a + p.b);
        if (m <= p.a || m >= p.b) {  // interval exhausted at machine precision
            heap.push_back(p);
            std::push_heap(heap.begin(), heap.end(), by_error);
            break;
        }
        detail::Panel left{p.a, m, 0.0, 0.0}, right{m, p.b, 0.0, 0.0};
        detail::gk15(f, left.a, left.b, left.value, left.error);
        detail::gk15(f, right.a, right.b, right.value, right.error);
        total += left.value + right.value - p.value;
        total_err += left.error + right.error - p.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), by_error);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), by_error);
        ++n;
    }
    out.value = total;
    out.error_estimate = total_err;
    out.subdivisions = n;
    out.converged = total_err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total)) ||
                    n < spec.max_subdivisions;
    return out;
}

// As integrate_adaptive but f returns N values sharing the same panels; the
// split criterion is the worst component. Used for cumulant triples and for
// Fourier grids where the characteristic function is the expensive factor.
template <std::size_t N, class F>
inline std::array<double, N> integrate_adaptive_vec(const F& f, double a, double b,
                                                    const QuadratureSpec& spec,
                                                    bool* converged = nullptr) {
    struct VPanel {
        double a, b, error;
        std::array<double, N> value;
    };
    auto eval_panel = [&f](double pa, double pb, VPanel& out) {
        const double c = 0.5 * (pa + pb);
        const double h = 0.5 * (pb - pa);
        std::array<double, N> resk{}, resg{};
        std::array<double, N> f0 = f(c);
        for (std::size_t k = 0; k < N; ++k) {
            resk[k] = detail::kKronrodWeights[0] * f0[k];
            resg[k] = detail::kGaussWeights[0] * f0[k];
        }
        for (int j = 1; j < 8; ++j) {
            const double x = h * detail::kKronrodNodes[j];
            std::array<double, N> f1 = f(c - x);
            std::array<double, N> f2 = f(c + x);
            for (std::size_t k = 0; k < N; ++k) {
                resk[k] += detail::kKronrodWeights[j] * (f1[k] + f2[k]);
                if (j % 2 == 0) resg[k] += detail::kGaussWeights[j / 2] * (f1[k] + f2[k]);
            }
        }
        out.a = pa;
        out.b = pb;
        out.error = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            out.value[k] = resk[k] * h;
            out.error = std::max(out.error, std::abs((resk[k] - resg[k]) * h));
        }
    };

    std::vector<VPanel> panels(1);
    eval_panel(a, b, panels[0]);
    std::array<double, N> total = panels[0].value;
    double total_err = panels[0].error;
    int n = 1;
    auto scale = [&total]() {
        double s = 0.0;
        for (double t : total) s = std::max(s, std::abs(t));
        return s;
    };
    while (total_err > std::max(spec.abs_tol, spec.rel_tol * scale()) &&
           n < spec.max_subdivisions) {
        std::size_t worst = 0;
        for (std::size_t i = 1; i < panels.size(); ++i)
            if (panels[i].error > panels[worst].error) worst = i;
        VPanel p = panels[worst];
        const double m = 0.5 * (p.a + p.b);
        if (m <= p.a || m >= p.b) break;
        VPanel left, right;
        eval_panel(p.a, m, left);
        eval_panel(m, p.b, right);
        for (std::size_t k = 0; k < N; ++k)
            total[k] += left.value[k] + right.value[k] - p.value[k];
        total_err += left.error + right.error - p.error;
        panels[worst] = left;
        panels.push_back(right);
        ++n;
    }
    if (converged)
        *converged = total_err <= std::max(spec.abs_tol, spec.rel_tol * scale()) ||
                     n < spec.max_subdivisions;
    return total;
}

// Semi-infinite integral over [a, inf) via S = a + t/(1-t), t in (0,1).
template <class F>
inline QuadratureResult integrate_semi_infinite(const F& f, double a,
                                                const QuadratureSpec& spec = {}) {
    auto g = [&f, a](double t) {
        const double om = 1.0 - t;
        const double S = a + t / om;
        return f(S) / (om * om);
    };
    return integrate_adaptive(g, 0.0, 1.0, spec);
}

enum class Weight { One, S, S2, LnS, SExpBS, ExpBS, S2ExpBS };

// Shared quadrature kernel: integrates p(S) * w(S) over (a, b), where w is
// one of the tabulated weights. b may be +inf, in which case the exponential
// weights require beta below the prior's moment bound (checked by callers;
// here the mapped integral simply diverges panel-wise and fails).
template <class P>
inline double integrate_against(const P& pdf, double a, double b, Weight w, double beta,
                                const QuadratureSpec& spec = {}) {
    spec.validate();
    if (!(a < b)) throw std::invalid_argument("integrate_against: requires a < b");
    auto f = [&pdf, w, beta](double S) {
        const double p = pdf(S);
        switch (w) {
            case Weight::One: return p;
            case Weight::S: return S * p;
            case Weight::S2: return S * S * p;
            case Weight::LnS: return S > 0.0 ? std::log(S) * p : 0.0;
            case Weight::SExpBS: return S * std::exp(beta * S) * p;
            case Weight::ExpBS: return std::exp(beta * S) * p;
            case Weight::S2ExpBS: return S * S * std::exp(beta * S) * p;
        }
        return 0.0;
    };
    QuadratureResult r = std::isinf(b) ? integrate_semi_infinite(f, a, spec)
                                       : integrate_adaptive(f, a, b, spec);
    if (!r.converged)
        throw QuadratureError("integrate_against: tolerance not met after " +
                              std::to_string(r.subdivisions) + " subdivisions on [" +
                              std::to_string(a) + ", " + std::to_string(b) + ")");
    return r.value;
}

}  // namespace entrofit

#endif  // ENTROFIT_QUADRATURE_HPP
