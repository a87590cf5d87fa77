// The fitted density q(S) = alpha_i e^{beta_i S} p(S) on [K_i, K_{i+1}),
// plus every functional evaluated against it (pricing, entropy, moments).
#ifndef ENTROFIT_TILTED_DENSITY_HPP
#define ENTROFIT_TILTED_DENSITY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "entrofit/bucket_solver.hpp"
#include "entrofit/option_chain.hpp"
#include "entrofit/prior.hpp"
#include "entrofit/quadrature.hpp"

namespace entrofit {

class TiltedDensity {
  public:
    TiltedDensity(OptionChain chain, PriorPtr prior, std::vector<double> log_alphas,
                  std::vector<double> betas)
        : chain_(std::move(chain)),
          prior_(std::move(prior)),
          log_alpha_(std::move(log_alphas)),
          beta_(std::move(betas)) {
        if (log_alpha_.size() != beta_.size() ||
            static_cast<int>(beta_.size()) != chain_.n() + 1)
            throw std::invalid_argument("TiltedDensity: need n+1 bucket coefficients");
    }

    const OptionChain& chain() const { return chain_; }
    const PriorDensity& prior() const { return *prior_; }
    PriorPtr prior_ptr() const { return prior_; }
    int buckets() const { return static_cast<int>(beta_.size()); }
    double beta(int i) const { return beta_[i]; }
    double log_alpha(int i) const { return log_alpha_[i]; }
    double alpha(int i) const { return std::exp(log_alpha_[i]); }
    const std::vector<double>& betas() const { return beta_; }
    const std::vector<double>& log_alphas() const { return log_alpha_; }

    // Bucket index of S: the i with K_i <= S < K_{i+1}.
    int bucket_of(double S) const {
        const auto& Ks = chain_.strikes;
        return static_cast<int>(std::upper_bound(Ks.begin(), Ks.end(), S) - Ks.begin());
    }

    // ln(q/p) on bucket i.
    double log_tilt(int i, double S) const { return log_alpha_[i] + beta_[i] * S; }

    // q(S); right-continuous at strikes, zero beyond the prior support.
    double pdf(double S) const {
        if (!(S >= 0.0)) throw std::domain_error("TiltedDensity::pdf: S must be >= 0");
        if (S > prior_->support_hint) return 0.0;
        const int i = bucket_of(S);
        return std::exp(log_tilt(i, S)) * (*prior_)(S);
    }

    // Undiscounted call price int_K (S - K) q dS.
    double price_call(double K, const QuadratureSpec& spec = {}) const {
        double value = 0.0;
        for_buckets_above(K, [&](int i, double lo, double hi) {
            const auto m = bucket_moments(i, lo, hi, spec);
            value += m[1] - K * m[0];
        });
        return value;
    }

    // Undiscounted digital price int_K q dS.
    double price_digital(double K, const QuadratureSpec& spec = {}) const {
        double value = 0.0;
        for_buckets_above(K, [&](int i, double lo, double hi) {
            value += bucket_moments(i, lo, hi, spec)[0];
        });
        return std::clamp(value, 0.0, 1.0);
    }

    double normalization(const QuadratureSpec& spec = {}) const { return price_digital(0.0, spec); }

    double mean(const QuadratureSpec& spec = {}) const {
        double value = 0.0;
        for_buckets_above(0.0, [&](int i, double lo, double hi) {
            value += bucket_moments(i, lo, hi, spec)[1];
        });
        return value;
    }

    // H(q) = -int q ln q, by bucket-wise quadrature.
    double entropy(QuadratureSpec spec = entropy_spec()) const {
        double h = 0.0;
        for_buckets_above(0.0, [&](int i, double lo, double hi) {
            auto f = [&](double S) {
                const double p = (*prior_)(S);
                if (!(p > 0.0)) return 0.0;
                const double lt = log_tilt(i, S);
                const double q = std::exp(lt) * p;
                return q > 0.0 ? -q * (lt + std::log(p)) : 0.0;
            };
            h += integrate_bucket(i, lo, hi, f, spec);
        });
        return h;
    }

    // H(q || p) = int q ln(q/p); the integrand uses the exponential tilt
    // directly so ratios of vanishing densities never appear.
    double relative_entropy(QuadratureSpec spec = entropy_spec()) const {
        double h = 0.0;
        for_buckets_above(0.0, [&](int i, double lo, double hi) {
            auto f = [&](double S) {
                const double lt = log_tilt(i, S);
                return std::exp(lt) * (*prior_)(S) * lt;
            };
            h += integrate_bucket(i, lo, hi, f, spec);
        });
        return h;
    }

    static QuadratureSpec entropy_spec() {
        QuadratureSpec s;
        s.rel_tol = 1e-10;
        s.abs_tol = 1e-12;
        s.max_subdivisions = 4000;
        return s;
    }

    // Integrate f over the piece [lo, hi) of bucket i, mapping the tail when
    // hi is infinite (Lebesgue prior only; proper priors are truncated at
    // their support hint before we get here).
    template <class F>
    double integrate_bucket(int i, double lo, double hi, const F& f,
                            const QuadratureSpec& spec) const {
        QuadratureResult r = std::isinf(hi) ? integrate_semi_infinite(f, lo, spec)
                                            : integrate_adaptive(f, lo, hi, spec);
        if (!r.converged)
            throw SolverError("TiltedDensity: quadrature failed on bucket " + std::to_string(i),
                              i);
        return r.value;
    }

    // Visit the in-range part of every bucket intersecting [K, support).
    template <class Fn>
    void for_buckets_above(double K, const Fn& fn) const {
        const int nb = buckets();
        for (int i = 0; i < nb; ++i) {
            double lo = std::max(K, chain_.K(i));
            double hi = std::min(chain_.K(i + 1), prior_->support_hint);
            if (!(lo < hi)) continue;
            fn(i, lo, hi);
        }
    }

  private:
    // {mass, asset} = {int q, int S q} over [lo, hi); closed form on the
    // Lebesgue tail, shared-panel quadrature elsewhere.
    std::array<double, 2> bucket_moments(int i, double lo, double hi,
                                         const QuadratureSpec& spec) const {
        if (std::isinf(hi)) {
            // Lebesgue last bucket: alpha e^{beta S} with beta < 0
            const double b = beta_[i];
            const double scale = std::exp(log_alpha_[i] + b * lo);
            return {-scale / b, scale * (1.0 / (b * b) - lo / b)};
        }
        auto f = [&](double S) -> std::array<double, 2> {
            const double q = std::exp(log_tilt(i, S)) * (*prior_)(S);
            return {q, S * q};
        };
        bool ok = true;
        auto m = integrate_adaptive_vec<2>(f, lo, hi, spec, &ok);
        if (!ok)
            throw SolverError("TiltedDensity: quadrature failed on bucket " + std::to_string(i),
                              i);
        return m;
    }

    OptionChain chain_;
    PriorPtr prior_;
    std::vector<double> log_alpha_;
    std::vector<double> beta_;
};

// Solve every bucket independently from call AND digital quotes (the one
// pass that needs no outer optimization).
inline TiltedDensity fit_with_digitals(const PriorPtr& prior, const OptionChain& chain) {
    chain.validate();
    if (!chain.has_digitals())
        throw std::invalid_argument("fit_with_digitals: chain carries no digital quotes");
    const std::vector<BucketTarget> targets = bucket_targets(chain, *chain.digitals);
    std::vector<double> betas(targets.size()), log_alphas(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        betas[i] = solve_beta(*prior, targets[i]);
        log_alphas[i] = solve_log_alpha(*prior, targets[i], betas[i]);
    }
    return TiltedDensity(chain, prior, std::move(log_alphas), std::move(betas));
}

}  // namespace entrofit

#endif  // ENTROFIT_TILTED_DENSITY_HPP
