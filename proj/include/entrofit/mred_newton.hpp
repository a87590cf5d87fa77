// Calls-only fit: minimize H(q_D || p) over the open rectangle Omega of
// arbitrage-free digital vectors with a damped Newton method. The gradient
// is the log-jump of the tilt at each strike and the Hessian is symmetric
// tridiagonal, so each step is a Thomas solve.
#ifndef ENTROFIT_MRED_NEWTON_HPP
#define ENTROFIT_MRED_NEWTON_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "entrofit/bucket_solver.hpp"
#include "entrofit/option_chain.hpp"
#include "entrofit/prior.hpp"
#include "entrofit/tilted_density.hpp"

namespace entrofit {

struct OmegaBounds {
    std::vector<double> lower, upper;
    int n() const { return static_cast<int>(lower.size()); }
    bool contains(const std::vector<double>& D, double margin = 0.0) const {
        for (int i = 0; i < n(); ++i)
            if (!(D[i] > lower[i] + margin && D[i] < upper[i] - margin)) return false;
        return true;
    }
    std::vector<double> midpoint() const {
        std::vector<double> D(lower.size());
        for (std::size_t i = 0; i < D.size(); ++i) D[i] = 0.5 * (lower[i] + upper[i]);
        return D;
    }
};

// Per-coordinate open intervals of arbitrage-free digital prices: each
// digital sits strictly between the adjacent call-spread slopes.
inline OmegaBounds digital_bounds(const OptionChain& chain) {
    const int n = chain.n();
    OmegaBounds b;
    b.lower.resize(n);
    b.upper.resize(n);
    for (int i = 1; i <= n; ++i) {
        b.lower[i - 1] = -chain.spread_slope(i + 1);  // zero for i = n
        b.upper[i - 1] = -chain.spread_slope(i);
        if (!(b.lower[i - 1] < b.upper[i - 1]))
            throw ArbitrageError("empty digital interval at strike index " + std::to_string(i),
                                 i);
    }
    return b;
}

struct ObjectiveEval {
    double H = 0.0;
    std::vector<double> grad;
    std::vector<double> hess_diag;
    std::vector<double> hess_off;
    // per-bucket solution backing the evaluation
    std::vector<double> betas, log_alphas;
    std::vector<BucketTarget> targets;

    double grad_norm() const {
        double g = 0.0;
        for (double v : grad) g = std::max(g, std::abs(v));
        return g;
    }
};

// Solve the n+1 buckets at the candidate digital vector and assemble the
// objective value, gradient and tridiagonal Hessian of Prop-Summary form.
inline ObjectiveEval evaluate_objective(const PriorDensity& prior, const OptionChain& chain,
                                        const std::vector<double>& digitals,
                                        const std::vector<double>* warm_betas = nullptr) {
    const int n = chain.n();
    ObjectiveEval ev;
    ev.targets = bucket_targets(chain, digitals);
    ev.betas.resize(n + 1);
    ev.log_alphas.resize(n + 1);
    std::vector<double> cpp(n + 1);
    for (int i = 0; i <= n; ++i) {
        const BucketTarget& t = ev.targets[i];
        t.validate();  // Omega membership in bucket form
        const double guess = warm_betas && static_cast<int>(warm_betas->size()) == n + 1
                                 ? (*warm_betas)[i]
                                 : 0.0;
        ev.betas[i] = solve_beta(prior, t, guess);
        const CumulantEval ce = cumulant(prior, t.K_lo, t.K_hi, ev.betas[i], i);
        ev.log_alphas[i] = std::log(t.mass) - ce.c;
        cpp[i] = ce.cpp;
        ev.H += t.mass * (ev.log_alphas[i] + ev.betas[i] * t.Kbar);
    }
    ev.grad.resize(n);
    ev.hess_diag.resize(n);
    ev.hess_off.assign(std::max(n - 1, 0), 0.0);
    for (int i = 1; i <= n; ++i) {
        const double Ki = chain.K(i);
        ev.grad[i - 1] = (ev.log_alphas[i] + ev.betas[i] * Ki) -
                         (ev.log_alphas[i - 1] + ev.betas[i - 1] * Ki);
        const BucketTarget& L = ev.targets[i - 1];
        const BucketTarget& R = ev.targets[i];
        ev.hess_diag[i - 1] = 1.0 / L.mass + 1.0 / R.mass +
                              (Ki - L.Kbar) * (Ki - L.Kbar) / (L.mass * cpp[i - 1]) +
                              (R.Kbar - Ki) * (R.Kbar - Ki) / (R.mass * cpp[i]);
    }
    for (int i = 1; i <= n - 1; ++i) {
        const BucketTarget& t = ev.targets[i];
        ev.hess_off[i - 1] = -1.0 / t.mass +
                             (t.Kbar - chain.K(i)) * (chain.K(i + 1) - t.Kbar) /
                                 (t.mass * cpp[i]);
    }
    return ev;
}

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thomas elimination for a symmetric tridiagonal SPD system. A nonpositive
// pivot signals loss of positive definiteness.
inline std::vector<double> tridiagonal_solve(std::vector<double> diag,
                                             const std::vector<double>& off,
                                             std::vector<double> rhs) {
    const int n = static_cast<int>(diag.size());
    if (static_cast<int>(off.size()) != std::max(n - 1, 0) ||
        static_cast<int>(rhs.size()) != n)
        throw std::invalid_argument("tridiagonal_solve: size mismatch");
    for (int i = 1; i < n; ++i) {
        if (!(diag[i - 1] > 0.0))
            throw NumericalError("tridiagonal_solve: nonpositive pivot at row " +
                                 std::to_string(i - 1));
        const double m = off[i - 1] / diag[i - 1];
        diag[i] -= m * off[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    if (!(diag[n - 1] > 0.0))
        throw NumericalError("tridiagonal_solve: nonpositive pivot at row " +
                             std::to_string(n - 1));
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = (rhs[i] - off[i] * x[i + 1]) / diag[i];
    return x;
}

struct MredOptions {
    double grad_tol = 1e-9;   // infinity norm of the tilt log-jumps
    int max_iterations = 200;
    double feasibility_margin = 1e-12;
};

struct MredFit {
    TiltedDensity density;
    std::vector<double> digitals;  // achieved (optimal) digital prices
    double objective = 0.0;        // H(q || p); for Lebesgue this is -entropy
    int iterations = 0;
    double grad_norm = 0.0;
};

struct ConvergenceError : std::runtime_error {
    double grad_norm;
    ConvergenceError(const std::string& what, double g) : std::runtime_error(what), grad_norm(g) {}
};

inline MredFit minimize_relative_entropy(const PriorPtr& prior, const OptionChain& chain,
                                         const MredOptions& opts = {}) {
    chain.validate();
    const OmegaBounds bounds = digital_bounds(chain);
    const int n = chain.n();

    std::vector<double> D = bounds.midpoint();
    ObjectiveEval ev = evaluate_objective(*prior, chain, D);
    int it = 0;
    for (; it < opts.max_iterations && ev.grad_norm() >= opts.grad_tol; ++it) {
        const std::vector<double> step = tridiagonal_solve(ev.hess_diag, ev.hess_off, ev.grad);
        double t = 1.0;
        bool accepted = false;
        while (t >= 1e-16) {
            std::vector<double> cand(n);
            for (int i = 0; i < n; ++i) {
                cand[i] = D[i] - t * step[i];
                cand[i] = std::clamp(cand[i], bounds.lower[i] + opts.feasibility_margin,
                                     bounds.upper[i] - opts.feasibility_margin);
            }
            try {
                ObjectiveEval trial = evaluate_objective(*prior, chain, cand, &ev.betas);
                if (trial.H <= ev.H + 1e-14 * (1.0 + std::abs(ev.H))) {
                    D = std::move(cand);
                    ev = std::move(trial);
                    accepted = true;
                    break;
                }
            } catch (const SolverError&) {
                // candidate outside the solvable region: shrink the step
            } catch (const ArbitrageError&) {
            }
            t *= 0.5;
        }
        if (!accepted)
            throw ConvergenceError("minimize_relative_entropy: line search stalled at gradient " +
                                       std::to_string(ev.grad_norm()),
                                   ev.grad_norm());
    }
    if (ev.grad_norm() >= opts.grad_tol)
        throw ConvergenceError("minimize_relative_entropy: max iterations reached, gradient = " +
                                   std::to_string(ev.grad_norm()),
                               ev.grad_norm());
    return MredFit{TiltedDensity(chain, prior, ev.log_alphas, ev.betas), D, ev.H, it,
                   ev.grad_norm()};
}

}  // namespace entrofit

#endif  // ENTROFIT_MRED_NEWTON_HPP
