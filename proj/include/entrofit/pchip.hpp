// Shape-preserving cubic interpolation (Fritsch-Carlson limiter). Used for
// cached Fourier-inverted densities: nonnegative data stays nonnegative.
#ifndef ENTROFIT_PCHIP_HPP
#define ENTROFIT_PCHIP_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace entrofit {

class PchipInterpolant {
  public:
    PchipInterpolant() = default;
    PchipInterpolant(std::vector<double> xs, std::vector<double> ys)
        : x_(std::move(xs)), y_(std::move(ys)) {
        const std::size_t n = x_.size();
        if (n < 3 || y_.size() != n)
            throw std::invalid_argument("PchipInterpolant: need >= 3 matching points");
        d_.resize(n);
        std::vector<double> h(n - 1), delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            if (!(h[i] > 0.0))
                throw std::invalid_argument("PchipInterpolant: x must be strictly increasing");
            delta[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                d_[i] = 0.0;  // local extremum: flat tangent, no overshoot
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        d_[0] = edge_derivative(h[0], h[1], delta[0], delta[1]);
        d_[n - 1] = edge_derivative(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }

    double min_x() const { return x_.front(); }
    double max_x() const { return x_.back(); }

    // Evaluate; out-of-range queries return 0 (densities vanish off-grid).
    double operator()(double x) const {
        if (x < x_.front() || x > x_.back()) return 0.0;
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = static_cast<std::size_t>(it - x_.begin());
        i = std::min(std::max<std::size_t>(i, 1), x_.size() - 1) - 1;
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        const double h10 = t3 - 2.0 * t2 + t;
        const double h01 = -2.0 * t3 + 3.0 * t2;
        const double h11 = t3 - t2;
        return h00 * y_[i] + h * h10 * d_[i] + h01 * y_[i + 1] + h * h11 * d_[i + 1];
    }

  private:
    static double edge_derivative(double h0, double h1, double del0, double del1) {
        // one-sided three-point estimate, limited to preserve shape
        double d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
        if (d * del0 <= 0.0) return 0.0;
        if (del0 * del1 < 0.0 && std::abs(d) > 3.0 * std::abs(del0)) return 3.0 * del0;
        return d;
    }

    std::vector<double> x_, y_, d_;
};

}  // namespace entrofit

#endif  // ENTROFIT_PCHIP_HPP
