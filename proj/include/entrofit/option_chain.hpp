// Option chain container. Everything here is stored UNDISCOUNTED (the tilde
// quantities): discounting is applied only at the CLI/reporting boundary.
#ifndef ENTROFIT_OPTION_CHAIN_HPP
#define ENTROFIT_OPTION_CHAIN_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace entrofit {

struct ArbitrageError : std::runtime_error {
    int index;
    ArbitrageError(const std::string& what, int idx) : std::runtime_error(what), index(idx) {}
};

// Chain of n call quotes at strictly increasing strikes, with the sentinel
// conventions K_0 = 0, K_{n+1} = inf, C_0 = forward, C_{n+1} = 0, D_0 = 1,
// D_{n+1} = 0 built into the accessors.
struct OptionChain {
    double maturity = 0.0;   // T, years
    double rate = 0.0;       // continuous zero rate
    double dividend = 0.0;   // continuous yield
    double forward = 0.0;    // undiscounted E[S(T)]
    std::vector<double> strikes;                  // K_1 < ... < K_n
    std::vector<double> calls;                    // undiscounted C_1 ... C_n
    std::optional<std::vector<double>> digitals;  // undiscounted D_1 ... D_n

    int n() const { return static_cast<int>(strikes.size()); }

    double K(int i) const {
        if (i <= 0) return 0.0;
        if (i > n()) return std::numeric_limits<double>::infinity();
        return strikes[i - 1];
    }
    double C(int i) const {
        if (i <= 0) return forward;
        if (i > n()) return 0.0;
        return calls[i - 1];
    }
    double D(int i) const {
        if (i <= 0) return 1.0;
        if (i > n()) return 0.0;
        return digitals ? (*digitals)[i - 1] : std::numeric_limits<double>::quiet_NaN();
    }
    bool has_digitals() const { return digitals.has_value(); }

    // Call-spread slope between quotes i-1 and i (both may be sentinels);
    // slope n+1 over [K_n, inf) is read as zero.
    double spread_slope(int i) const {
        if (i > n()) return 0.0;
        return (C(i) - C(i - 1)) / (K(i) - K(i - 1));
    }

    void validate() const {
        const int m = n();
        if (m < 1) throw std::invalid_argument("OptionChain: needs at least one strike");
        if (!(maturity > 0.0)) throw std::invalid_argument("OptionChain: maturity must be > 0");
        if (!(forward > 0.0)) throw std::invalid_argument("OptionChain: forward must be > 0");
        if (static_cast<int>(calls.size()) != m)
            throw std::invalid_argument("OptionChain: strikes/calls size mismatch");
        if (digitals && static_cast<int>(digitals->size()) != m)
            throw std::invalid_argument("OptionChain: strikes/digitals size mismatch");
        for (int i = 1; i <= m; ++i) {
            if (!(K(i) > 0.0))
                throw ArbitrageError("strike " + std::to_string(i) + " not positive", i);
            if (i > 1 && !(K(i) > K(i - 1)))
                throw ArbitrageError(
                    "strikes must be strictly increasing (duplicates are rejected) at row " +
                        std::to_string(i),
                    i);
        }
        // monotonicity: C_0 > C_1 > ... > C_n > 0
        for (int i = 1; i <= m; ++i) {
            if (!(C(i) < C(i - 1)))
                throw ArbitrageError("call prices must be strictly decreasing at strike index " +
                                         std::to_string(i),
                                     i);
            if (!(C(i) > 0.0))
                throw ArbitrageError("call price must be positive at strike index " +
                                         std::to_string(i),
                                     i);
        }
        // convexity: spread slopes strictly increasing, including the
        // sentinel slopes -1 <= slope and slope < 0 at the far end
        for (int i = 1; i <= m; ++i) {
            if (!(spread_slope(i + 1) > spread_slope(i)))
                throw ArbitrageError("call prices not strictly convex around strike index " +
                                         std::to_string(i),
                                     i);
        }
        if (!(spread_slope(1) > -1.0))
            throw ArbitrageError("first call spread steeper than -1 (digital above 1)", 1);
        if (digitals) {
            for (int i = 1; i <= m; ++i) {
                const double lo = -spread_slope(i + 1);
                const double hi = -spread_slope(i);
                if (!(D(i) > lo && D(i) < hi))
                    throw ArbitrageError(
                        "digital at strike index " + std::to_string(i) +
                            " outside the open call-spread bounds (" + std::to_string(lo) +
                            ", " + std::to_string(hi) + ")",
                        i);
            }
        }
    }
};

}  // namespace entrofit

#endif  // ENTROFIT_OPTION_CHAIN_HPP
