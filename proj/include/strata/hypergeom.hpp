// hypergeom.hpp
//
// Hypergeometric law H(Npop, K, n): number of successes in a simple random
// sample of n units drawn without replacement from Npop units of which K are
// successes. All masses are evaluated in log space.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "strata/errors.hpp"
#include "strata/population.hpp"
#include "strata/random.hpp"

namespace strata {

struct HyperParams {
    count_t Npop;
    count_t K;
    count_t n;

    HyperParams(count_t population, count_t successes, count_t draws)
        : Npop(population), K(successes), n(draws) {
        if (Npop < 1) throw ValidationError("hypergeometric population must be >= 1");
        if (K < 0 || K > Npop) throw ValidationError("success count K must lie in [0, Npop]");
        if (n < 0 || n > Npop) throw ValidationError("sample size n must lie in [0, Npop]");
    }

    count_t support_min() const noexcept { return std::max<count_t>(0, n - (Npop - K)); }
    count_t support_max() const noexcept { return std::min(n, K); }
    bool in_support(count_t x) const noexcept { return x >= support_min() && x <= support_max(); }
};

namespace detail {

inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;

// Stirling-series remainder: lgamma(k+1) - [(k+1/2) log k - k + log sqrt(2 pi)].
inline double stirling_error(count_t k) {
    static const std::array<double, 16> small = [] {
        std::array<double, 16> t{};
        t[0] = 0.0; // unused: k == 0 never reaches the tail terms
        for (int i = 1; i < 16; ++i) {
            const double x = static_cast<double>(i);
            t[i] = std::lgamma(x + 1.0) - (x + 0.5) * std::log(x) + x - kLogSqrt2Pi;
        }
        return t;
    }();
    if (k < 16) return small[static_cast<std::size_t>(k)];
    const double nn = static_cast<double>(k);
    const double r = 1.0 / nn;
    const double r2 = r * r;
    constexpr double S0 = 1.0 / 12.0, S1 = 1.0 / 360.0, S2 = 1.0 / 1260.0, S3 = 1.0 / 1680.0,
                     S4 = 1.0 / 1188.0;
    if (k > 500) return (S0 - S1 * r2) * r;
    if (k > 80) return (S0 - (S1 - S2 * r2) * r2) * r;
    if (k > 35) return (S0 - (S1 - (S2 - S3 * r2) * r2) * r2) * r;
    return (S0 - (S1 - (S2 - (S3 - S4 * r2) * r2) * r2) * r2) * r;
}

// Deviance term x log(x/m) + m - x, evaluated without cancellation near x == m.
inline double binomial_deviance(double x, double m) {
    if (std::abs(x - m) < 0.1 * (x + m)) {
        const double v = (x - m) / (x + m);
        double s = (x - m) * v;
        double ej = 2.0 * x * v;
        const double v2 = v * v;
        for (int j = 1; j < 1000; ++j) {
            ej *= v2;
            const double s1 = s + ej / (2 * j + 1);
            if (s1 == s) return s1;
            s = s1;
        }
        return s;
    }
    return x * std::log(x / m) + m - x;
}

// log of the binomial mass C(size, x) p^x (1-p)^(size-x), with q = 1 - p
// supplied separately so that p = n/Npop keeps full precision on both sides.
inline double log_binom_mass(count_t x, count_t size, double p, double q) {
    if (p == 0.0) return x == 0 ? 0.0 : -INFINITY;
    if (q == 0.0) return x == size ? 0.0 : -INFINITY;
    const double nsz = static_cast<double>(size);
    if (x == 0) return size == 0 ? 0.0 : nsz * std::log(q);
    if (x == size) return nsz * std::log(p);
    const double xd = static_cast<double>(x);
    const double yd = nsz - xd;
    const double lc = stirling_error(size) - stirling_error(x) - stirling_error(size - x) -
                      binomial_deviance(xd, nsz * p) - binomial_deviance(yd, nsz * q);
    return lc + 0.5 * std::log(nsz / (2.0 * std::numbers::pi * xd * yd));
}

} // namespace detail

/// Natural log of P{X = x}. Throws DomainError when x is outside the support.
inline double log_pmf(const HyperParams& p, count_t x) {
    if (!p.in_support(x))
        throw DomainError("x=" + std::to_string(x) + " outside hypergeometric support [" +
                          std::to_string(p.support_min()) + ", " + std::to_string(p.support_max()) +
                          "]");
    if (p.support_min() == p.support_max()) return 0.0;
    // H(N,K,n)(x) = B(K,f)(x) * B(N-K,f)(n-x) / B(N,f)(n) with f = n/N;
    // the binomial factors cancel exactly and each is evaluated by its
    // saddle-point expansion, which keeps full relative precision at N ~ 1e8.
    const double Nd = static_cast<double>(p.Npop);
    const double f = static_cast<double>(p.n) / Nd;
    const double g = static_cast<double>(p.Npop - p.n) / Nd;
    return detail::log_binom_mass(x, p.K, f, g) +
           detail::log_binom_mass(p.n - x, p.Npop - p.K, f, g) -
           detail::log_binom_mass(p.n, p.Npop, f, g);
}

inline double pmf(const HyperParams& p, count_t x) { return std::exp(log_pmf(p, x)); }

/// Mode of the law, clamped into the support.
inline count_t mode(const HyperParams& p) {
    const double m = std::floor((static_cast<double>(p.n) + 1.0) * (static_cast<double>(p.K) + 1.0) /
                                (static_cast<double>(p.Npop) + 2.0));
    return std::clamp(static_cast<count_t>(m), p.support_min(), p.support_max());
}

/// P{X <= x}, clipped to [0, 1]. Sums whichever tail is shorter from the mode.
inline double cdf(const HyperParams& p, count_t x) {
    const count_t lo = p.support_min();
    const count_t hi = p.support_max();
    if (x < lo) return 0.0;
    if (x >= hi) return 1.0;
    double s = 0.0;
    if (x < mode(p)) {
        for (count_t t = x; t >= lo; --t) s += pmf(p, t);
    } else {
        for (count_t t = x + 1; t <= hi; ++t) s += pmf(p, t);
        s = 1.0 - s;
    }
    return std::clamp(s, 0.0, 1.0);
}

struct Moments {
    double mean;
    double variance;
};

inline Moments mean_var(const HyperParams& p) {
    const double Nd = static_cast<double>(p.Npop);
    const double nd = static_cast<double>(p.n);
    const double frac = static_cast<double>(p.K) / Nd;
    if (p.Npop <= 1 || p.n == p.Npop) return {nd * frac, 0.0};
    return {nd * frac, nd * frac * (1.0 - frac) * (Nd - nd) / (Nd - 1.0)};
}

/// Exact hypergeometric sampler by inverse transform. Outcomes are visited
/// from the mode outward, always stepping to the more probable neighbour, so
/// the expected number of steps is O(sd). The visiting order is a function of
/// the parameters only, which keeps the law exact.
class HypergeometricSampler {
public:
    explicit HypergeometricSampler(const HyperParams& p)
        : p_(p), lo_(p.support_min()), hi_(p.support_max()), mode_(mode(p)),
          mode_mass_(pmf(p, mode_)), bad_(p.Npop - p.K) {}

    const HyperParams& params() const noexcept { return p_; }

    template <class Engine>
    count_t operator()(Engine& eng) const {
        if (lo_ == hi_) return lo_;
        double u = uniform01(eng) - mode_mass_;
        if (u < 0.0) return mode_;
        count_t down = mode_, up = mode_;
        double p_down = mode_mass_, p_up = mode_mass_;
        double next_down = down > lo_ ? p_down * ratio_down(down) : -1.0;
        double next_up = up < hi_ ? p_up * ratio_up(up) : -1.0;
        while (next_down >= 0.0 || next_up >= 0.0) {
            if (next_down >= next_up) {
                --down;
                p_down = next_down;
                u -= p_down;
                if (u < 0.0) return down;
                next_down = down > lo_ ? p_down * ratio_down(down) : -1.0;
            } else {
                ++up;
                p_up = next_up;
                u -= p_up;
                if (u < 0.0) return up;
                next_up = up < hi_ ? p_up * ratio_up(up) : -1.0;
            }
        }
        // Rounding left a residue beyond the total mass.
        return mode_;
    }

private:
    // P(x+1)/P(x)
    double ratio_up(count_t x) const {
        return (static_cast<double>(p_.K - x) * static_cast<double>(p_.n - x)) /
               (static_cast<double>(x + 1) * static_cast<double>(bad_ - p_.n + x + 1));
    }
    // P(x-1)/P(x)
    double ratio_down(count_t x) const {
        return (static_cast<double>(x) * static_cast<double>(bad_ - p_.n + x)) /
               (static_cast<double>(p_.K - x + 1) * static_cast<double>(p_.n - x + 1));
    }

    HyperParams p_;
    count_t lo_;
    count_t hi_;
    count_t mode_;
    double mode_mass_;
    count_t bad_;
};

template <class Engine>
inline count_t sample(const HyperParams& p, Engine& eng) {
    return HypergeometricSampler(p)(eng);
}

} // namespace strata
