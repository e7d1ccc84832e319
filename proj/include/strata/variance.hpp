// variance.hpp
//
// Variance of the classical and stratified proportion estimators, the set of
// stratum-1 fractions compatible with an overall fraction, and the variance
// averaged over that set.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "strata/errors.hpp"
#include "strata/population.hpp"

namespace strata {

/// Finite population correction divided by the sample size:
/// (Npop - n) / ((Npop - 1) n). A one-unit population is its own census.
inline double fpc_over_n(count_t n, count_t Npop) {
    if (Npop <= 1 || n >= Npop) return 0.0;
    const double nd = static_cast<double>(n);
    const double Nd = static_cast<double>(Npop);
    return (Nd - nd) / ((Nd - 1.0) * nd);
}

/// Var(xi / n) for xi ~ H(Npop, theta Npop, n).
inline double classical_variance(double theta, count_t n, count_t Npop) {
    if (n < 1) throw ValidationError("classical_variance: n must be >= 1");
    if (Npop < 1) throw ValidationError("classical_variance: Npop must be >= 1");
    if (n > Npop)
        throw DomainError("classical_variance: n=" + std::to_string(n) + " exceeds Npop=" + std::to_string(Npop));
    if (!(theta >= 0.0 && theta <= 1.0)) throw ValidationError("classical_variance: theta must lie in [0, 1]");
    return theta * (1.0 - theta) * fpc_over_n(n, Npop);
}

/// Admissible stratum-1 counts M1 for a given overall fraction theta.
struct NuisanceRange {
    double a_theta;
    double b_theta;
    count_t M1_lo;
    count_t M1_hi;
    count_t L;
};

namespace detail {
inline double snap_to_integer(double t) {
    const double r = std::round(t);
    return std::abs(t - r) <= 1e-12 * std::max(1.0, std::abs(t)) ? r : t;
}

// theta * N, snapped to an integer when it is one up to rounding.
inline double success_count(double theta, const StratifiedDesign& d) {
    return snap_to_integer(theta * static_cast<double>(d.N()));
}

// theta2 = (theta - w1 M1/N1) / w2. With exact weights this is (theta N - M1)/N2,
// which keeps theta2 = 1 exactly at theta = 1.
inline double stratum2_fraction(double theta, double m1, const StratifiedDesign& d) {
    if (d.exact_weights()) return (success_count(theta, d) - m1) / static_cast<double>(d.N2());
    return (theta - d.w1() * m1 / static_cast<double>(d.N1())) / d.w2();
}
} // namespace detail

/// a_theta = max(0, (theta - w2)/w1), b_theta = min(1, theta/w1), and the
/// integer grid M1 in [ceil(a N1), floor(b N1)]. With exact weights
/// a N1 = theta N - N2 and b N1 = theta N, so the grid comes from theta N in
/// integer arithmetic.
inline NuisanceRange nuisance_range(double theta, const StratifiedDesign& d) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw ValidationError("nuisance_range: theta must lie in [0, 1]");
    const double a = std::max(0.0, (theta - d.w2()) / d.w1());
    const double b = std::min(1.0, theta / d.w1());
    double lo_edge, hi_edge;
    if (d.exact_weights()) {
        const double m = detail::success_count(theta, d);
        lo_edge = m - static_cast<double>(d.N2());
        hi_edge = m;
    } else {
        lo_edge = detail::snap_to_integer(a * static_cast<double>(d.N1()));
        hi_edge = detail::snap_to_integer(b * static_cast<double>(d.N1()));
    }
    const auto lo = std::max<count_t>(0, static_cast<count_t>(std::ceil(lo_edge)));
    const auto hi = std::min<count_t>(d.N1(), static_cast<count_t>(std::floor(hi_edge)));
    return NuisanceRange{a, b, lo, hi, hi - lo + 1};
}

/// Var(theta_hat_w) at fixed (theta1, theta2):
/// w1^2 theta1(1-theta1) fpc1/n1 + w2^2 theta2(1-theta2) fpc2/n2.
inline double stratified_variance_exact(double theta1, double theta2, const Allocation& alloc,
                                        const StratifiedDesign& d) {
    require_within_design(alloc, d);
    if (!(theta1 >= 0.0 && theta1 <= 1.0)) throw ValidationError("theta1 must lie in [0, 1]");
    if (!(theta2 >= 0.0 && theta2 <= 1.0)) throw ValidationError("theta2 must lie in [0, 1]");
    const double w1 = d.w1(), w2 = d.w2();
    return w1 * w1 * theta1 * (1.0 - theta1) * fpc_over_n(alloc.n1, d.N1()) +
           w2 * w2 * theta2 * (1.0 - theta2) * fpc_over_n(alloc.n2, d.N2());
}

/// Allocation induced by spending the rest of the budget in stratum 2.
/// Throws DomainError when that allocation is infeasible.
inline Allocation budget_allocation(count_t n1, const StratifiedDesign& d, const CostModel& cost) {
    const Allocation alloc{n1, affordable_n2(n1, cost)};
    if (alloc.n1 < 1 || alloc.n1 > d.N1())
        throw DomainError("n1=" + std::to_string(n1) + " outside [1, N1]");
    if (alloc.n2 < 1)
        throw DomainError("n1=" + std::to_string(n1) + " leaves no budget for stratum 2");
    if (alloc.n2 > d.N2())
        throw DomainError("n1=" + std::to_string(n1) + " implies n2=" + std::to_string(alloc.n2) +
                          " above N2=" + std::to_string(d.N2()));
    return alloc;
}

/// Variance averaged uniformly over the admissible theta1 grid, for an
/// explicit allocation.
///
/// The bracket g(M1) is quadratic in M1, so its mean over consecutive
/// integers is g(mean) + g''/2 * var with mean = (lo+hi)/2 and
/// var = (L^2 - 1)/12. Both strata contribute curvature through theta1 and
/// theta2 = (theta - w1 theta1)/w2, giving g''/2 = -(w1/N1)^2 (f1 + f2)
/// where f_h = fpc_h / n_h.
inline double averaged_variance(double theta, const Allocation& alloc, const StratifiedDesign& d) {
    require_within_design(alloc, d);
    const NuisanceRange r = nuisance_range(theta, d);
    const double f1 = fpc_over_n(alloc.n1, d.N1());
    const double f2 = fpc_over_n(alloc.n2, d.N2());
    const double N1 = static_cast<double>(d.N1());
    const double Ld = static_cast<double>(r.L);
    const double centre = 0.5 * (static_cast<double>(r.M1_lo) + static_cast<double>(r.M1_hi));
    const double spread = (Ld * Ld - 1.0) / 12.0;

    const double t1 = centre / N1;
    const double t2 = detail::stratum2_fraction(theta, centre, d);
    const double w1 = d.w1(), w2 = d.w2();
    const double at_centre = w1 * w1 * f1 * t1 * (1.0 - t1) + w2 * w2 * f2 * t2 * (1.0 - t2);
    const double slope = w1 / N1;
    const double v = at_centre - spread * slope * slope * (f1 + f2);
    return std::max(0.0, v);
}

/// Cost-driven form: n2 = floor((C - c1 n1) / c2).
inline double averaged_variance(double theta, count_t n1, const StratifiedDesign& d, const CostModel& cost) {
    return averaged_variance(theta, budget_allocation(n1, d, cost), d);
}

/// Term-by-term summation of the averaged variance over the admissible grid.
/// Independent of the closed form above; meant for N1 up to ~1e5.
inline double averaged_variance_bruteforce(double theta, const Allocation& alloc, const StratifiedDesign& d) {
    require_within_design(alloc, d);
    const NuisanceRange r = nuisance_range(theta, d);
    const double w1 = d.w1(), w2 = d.w2();
    const double N1 = static_cast<double>(d.N1());
    const double n1 = static_cast<double>(alloc.n1);
    const double n2 = static_cast<double>(alloc.n2);
    const double fpc1 = d.N1() > 1 ? (N1 - n1) / (N1 - 1.0) : 0.0;
    const double N2 = static_cast<double>(d.N2());
    const double fpc2 = d.N2() > 1 ? (N2 - n2) / (N2 - 1.0) : 0.0;

    // Neumaier-compensated sum.
    double sum = 0.0, comp = 0.0;
    for (count_t M1 = r.M1_lo; M1 <= r.M1_hi; ++M1) {
        const double theta1 = static_cast<double>(M1) / N1;
        const double theta2 = (theta - w1 * theta1) / w2;
        const double term = w1 * w1 / n1 * theta1 * (1.0 - theta1) * fpc1 +
                            w2 * w2 / n2 * theta2 * (1.0 - theta2) * fpc2;
        const double t = sum + term;
        comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return (sum + comp) / static_cast<double>(r.L);
}

inline double averaged_variance_bruteforce(double theta, count_t n1, const StratifiedDesign& d,
                                           const CostModel& cost) {
    return averaged_variance_bruteforce(theta, budget_allocation(n1, d, cost), d);
}

struct WorstCase {
    double theta;
    double variance;
};

inline constexpr int kDefaultThetaGrid = 1000;
inline constexpr double kGoldenTolerance = 1e-6;

/// Maximiser of the averaged variance over theta in [0, 1]: uniform grid of
/// grid+1 points (lowest theta wins ties), then golden-section refinement on
/// the two cells around the best grid point.
inline WorstCase worst_theta(const Allocation& alloc, const StratifiedDesign& d, int grid = kDefaultThetaGrid) {
    if (grid < 1) throw ValidationError("worst_theta: grid must be a positive integer");
    require_within_design(alloc, d);
    auto f = [&](double t) { return averaged_variance(t, alloc, d); };

    int best_i = 0;
    double best_v = f(0.0);
    for (int i = 1; i <= grid; ++i) {
        const double v = f(static_cast<double>(i) / grid);
        if (v > best_v) {
            best_v = v;
            best_i = i;
        }
    }
    WorstCase out{static_cast<double>(best_i) / grid, best_v};

    double a = static_cast<double>(std::max(best_i - 1, 0)) / grid;
    double b = static_cast<double>(std::min(best_i + 1, grid)) / grid;
    constexpr double inv_phi = 0.618033988749894848204586834366;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > kGoldenTolerance) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    const double t = 0.5 * (a + b);
    const double vt = f(t);
    if (vt > out.variance) out = {t, vt};
    return out;
}

inline WorstCase worst_theta(count_t n1, const StratifiedDesign& d, const CostModel& cost,
                             int grid = kDefaultThetaGrid) {
    return worst_theta(budget_allocation(n1, d, cost), d, grid);
}

} // namespace strata
