// population.hpp
//
// Domain types for a population split into two strata: sizes, weights,
// sampling costs, allocations, true states and observed outcomes.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "strata/errors.hpp"

namespace strata {

using count_t = std::int64_t;

/// Two-stratum finite population. By default the weights are N_h/N at full
/// precision; `with_weights` pins w1 (and w2 = 1 - w1) to a stated value, as
/// when reproducing figures computed from rounded weights.
class StratifiedDesign {
public:
    StratifiedDesign(count_t n1_pop, count_t n2_pop) : N1_(n1_pop), N2_(n2_pop) {
        if (n1_pop < 1) throw ValidationError("N1 must be a positive integer, got " + std::to_string(n1_pop));
        if (n2_pop < 1) throw ValidationError("N2 must be a positive integer, got " + std::to_string(n2_pop));
        N_ = N1_ + N2_;
        w1_ = static_cast<double>(N1_) / static_cast<double>(N_);
        w2_ = static_cast<double>(N2_) / static_cast<double>(N_);
    }

    static StratifiedDesign with_weights(count_t n1_pop, count_t n2_pop, double w1) {
        if (!(w1 > 0.0 && w1 < 1.0)) throw ValidationError("w1 must lie in (0, 1)");
        StratifiedDesign d(n1_pop, n2_pop);
        d.w1_ = w1;
        d.w2_ = 1.0 - w1;
        d.exact_weights_ = false;
        return d;
    }

    /// Weights rounded to `decimals` places (w2 = 1 - w1).
    static StratifiedDesign with_rounded_weights(count_t n1_pop, count_t n2_pop, int decimals) {
        if (decimals < 0 || decimals > 15) throw ValidationError("weight decimals must lie in [0, 15]");
        const StratifiedDesign exact(n1_pop, n2_pop);
        const double scale = std::pow(10.0, decimals);
        return with_weights(n1_pop, n2_pop, std::round(exact.w1() * scale) / scale);
    }

    count_t N1() const noexcept { return N1_; }
    count_t N2() const noexcept { return N2_; }
    count_t N() const noexcept { return N_; }
    double w1() const noexcept { return w1_; }
    double w2() const noexcept { return w2_; }
    /// True when w_h = N_h / N.
    bool exact_weights() const noexcept { return exact_weights_; }

    count_t stratum_size(int h) const noexcept { return h == 1 ? N1_ : N2_; }
    double weight(int h) const noexcept { return h == 1 ? w1_ : w2_; }

    friend bool operator==(const StratifiedDesign&, const StratifiedDesign&) = default;

private:
    count_t N1_;
    count_t N2_;
    count_t N_{};
    double w1_{};
    double w2_{};
    bool exact_weights_ = true;
};

inline StratifiedDesign make_design(count_t n1_pop, count_t n2_pop) {
    return StratifiedDesign(n1_pop, n2_pop);
}

/// Per-unit costs c1, c2 and total budget C.
struct CostModel {
    double c1;
    double c2;
    double budget;

    CostModel(double unit_cost1, double unit_cost2, double total)
        : c1(unit_cost1), c2(unit_cost2), budget(total) {
        if (!(c1 > 0.0) || !std::isfinite(c1)) throw ValidationError("c1 must be a positive real");
        if (!(c2 > 0.0) || !std::isfinite(c2)) throw ValidationError("c2 must be a positive real");
        if (!(budget > 0.0) || !std::isfinite(budget)) throw ValidationError("budget must be a positive real");
        if (budget < c1 + c2)
            throw BudgetError("budget " + std::to_string(budget) +
                              " cannot afford one unit in each stratum (c1 + c2 = " +
                              std::to_string(c1 + c2) + ")");
    }

    double cost_of(count_t n1, count_t n2) const noexcept {
        return c1 * static_cast<double>(n1) + c2 * static_cast<double>(n2);
    }

    friend bool operator==(const CostModel&, const CostModel&) = default;
};

/// Relative slack used when comparing spend against budget, so that
/// rescaling (c1, c2, C) by a common factor does not flip feasibility.
inline constexpr double kBudgetSlack = 1e-12;

/// Largest stratum-2 sample affordable after buying n1 units in stratum 1.
/// May be < 1 when n1 exhausts the budget.
inline count_t affordable_n2(count_t n1, const CostModel& cost) {
    const double remaining = (cost.budget - cost.c1 * static_cast<double>(n1)) / cost.c2;
    return static_cast<count_t>(std::floor(remaining + 1e-9 * std::max(1.0, std::abs(remaining))));
}

struct Allocation {
    count_t n1;
    count_t n2;

    friend bool operator==(const Allocation&, const Allocation&) = default;
};

struct AllocationCheck {
    bool ok = true;
    double cost = 0.0;
    std::vector<std::string> diagnostics;

    explicit operator bool() const noexcept { return ok; }
};

/// Checks stratum bounds and budget feasibility; lists every violation.
inline AllocationCheck validate_allocation(const Allocation& alloc, const StratifiedDesign& design,
                                           const CostModel& cost) {
    AllocationCheck out;
    out.cost = cost.cost_of(alloc.n1, alloc.n2);
    auto fail = [&out](std::string msg) {
        out.ok = false;
        out.diagnostics.push_back(std::move(msg));
    };
    if (alloc.n1 < 1) fail("n1 below minimum 1");
    if (alloc.n2 < 1) fail("n2 below minimum 1");
    if (alloc.n1 > design.N1())
        fail("n1 exceeds stratum size N1=" + std::to_string(design.N1()));
    if (alloc.n2 > design.N2())
        fail("n2 exceeds stratum size N2=" + std::to_string(design.N2()));
    if (out.cost > cost.budget * (1.0 + kBudgetSlack))
        fail("cost " + std::to_string(out.cost) + " exceeds budget " + std::to_string(cost.budget));
    return out;
}

/// Bounds-only check used where no cost model applies (e.g. estimation).
inline void require_within_design(const Allocation& alloc, const StratifiedDesign& design) {
    if (alloc.n1 < 1 || alloc.n1 > design.N1())
        throw ValidationError("n1 must lie in [1, N1], got " + std::to_string(alloc.n1));
    if (alloc.n2 < 1 || alloc.n2 > design.N2())
        throw ValidationError("n2 must lie in [1, N2], got " + std::to_string(alloc.n2));
}

/// True population state. `M`/`M1` are present when built from counts.
struct TrueState {
    double theta;
    double theta1;
    double theta2;
    std::optional<count_t> M;
    std::optional<count_t> M1;

    static TrueState from_counts(count_t m1, count_t m2, const StratifiedDesign& design) {
        if (m1 < 0 || m1 > design.N1())
            throw ValidationError("M1 must lie in [0, N1], got " + std::to_string(m1));
        if (m2 < 0 || m2 > design.N2())
            throw ValidationError("M2 must lie in [0, N2], got " + std::to_string(m2));
        const count_t m = m1 + m2;
        return TrueState{static_cast<double>(m) / static_cast<double>(design.N()),
                         static_cast<double>(m1) / static_cast<double>(design.N1()),
                         static_cast<double>(m2) / static_cast<double>(design.N2()), m, m1};
    }

    static TrueState from_fractions(double theta1, double theta2, const StratifiedDesign& design) {
        if (!(theta1 >= 0.0 && theta1 <= 1.0)) throw ValidationError("theta1 must lie in [0, 1]");
        if (!(theta2 >= 0.0 && theta2 <= 1.0)) throw ValidationError("theta2 must lie in [0, 1]");
        return TrueState{design.w1() * theta1 + design.w2() * theta2, theta1, theta2, std::nullopt,
                         std::nullopt};
    }

    count_t M2() const { return M && M1 ? *M - *M1 : -1; }
};

struct SurveyOutcome {
    count_t xi1;
    count_t xi2;
    std::optional<count_t> xi; // classical (unstratified) count
};

inline void require_outcome_within(const SurveyOutcome& out, const Allocation& alloc) {
    if (out.xi1 < 0 || out.xi1 > alloc.n1)
        throw ValidationError("xi1 must lie in [0, n1], got " + std::to_string(out.xi1));
    if (out.xi2 < 0 || out.xi2 > alloc.n2)
        throw ValidationError("xi2 must lie in [0, n2], got " + std::to_string(out.xi2));
}

} // namespace strata
