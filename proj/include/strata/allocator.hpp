// allocator.hpp
//
// Budget-constrained sample allocation: the budget-equivalent classical
// sample size, the closed-form branch for small w1, and the minimax search.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "strata/errors.hpp"
#include "strata/population.hpp"
#include "strata/variance.hpp"

namespace strata {

/// Branch threshold on w1 between the closed-form and numerical solutions.
inline constexpr double kW1Star = 0.46;

enum class AllocationMethod { closed_form, numerical_minimax };

inline std::string_view to_string(AllocationMethod m) {
    return m == AllocationMethod::closed_form ? "closed_form" : "numerical_minimax";
}

struct ClosedFormN1 {
    double value;
    bool valid;
};

struct AllocationResult {
    Allocation alloc;
    double cost;
    double worst_theta;
    double worst_variance;
    AllocationMethod method = AllocationMethod::numerical_minimax;
    std::optional<ClosedFormN1> closed_form;
    double w1_star = kW1Star;
};

/// n_c = floor(C / (w1 c1 + w2 c2)).
inline count_t classical_sample_size(const StratifiedDesign& d, const CostModel& cost) {
    const double raw = cost.budget / (d.w1() * cost.c1 + d.w2() * cost.c2);
    const auto nc = static_cast<count_t>(std::floor(raw + 1e-9 * raw));
    if (nc < 1) throw BudgetError("budget buys no classical sample");
    return std::min(nc, d.N());
}

/// Literal evaluation of the closed-form n1 for w1 < w1*:
///   C sqrt(N2-1) w1 / (c1 sqrt(N2-1) w1 - sqrt(c1 c2 w2 (N (w1^2 - 3 w1 + 1.5) - w1))).
/// `valid` is false when the value is non-finite, below 1, or unaffordable.
inline ClosedFormN1 closed_form_n1(const StratifiedDesign& d, const CostModel& cost) {
    const double w1 = d.w1(), w2 = d.w2();
    if (!(w1 < kW1Star))
        throw BranchError("closed form applies only for w1 < " + std::to_string(kW1Star) +
                          " (w1=" + std::to_string(w1) + "); use optimal_allocation");
    const double N = static_cast<double>(d.N());
    const double root_n2 = std::sqrt(static_cast<double>(d.N2()) - 1.0);
    const double radicand = cost.c1 * cost.c2 * w2 * (N * (w1 * w1 - 3.0 * w1 + 1.5) - w1);
    const double numer = cost.budget * root_n2 * w1;
    const double denom = cost.c1 * root_n2 * w1 - std::sqrt(radicand);
    const double value = numer / denom;
    const double max_n1 = std::floor((cost.budget - cost.c2) / cost.c1);
    const bool valid = std::isfinite(value) && value >= 1.0 && value <= max_n1 &&
                       value <= static_cast<double>(d.N1());
    return {value, valid};
}

namespace detail {
struct Candidate {
    Allocation alloc;
    WorstCase worst;
};

inline bool better(const Candidate& a, const Candidate& b) {
    if (a.worst.variance != b.worst.variance) return a.worst.variance < b.worst.variance;
    return a.alloc.n1 < b.alloc.n1;
}
} // namespace detail

/// Every n1 the budget admits, paired with n2 = floor((C - c1 n1)/c2)
/// clipped to [1, N2].
inline std::vector<Allocation> feasible_allocations(const StratifiedDesign& d, const CostModel& cost) {
    const double top = std::floor((cost.budget - cost.c2) / cost.c1 + 1e-9);
    const count_t n1_max = std::min<count_t>(d.N1(), static_cast<count_t>(top));
    std::vector<Allocation> out;
    for (count_t n1 = 1; n1 <= n1_max; ++n1) {
        const count_t n2 = std::clamp<count_t>(affordable_n2(n1, cost), 1, d.N2());
        out.push_back({n1, n2});
    }
    return out;
}

/// Minimax allocation: the n1 whose worst-case averaged variance is smallest,
/// found by exhaustive scan (ties go to the smaller n1). `workers` > 1 splits
/// the scan across threads; the result does not depend on the split.
inline AllocationResult optimal_allocation(const StratifiedDesign& d, const CostModel& cost,
                                           int grid = kDefaultThetaGrid, unsigned workers = 1) {
    const std::vector<Allocation> cands = feasible_allocations(d, cost);
    if (cands.empty()) throw BudgetError("no feasible allocation for this budget");

    std::vector<WorstCase> worst(cands.size());
    auto scan = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < cands.size(); i += stride) worst[i] = worst_theta(cands[i], d, grid);
    };
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(cands.size())));
    if (workers == 1) {
        scan(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(scan, w, workers);
    }

    detail::Candidate best{cands[0], worst[0]};
    for (std::size_t i = 1; i < cands.size(); ++i) {
        const detail::Candidate c{cands[i], worst[i]};
        if (detail::better(c, best)) best = c;
    }

    AllocationResult res{best.alloc, cost.cost_of(best.alloc.n1, best.alloc.n2), best.worst.theta,
                         best.worst.variance, AllocationMethod::numerical_minimax, std::nullopt};
    if (d.w1() < kW1Star) res.closed_form = closed_form_n1(d, cost);
    return res;
}

} // namespace strata
