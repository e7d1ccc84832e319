// estimator.hpp
//
// Point estimates and plug-in variance estimates for observed outcomes.
#pragma once

#include <optional>
#include <string>

#include "strata/errors.hpp"
#include "strata/population.hpp"
#include "strata/variance.hpp"

namespace strata {

struct EstimateReport {
    double theta_hat_w;
    double v_hat_w;
    std::optional<double> theta_hat_c;
    std::optional<double> v_hat_c;
    std::optional<double> reduction_pct;
};

/// w1 xi1/n1 + w2 xi2/n2. Never clipped; bad counts are rejected.
inline double stratified_estimate(const SurveyOutcome& out, const Allocation& alloc, const StratifiedDesign& d) {
    require_within_design(alloc, d);
    require_outcome_within(out, alloc);
    return d.w1() * static_cast<double>(out.xi1) / static_cast<double>(alloc.n1) +
           d.w2() * static_cast<double>(out.xi2) / static_cast<double>(alloc.n2);
}

inline double classical_estimate(count_t xi, count_t n_c) {
    if (n_c < 1) throw ValidationError("n_c must be >= 1");
    if (xi < 0 || xi > n_c) throw ValidationError("xi must lie in [0, n_c], got " + std::to_string(xi));
    return static_cast<double>(xi) / static_cast<double>(n_c);
}

/// p(1-p)/n_c * (N-n_c)/(N-1) with p = xi/n_c.
inline double classical_variance_estimate(count_t xi, count_t n_c, const StratifiedDesign& d) {
    if (n_c > d.N()) throw ValidationError("n_c exceeds population size N");
    const double p = classical_estimate(xi, n_c);
    return p * (1.0 - p) * fpc_over_n(n_c, d.N());
}

/// Sum over strata of w_h^2 p_h(1-p_h)/n_h * (N_h-n_h)/(N_h-1), p_h = xi_h/n_h.
/// Divides by n_h, not n_h - 1.
inline double stratified_variance_estimate(const SurveyOutcome& out, const Allocation& alloc,
                                           const StratifiedDesign& d) {
    require_within_design(alloc, d);
    require_outcome_within(out, alloc);
    const double p1 = static_cast<double>(out.xi1) / static_cast<double>(alloc.n1);
    const double p2 = static_cast<double>(out.xi2) / static_cast<double>(alloc.n2);
    const double w1 = d.w1(), w2 = d.w2();
    return w1 * w1 * p1 * (1.0 - p1) * fpc_over_n(alloc.n1, d.N1()) +
           w2 * w2 * p2 * (1.0 - p2) * fpc_over_n(alloc.n2, d.N2());
}

/// Relative variance reduction in percent, (1 - v_w/v_c) * 100. May be negative.
inline double reduction(double v_w, double v_c) {
    if (!(v_c > 0.0)) throw DomainError("reduction: classical variance must be > 0");
    if (!(v_w >= 0.0)) throw DomainError("reduction: stratified variance must be >= 0");
    return (1.0 - v_w / v_c) * 100.0;
}

/// Full report; the classical side is filled when both `xi` and `n_c` are given.
/// The reduction is omitted when the classical variance estimate is zero.
inline EstimateReport estimate(const SurveyOutcome& out, const Allocation& alloc, const StratifiedDesign& d,
                               std::optional<count_t> n_c = std::nullopt) {
    EstimateReport rep{stratified_estimate(out, alloc, d), stratified_variance_estimate(out, alloc, d),
                       std::nullopt, std::nullopt, std::nullopt};
    if (out.xi.has_value() != n_c.has_value())
        throw ValidationError("classical comparison needs both xi and n_c");
    if (out.xi && n_c) {
        rep.theta_hat_c = classical_estimate(*out.xi, *n_c);
        rep.v_hat_c = classical_variance_estimate(*out.xi, *n_c, d);
        if (*rep.v_hat_c > 0.0) rep.reduction_pct = reduction(rep.v_hat_w, *rep.v_hat_c);
    }
    return rep;
}

} // namespace strata
