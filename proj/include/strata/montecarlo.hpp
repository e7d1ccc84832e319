// montecarlo.hpp
//
// Simulation of stratified (and optionally classical) surveys drawn from the
// exact hypergeometric laws, for checking bias and variance empirically.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "strata/errors.hpp"
#include "strata/hypergeom.hpp"
#include "strata/population.hpp"
#include "strata/random.hpp"
#include "strata/variance.hpp"

namespace strata {

inline constexpr count_t kMinReplicates = 100;

struct SimulationConfig {
    StratifiedDesign design;
    Allocation alloc;
    TrueState truth;
    count_t replicates = 100000;
    std::uint64_t seed = 0;
    std::optional<count_t> classical_n;
    unsigned workers = 1;
};

struct SimulationResult {
    count_t replicates;
    count_t M1; // snapped success counts actually simulated
    count_t M2;
    double theta1; // M1/N1
    double theta2; // M2/N2
    double theta;  // w1 theta1 + w2 theta2
    double mean_w;
    double var_w;
    double se_mean_w;
    double analytic_var_w;
    std::optional<double> mean_c;
    std::optional<double> var_c;
    std::optional<double> analytic_var_c;
};

/// Fractions snapped to integer counts M_h = round(theta_h N_h); counts given
/// explicitly in `truth` take precedence.
inline TrueState snap_truth(const TrueState& truth, const StratifiedDesign& d) {
    if (truth.M && truth.M1) return TrueState::from_counts(*truth.M1, *truth.M - *truth.M1, d);
    if (!(truth.theta1 >= 0.0 && truth.theta1 <= 1.0) || !(truth.theta2 >= 0.0 && truth.theta2 <= 1.0))
        throw ValidationError("true stratum fractions must lie in [0, 1]");
    const auto m1 = static_cast<count_t>(std::llround(truth.theta1 * static_cast<double>(d.N1())));
    const auto m2 = static_cast<count_t>(std::llround(truth.theta2 * static_cast<double>(d.N2())));
    return TrueState::from_counts(m1, m2, d);
}

namespace detail {
// Pairwise sum; the tree depends only on the length, so the result is the
// same however the values were produced.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 16) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct SampleMoments {
    double mean;
    double var; // unbiased (divisor R - 1)
};

// Moments about the first value, so a constant sample has variance exactly 0.
inline SampleMoments moments(std::span<const double> v) {
    if (v.empty()) return {0.0, 0.0};
    const double n = static_cast<double>(v.size());
    const double origin = v.front();
    std::vector<double> dev(v.size());
    std::transform(v.begin(), v.end(), dev.begin(), [origin](double x) { return x - origin; });
    const double shift = pairwise_sum(dev) / n;
    std::transform(dev.begin(), dev.end(), dev.begin(), [shift](double x) { return (x - shift) * (x - shift); });
    return {origin + shift, v.size() > 1 ? pairwise_sum(dev) / (n - 1.0) : 0.0};
}
} // namespace detail

inline SimulationResult run_simulation(const SimulationConfig& cfg) {
    const StratifiedDesign& d = cfg.design;
    if (cfg.replicates < kMinReplicates)
        throw ValidationError("replicates must be >= " + std::to_string(kMinReplicates));
    require_within_design(cfg.alloc, d);
    if (cfg.classical_n && (*cfg.classical_n < 1 || *cfg.classical_n > d.N()))
        throw ValidationError("classical sample size must lie in [1, N]");

    const TrueState truth = snap_truth(cfg.truth, d);
    const count_t m1 = *truth.M1;
    const count_t m2 = truth.M2();
    const HypergeometricSampler draw1(HyperParams(d.N1(), m1, cfg.alloc.n1));
    const HypergeometricSampler draw2(HyperParams(d.N2(), m2, cfg.alloc.n2));
    std::optional<HypergeometricSampler> draw_c;
    if (cfg.classical_n) draw_c.emplace(HyperParams(d.N(), m1 + m2, *cfg.classical_n));

    const auto R = static_cast<std::size_t>(cfg.replicates);
    std::vector<double> est_w(R);
    std::vector<double> est_c(draw_c ? R : 0);
    const double a1 = d.w1() / static_cast<double>(cfg.alloc.n1);
    const double a2 = d.w2() / static_cast<double>(cfg.alloc.n2);

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            RandomStream rng = substream(cfg.seed, r);
            const count_t x1 = draw1(rng);
            const count_t x2 = draw2(rng);
            est_w[r] = a1 * static_cast<double>(x1) + a2 * static_cast<double>(x2);
            if (draw_c) est_c[r] = static_cast<double>((*draw_c)(rng)) / static_cast<double>(*cfg.classical_n);
        }
    };
    const unsigned workers = std::clamp<unsigned>(cfg.workers, 1u, 64u);
    if (workers == 1) {
        work(0, R);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (R + workers - 1) / workers;
        for (std::size_t b = 0; b < R; b += chunk) pool.emplace_back(work, b, std::min(R, b + chunk));
    }

    const auto mw = detail::moments(est_w);
    SimulationResult res{};
    res.replicates = cfg.replicates;
    res.M1 = m1;
    res.M2 = m2;
    res.theta1 = truth.theta1;
    res.theta2 = truth.theta2;
    res.theta = d.w1() * truth.theta1 + d.w2() * truth.theta2;
    res.mean_w = mw.mean;
    res.var_w = mw.var;
    res.se_mean_w = std::sqrt(mw.var / static_cast<double>(R));
    res.analytic_var_w = stratified_variance_exact(truth.theta1, truth.theta2, cfg.alloc, d);
    if (draw_c) {
        const auto mc = detail::moments(est_c);
        res.mean_c = mc.mean;
        res.var_c = mc.var;
        res.analytic_var_c = classical_variance(static_cast<double>(m1 + m2) / static_cast<double>(d.N()),
                                                *cfg.classical_n, d.N());
    }
    return res;
}

/// Verdicts used by the acceptance runs: bias within `sigmas` Monte Carlo
/// standard errors, and empirical variance within `rel_tol` of the analytic one.
struct SimulationVerdict {
    bool unbiased;
    bool variance_matches;
    double bias_in_se;
    double variance_rel_error;
};

inline SimulationVerdict judge(const SimulationResult& r, double sigmas = 3.0, double rel_tol = 0.03) {
    SimulationVerdict v{};
    const double bias = r.mean_w - r.theta;
    if (r.se_mean_w > 0.0) {
        v.bias_in_se = bias / r.se_mean_w;
        v.unbiased = std::abs(bias) <= sigmas * r.se_mean_w;
    } else {
        v.bias_in_se = 0.0;
        v.unbiased = std::abs(bias) <= 1e-12;
    }
    if (r.analytic_var_w > 0.0) {
        v.variance_rel_error = r.var_w / r.analytic_var_w - 1.0;
        v.variance_matches = std::abs(v.variance_rel_error) <= rel_tol;
    } else {
        v.variance_rel_error = 0.0;
        v.variance_matches = r.var_w == 0.0;
    }
    return v;
}

} // namespace strata
