#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "strata/estimator.hpp"

using namespace strata;
using Catch::Approx;

namespace {

const StratifiedDesign& poll() {
    static const StratifiedDesign d = make_design(14526524, 16182757);
    return d;
}

const Allocation kAlloc{242, 474};

} // namespace

TEST_CASE("stratified estimate and variance for (10, 128)", "[estimator]") {
    const SurveyOutcome out{10, 128, std::nullopt};
    CHECK(stratified_estimate(out, kAlloc, poll()) == Approx(0.16185).epsilon(1e-4));
    const double v = stratified_variance_estimate(out, kAlloc, poll());
    CHECK(v == Approx(1.521e-4).epsilon(1e-3));
    CHECK(std::abs(v / 1.516e-4 - 1.0) <= 0.01);
}

TEST_CASE("stratified variance for (20, 111)", "[estimator]") {
    const double v = stratified_variance_estimate({20, 111, std::nullopt}, kAlloc, poll());
    CHECK(v == Approx(1.7516e-4).epsilon(1e-4));
    CHECK(std::abs(v / 0.0001750 - 1.0) <= 1e-3);
}

TEST_CASE("stratified variance divides by n_h", "[estimator]") {
    const auto d = make_design(1000, 3000);
    const Allocation a{40, 60};
    const double p1 = 7.0 / 40, p2 = 33.0 / 60;
    const double expect = 0.0625 * p1 * (1 - p1) / 40 * (960.0 / 999.0) +
                          0.5625 * p2 * (1 - p2) / 60 * (2940.0 / 2999.0);
    CHECK(stratified_variance_estimate({7, 33, std::nullopt}, a, d) == Approx(expect).epsilon(1e-14));
    CHECK(stratified_variance_estimate({0, 0, std::nullopt}, a, d) == 0.0);
    CHECK(stratified_variance_estimate({40, 60, std::nullopt}, a, d) == 0.0);
    CHECK(stratified_variance_estimate({7, 33, std::nullopt}, {1000, 3000}, d) == 0.0);
}

TEST_CASE("classical estimates", "[estimator]") {
    CHECK(classical_estimate(100, 618) == Approx(0.1618).epsilon(1e-3));
    CHECK(classical_variance_estimate(100, 618, poll()) == Approx(0.00021946).epsilon(5e-5));
    // Printed as 0.000354193; the expression gives 0.000354187.
    CHECK(std::abs(classical_variance_estimate(200, 618, poll()) / 0.000354193 - 1.0) <= 2e-5);
    CHECK(classical_variance_estimate(0, 618, poll()) == 0.0);
    CHECK(classical_variance_estimate(618, 618, poll()) == 0.0);
    CHECK(classical_variance_estimate(3, 10, make_design(4, 6)) == 0.0);

    CHECK_THROWS_AS(classical_estimate(619, 618), ValidationError);
    CHECK_THROWS_AS(classical_estimate(-1, 618), ValidationError);
    CHECK_THROWS_AS(classical_estimate(0, 0), ValidationError);
    CHECK_THROWS_AS(classical_variance_estimate(3, 11, make_design(4, 6)), ValidationError);
}

TEST_CASE("reduction", "[estimator]") {
    const double vw = stratified_variance_estimate({10, 128, std::nullopt}, kAlloc, poll());
    const double vc = classical_variance_estimate(100, 618, poll());
    CHECK(std::abs(reduction(vw, vc) - 30.94) <= 0.7);
    CHECK(reduction(0.0, 1e-4) == 100.0);
    CHECK(reduction(1e-4, 1e-4) == 0.0);
    CHECK(reduction(2e-4, 1e-4) == Approx(-100.0));
    CHECK_THROWS_AS(reduction(1e-4, 0.0), DomainError);
    CHECK_THROWS_AS(reduction(-1e-4, 1e-4), DomainError);
}

TEST_CASE("estimate report", "[estimator]") {
    const auto rep = estimate({10, 128, 100}, kAlloc, poll(), 618);
    REQUIRE(rep.theta_hat_c.has_value());
    REQUIRE(rep.reduction_pct.has_value());
    CHECK(*rep.theta_hat_c == Approx(100.0 / 618.0));
    CHECK(*rep.reduction_pct == Approx(reduction(rep.v_hat_w, *rep.v_hat_c)));

    const auto bare = estimate({10, 128, std::nullopt}, kAlloc, poll());
    CHECK_FALSE(bare.theta_hat_c.has_value());
    CHECK_FALSE(bare.reduction_pct.has_value());

    const auto zero = estimate({0, 0, 0}, kAlloc, poll(), 618);
    CHECK(zero.v_hat_c == 0.0);
    CHECK_FALSE(zero.reduction_pct.has_value());

    CHECK_THROWS_AS(estimate({10, 128, 100}, kAlloc, poll()), ValidationError);
    CHECK_THROWS_AS(estimate({10, 128, std::nullopt}, kAlloc, poll(), 618), ValidationError);
}

TEST_CASE("invalid counts are rejected, never clipped", "[estimator]") {
    CHECK_THROWS_AS(stratified_estimate({243, 0, std::nullopt}, kAlloc, poll()), ValidationError);
    CHECK_THROWS_AS(stratified_estimate({0, 475, std::nullopt}, kAlloc, poll()), ValidationError);
    CHECK_THROWS_AS(stratified_estimate({-1, 0, std::nullopt}, kAlloc, poll()), ValidationError);
    CHECK_THROWS_AS(stratified_variance_estimate({0, -2, std::nullopt}, kAlloc, poll()), ValidationError);
    CHECK_THROWS_AS(stratified_estimate({0, 0, std::nullopt}, {0, 474}, poll()), ValidationError);
}

TEST_CASE("stratified estimate is linear in the stratum proportions", "[estimator][property]") {
    std::mt19937_64 rng(21);
    const auto d = make_design(5000, 9000);
    const Allocation a{120, 300};
    for (int i = 0; i < 2000; ++i) {
        const count_t x1 = std::uniform_int_distribution<count_t>(0, 120)(rng);
        const count_t x2 = std::uniform_int_distribution<count_t>(0, 300)(rng);
        const double e = stratified_estimate({x1, x2, std::nullopt}, a, d);
        REQUIRE(e >= 0.0);
        REQUIRE(e <= 1.0 + 1e-15);
        REQUIRE(e == Approx(d.w1() * (x1 / 120.0) + d.w2() * (x2 / 300.0)).epsilon(1e-14));
        const double v = stratified_variance_estimate({x1, x2, std::nullopt}, a, d);
        const double v_mirror = stratified_variance_estimate({120 - x1, 300 - x2, std::nullopt}, a, d);
        REQUIRE(v == Approx(v_mirror).epsilon(1e-12));
    }
}
