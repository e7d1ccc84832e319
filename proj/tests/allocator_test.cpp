#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "strata/allocator.hpp"

using namespace strata;
using Catch::Approx;

namespace {

constexpr count_t kN1 = 14526524;
constexpr count_t kN2 = 16182757;

} // namespace

TEST_CASE("classical_sample_size with two-decimal weights", "[allocator]") {
    const auto d = StratifiedDesign::with_rounded_weights(kN1, kN2, 2);
    CHECK(classical_sample_size(d, CostModel(3, 1, 1200)) == 618);
    CHECK(classical_sample_size(d, CostModel(1, 3, 1200)) == 582);
}

TEST_CASE("classical_sample_size at full-precision weights", "[allocator]") {
    const auto d = make_design(kN1, kN2);
    // 1200 / (3 w1 + w2) = 616.3, 1200 / (w1 + 3 w2) = 584.2
    CHECK(classical_sample_size(d, CostModel(3, 1, 1200)) == 616);
    CHECK(classical_sample_size(d, CostModel(1, 3, 1200)) == 584);
    CHECK(classical_sample_size(d, CostModel(2, 2, 1200)) == 600);
    // Capped at N.
    CHECK(classical_sample_size(make_design(10, 10), CostModel(1, 1, 1000)) == 20);
}

TEST_CASE("classical_sample_size is monotone in budget and costs", "[allocator][property]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.2, 5.0), budget(10.0, 5000.0), bump(1.0, 2.0);
    const auto d = make_design(kN1, kN2);
    for (int i = 0; i < 2000; ++i) {
        const double c1 = unit(rng), c2 = unit(rng), C = budget(rng);
        const count_t base = classical_sample_size(d, CostModel(c1, c2, C));
        const double k = bump(rng);
        REQUIRE(classical_sample_size(d, CostModel(c1, c2, C * k)) >= base);
        REQUIRE(classical_sample_size(d, CostModel(c1 * k, c2, C)) <= base);
        REQUIRE(classical_sample_size(d, CostModel(c1, c2 * k, C)) <= base);
    }
}

TEST_CASE("closed_form_n1 evaluates the literal formula", "[allocator]") {
    // Denominator negative: value is negative, hence invalid.
    const auto d = make_design(300000, 700000);
    const auto cf = closed_form_n1(d, CostModel(1, 1, 400));
    CHECK(cf.value < 0.0);
    CHECK_FALSE(cf.valid);

    // Hand evaluation of the same expression.
    const double w1 = 0.3, w2 = 0.7, N = 1e6;
    const double root = std::sqrt(700000.0 - 1.0);
    const double expect = 400 * root * w1 / (root * w1 - std::sqrt(w2 * (N * (w1 * w1 - 3 * w1 + 1.5) - w1)));
    CHECK(cf.value == Approx(expect).epsilon(1e-12));

    // Expensive first stratum: positive, but above the affordable range.
    const auto hi = closed_form_n1(make_design(400000, 600000), CostModel(10, 1, 2000));
    CHECK(hi.value > 0.0);
    CHECK(hi.value > 199.9);
    CHECK_FALSE(hi.valid);
}

TEST_CASE("closed_form_n1 refuses the upper weight branch", "[allocator]") {
    CHECK_THROWS_AS(closed_form_n1(make_design(kN1, kN2), CostModel(3, 1, 1200)), BranchError);
    CHECK_THROWS_AS(closed_form_n1(make_design(46, 54), CostModel(3, 1, 1200)), BranchError);
    CHECK_NOTHROW(closed_form_n1(make_design(45, 55), CostModel(3, 1, 1200)));
}

TEST_CASE("optimal_allocation falls back when the closed form is invalid", "[allocator]") {
    const auto d = make_design(3000, 7000);
    const CostModel cost(2, 1, 300);
    const auto r = optimal_allocation(d, cost);
    REQUIRE(r.closed_form.has_value());
    CHECK_FALSE(r.closed_form->valid);
    CHECK(r.method == AllocationMethod::numerical_minimax);
    CHECK(r.alloc.n1 >= 1);
    CHECK(validate_allocation(r.alloc, d, cost).ok);

    const auto upper = optimal_allocation(make_design(kN1, kN2), CostModel(3, 1, 1200));
    CHECK_FALSE(upper.closed_form.has_value());
}

TEST_CASE("optimal_allocation on the poll design with two-decimal weights", "[allocator]") {
    const auto d = StratifiedDesign::with_rounded_weights(kN1, kN2, 2);
    const auto a = optimal_allocation(d, CostModel(3, 1, 1200));
    CHECK(a.alloc.n1 >= 240);
    CHECK(a.alloc.n1 <= 244);
    CHECK(a.alloc.n2 == 1200 - 3 * a.alloc.n1);
    CHECK(a.cost == 1200.0);

    const auto b = optimal_allocation(d, CostModel(1, 3, 1200));
    CHECK(b.alloc.n1 >= 403);
    CHECK(b.alloc.n1 <= 407);
    CHECK(b.alloc.n2 == (1200 - b.alloc.n1) / 3);
}

TEST_CASE("optimal_allocation at full-precision weights", "[allocator]") {
    // Regression values; the scan is sensitive to the third decimal of w1.
    const auto d = make_design(kN1, kN2);
    CHECK(optimal_allocation(d, CostModel(3, 1, 1200)).alloc.n1 == 244);
    CHECK(optimal_allocation(d, CostModel(1, 3, 1200)).alloc.n1 == 408);
}

TEST_CASE("a budget of exactly c1 + c2 admits only (1, 1)", "[allocator]") {
    const auto d = make_design(kN1, kN2);
    const auto r = optimal_allocation(d, CostModel(3, 1, 4));
    CHECK(r.alloc.n1 == 1);
    CHECK(r.alloc.n2 == 1);
    CHECK(r.cost == 4.0);
    CHECK(feasible_allocations(d, CostModel(3, 1, 4)).size() == 1);
}

TEST_CASE("minimax certificate on a small design", "[allocator][property]") {
    const auto d = make_design(400, 600);
    const CostModel cost(2, 1, 60);
    const auto r = optimal_allocation(d, cost);
    for (const Allocation& a : feasible_allocations(d, cost)) {
        const double w = worst_theta(a, d).variance;
        INFO("n1=" << a.n1);
        REQUIRE(w >= r.worst_variance);
        if (a.n1 < r.alloc.n1) REQUIRE(w > r.worst_variance);
    }
}

TEST_CASE("returned allocations stay feasible and spend the budget", "[allocator][property]") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<count_t> pop(50, 3000), ci(1, 4), budget(10, 200);
    for (int i = 0; i < 40; ++i) {
        const auto d = make_design(pop(rng), pop(rng));
        const double c1 = static_cast<double>(ci(rng)), c2 = static_cast<double>(ci(rng));
        const CostModel cost(c1, c2, c1 + c2 + static_cast<double>(budget(rng)));
        const auto r = optimal_allocation(d, cost, 200);
        REQUIRE(validate_allocation(r.alloc, d, cost).ok);
        // No leftover large enough for another stratum-2 unit, unless n2 hit N2.
        if (r.alloc.n2 < d.N2()) REQUIRE(cost.budget - r.cost < c2);
    }
}

TEST_CASE("common cost scaling leaves the allocation unchanged", "[allocator][property]") {
    const auto d = make_design(2000, 3000);
    const auto base = optimal_allocation(d, CostModel(3, 1, 150), 300);
    for (double k : {0.1, 0.5, 2.0, 7.0, 1000.0}) {
        const auto r = optimal_allocation(d, CostModel(3 * k, 1 * k, 150 * k), 300);
        INFO("k=" << k);
        CHECK(r.alloc.n1 == base.alloc.n1);
        CHECK(r.alloc.n2 == base.alloc.n2);
    }
}

TEST_CASE("worker count does not change the result", "[allocator]") {
    const auto d = StratifiedDesign::with_rounded_weights(kN1, kN2, 2);
    const CostModel cost(3, 1, 1200);
    const auto one = optimal_allocation(d, cost, 400, 1);
    for (unsigned w : {2u, 3u, 8u}) {
        const auto many = optimal_allocation(d, cost, 400, w);
        CHECK(many.alloc.n1 == one.alloc.n1);
        CHECK(many.worst_variance == one.worst_variance);
        CHECK(many.worst_theta == one.worst_theta);
    }
}

TEST_CASE("method names", "[allocator]") {
    CHECK(to_string(AllocationMethod::closed_form) == "closed_form");
    CHECK(to_string(AllocationMethod::numerical_minimax) == "numerical_minimax");
}
