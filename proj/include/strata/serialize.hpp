// serialize.hpp
//
// nlohmann::json serialisation for the report types. Optional: only the CLI
// and tests include it.
#pragma once

#include <optional>

#include "json.hpp" // nlohmann/json, vendored
#include "strata/allocator.hpp"
#include "strata/estimator.hpp"
#include "strata/montecarlo.hpp"
#include "strata/population.hpp"
#include "strata/tables.hpp"

namespace strata {

using nlohmann::json;

namespace detail {
template <class T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}
} // namespace detail

inline void to_json(json& j, const StratifiedDesign& d) {
    j = json{{"N1", d.N1()}, {"N2", d.N2()}, {"N", d.N()},
             {"w1", d.w1()}, {"w2", d.w2()}, {"exact_weights", d.exact_weights()}};
}

inline void to_json(json& j, const CostModel& c) {
    j = json{{"c1", c.c1}, {"c2", c.c2}, {"budget", c.budget}};
}

inline void to_json(json& j, const Allocation& a) { j = json{{"n1", a.n1}, {"n2", a.n2}}; }

inline void to_json(json& j, const AllocationResult& r) {
    j = json{{"n1", r.alloc.n1},
             {"n2", r.alloc.n2},
             {"cost", r.cost},
             {"worst_theta", r.worst_theta},
             {"worst_variance", r.worst_variance},
             {"method", std::string(to_string(r.method))},
             {"w1_star", r.w1_star}};
    if (r.closed_form)
        j["closed_form"] = json{{"value", r.closed_form->value}, {"valid", r.closed_form->valid}};
    else
        j["closed_form"] = nullptr;
}

inline void to_json(json& j, const EstimateReport& r) {
    j = json{{"theta_hat_w", r.theta_hat_w},
             {"v_hat_w", r.v_hat_w},
             {"theta_hat_c", detail::opt(r.theta_hat_c)},
             {"v_hat_c", detail::opt(r.v_hat_c)},
             {"reduction_pct", detail::opt(r.reduction_pct)}};
}

inline void to_json(json& j, const SimulationResult& r) {
    j = json{{"replicates", r.replicates},
             {"M1", r.M1},
             {"M2", r.M2},
             {"theta1", r.theta1},
             {"theta2", r.theta2},
             {"theta", r.theta},
             {"mean_w", r.mean_w},
             {"var_w", r.var_w},
             {"se_mean_w", r.se_mean_w},
             {"analytic_var_w", r.analytic_var_w},
             {"mean_c", detail::opt(r.mean_c)},
             {"var_c", detail::opt(r.var_c)},
             {"analytic_var_c", detail::opt(r.analytic_var_c)}};
}

inline void to_json(json& j, const SimulationVerdict& v) {
    j = json{{"unbiased", v.unbiased ? "pass" : "fail"},
             {"bias_in_se", v.bias_in_se},
             {"variance_agreement", v.variance_matches ? "pass" : "fail"},
             {"variance_rel_error", v.variance_rel_error}};
}

inline void to_json(json& j, const TableRow& r) {
    j = json{{"xi1", r.xi1},
             {"xi2", r.xi2},
             {"support_pct", r.support_pct},
             {"variance", r.variance},
             {"reduction_pct", r.reduction_pct}};
}

inline void to_json(json& j, const PrintedRow& r) {
    j = json{{"xi1", r.xi1},
             {"xi2", detail::opt(r.xi2)},
             {"support_pct", detail::opt(r.support_pct)},
             {"variance", detail::opt(r.variance)},
             {"reduction_pct", detail::opt(r.reduction_pct)},
             {"garbled", r.garbled}};
}

inline void to_json(json& j, const RowComparison& c) {
    j = json{{"printed", c.printed},
             {"xi2_diff", detail::opt(c.xi2_diff)},
             {"support_diff_pp", detail::opt(c.support_diff_pp)},
             {"variance_rel_dev", detail::opt(c.variance_rel_dev)},
             {"reduction_diff_pp", detail::opt(c.reduction_diff_pp)}};
}

inline json table_json(const TableReport& rep, bool compare) {
    const PublishedTable& t = rep.table;
    json j{{"table", t.id},
           {"c1", t.c1},
           {"c2", t.c2},
           {"budget", t.budget},
           {"n_c", t.n_c},
           {"n1", t.n1},
           {"n2", t.n2},
           {"xi", t.xi},
           {"w1", rep.w1},
           {"theta_hat_c", rep.theta_hat_c},
           {"v_hat_c", rep.v_hat_c},
           {"rows", rep.rows}};
    json meta{{"body_consistent_with_caption", t.body_consistent},
              {"caption_v_hat_c_consistent", t.caption_v_hat_c_consistent},
              {"caption_v_hat_c", t.caption_v_hat_c},
              {"notes", t.notes}};
    if (!t.body_consistent) meta["flag"] = "printed body inconsistent with caption";
    j["metadata"] = meta;
    if (compare) j["comparison"] = rep.comparisons;
    return j;
}

} // namespace strata
