// strata_alloc.cpp - command-line front end.
//
//   strata-alloc plan      --n1-pop N1 --n2-pop N2 --c1 c1 --c2 c2 --budget C
//   strata-alloc estimate  --n1-pop N1 --n2-pop N2 --n1 n1 --n2 n2 --xi1 x1 --xi2 x2 [--nc nc --xi x]
//   strata-alloc tables    [--which 1,2,3] [--format csv|json] [--compare-paper] [--out path]
//   strata-alloc simulate  --n1-pop N1 --n2-pop N2 --n1 n1 --n2 n2 --theta1 t1 --theta2 t2 [--seed s]
//
// Exit codes: 0 success, 2 validation or infeasibility, 1 internal error.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "strata/serialize.hpp"
#include "strata/strata.hpp"

namespace {

using namespace strata;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInvalid = 2;

struct DesignFlags {
    count_t n1_pop = 0;
    count_t n2_pop = 0;
    std::optional<int> weight_decimals;
    std::optional<double> w1;

    void add_to(CLI::App& cmd, bool required = true) {
        auto* a = cmd.add_option("--n1-pop", n1_pop, "units in stratum 1 (N1)");
        auto* b = cmd.add_option("--n2-pop", n2_pop, "units in stratum 2 (N2)");
        if (required) {
            a->required();
            b->required();
        }
        auto* dec = cmd.add_option("--weight-decimals", weight_decimals,
                                   "round w1 to this many decimals (w2 = 1 - w1)");
        auto* w = cmd.add_option("--w1", w1, "use this stratum-1 weight instead of N1/N");
        dec->excludes(w);
    }

    StratifiedDesign build() const {
        if (w1) return StratifiedDesign::with_weights(n1_pop, n2_pop, *w1);
        if (weight_decimals) return StratifiedDesign::with_rounded_weights(n1_pop, n2_pop, *weight_decimals);
        return make_design(n1_pop, n2_pop);
    }
};

std::string fmt6(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt6(*v) : ""; }

template <class T>
std::string fmt_opt_int(const std::optional<T>& v) {
    return v ? std::to_string(*v) : "";
}

void write_table_csv(std::ostream& os, const TableReport& rep, bool compare) {
    const PublishedTable& t = rep.table;
    os << "# table " << t.id << ": xi=" << t.xi << " n_c=" << t.n_c << " n1=" << t.n1 << " n2=" << t.n2
       << " c1=" << t.c1 << " c2=" << t.c2 << " C=" << t.budget << " w1=" << rep.w1
       << " v_hat_c=" << fmt6(rep.v_hat_c) << "\n";
    if (!t.body_consistent) os << "# flag: printed body inconsistent with caption\n";
    for (const auto& note : t.notes) os << "# note: " << note << "\n";
    os << "xi1,xi2,support,variance,reduction";
    if (compare)
        os << ",printed_xi2,printed_support,printed_variance,printed_reduction"
              ",xi2_diff,support_diff_pp,variance_rel_dev,reduction_diff_pp";
    os << "\n";
    for (const RowComparison& c : rep.comparisons) {
        const TableRow& r = c.row;
        os << r.xi1 << ',' << r.xi2 << ',' << fmt6(r.support_pct) << ',' << fmt6(r.variance) << ','
           << fmt6(r.reduction_pct);
        if (compare) {
            os << ',' << fmt_opt_int(c.printed.xi2) << ',' << fmt_opt(c.printed.support_pct) << ','
               << fmt_opt(c.printed.variance) << ',' << fmt_opt(c.printed.reduction_pct) << ','
               << fmt_opt_int(c.xi2_diff) << ',' << fmt_opt(c.support_diff_pp) << ','
               << fmt_opt(c.variance_rel_dev) << ',' << fmt_opt(c.reduction_diff_pp);
        }
        os << "\n";
    }
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cost-constrained allocation and estimation for a proportion in a two-stratum population",
                 "strata-alloc"};
    app.require_subcommand(1);

    // plan
    auto* plan = app.add_subcommand("plan", "minimax allocation and budget-equivalent classical size");
    DesignFlags plan_design;
    plan_design.add_to(*plan);
    double c1 = 0, c2 = 0, budget = 0;
    int grid = kDefaultThetaGrid;
    unsigned workers = 1;
    plan->add_option("--c1", c1, "cost per unit in stratum 1")->required();
    plan->add_option("--c2", c2, "cost per unit in stratum 2")->required();
    plan->add_option("--budget", budget, "total budget C")->required();
    plan->add_option("--grid", grid, "theta grid resolution for the worst case")->capture_default_str();
    plan->add_option("--workers", workers, "threads for the n1 scan")->capture_default_str();

    // estimate
    auto* est = app.add_subcommand("estimate", "stratified estimate, plug-in variance, reduction");
    DesignFlags est_design;
    est_design.add_to(*est);
    count_t n1 = 0, n2 = 0, xi1 = 0, xi2 = 0;
    std::optional<count_t> nc, xi;
    est->add_option("--n1", n1, "stratum-1 sample size")->required();
    est->add_option("--n2", n2, "stratum-2 sample size")->required();
    est->add_option("--xi1", xi1, "positive answers in stratum-1 sample")->required();
    est->add_option("--xi2", xi2, "positive answers in stratum-2 sample")->required();
    auto* nc_opt = est->add_option("--nc", nc, "classical sample size");
    auto* xi_opt = est->add_option("--xi", xi, "positive answers in classical sample");
    nc_opt->needs(xi_opt);
    xi_opt->needs(nc_opt);

    // tables
    auto* tab = app.add_subcommand("tables", "regenerate the published scenario tables");
    std::vector<int> which{1, 2, 3, 4, 5, 6};
    std::string format = "csv";
    std::string out_path;
    bool compare = false;
    double table_w1 = kPublishedTableW1;
    tab->add_option("--which", which, "table ids (1..6)")->delimiter(',')->check(CLI::Range(1, 6));
    tab->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    tab->add_option("--out", out_path, "write to this file instead of standard output");
    tab->add_flag("--compare-paper", compare, "annotate rows with printed values and deviations");
    tab->add_option("--w1", table_w1, "stratum-1 weight used for the regeneration")->capture_default_str();

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo check of bias and variance");
    DesignFlags sim_design;
    sim_design.add_to(*sim);
    count_t sn1 = 0, sn2 = 0, replicates = 100000;
    double theta1 = 0, theta2 = 0;
    std::uint64_t seed = 20180101;
    std::optional<count_t> snc;
    unsigned sim_workers = 1;
    std::string sim_format = "json";
    sim->add_option("--n1", sn1, "stratum-1 sample size")->required();
    sim->add_option("--n2", sn2, "stratum-2 sample size")->required();
    sim->add_option("--theta1", theta1, "true stratum-1 fraction")->required();
    sim->add_option("--theta2", theta2, "true stratum-2 fraction")->required();
    sim->add_option("--replicates", replicates)->capture_default_str();
    sim->add_option("--seed", seed)->capture_default_str();
    sim->add_option("--nc", snc, "also simulate a classical sample of this size");
    sim->add_option("--workers", sim_workers)->capture_default_str();
    sim->add_option("--format", sim_format, "json only")->check(CLI::IsMember({"json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (*plan) {
            const StratifiedDesign d = plan_design.build();
            const CostModel cost(c1, c2, budget);
            const AllocationResult res = optimal_allocation(d, cost, grid, workers);
            json j = res;
            j["command"] = "plan";
            j["n_c"] = classical_sample_size(d, cost);
            j["design"] = d;
            j["cost_model"] = cost;
            j["grid"] = grid;
            emit(j);
        } else if (*est) {
            const StratifiedDesign d = est_design.build();
            const Allocation alloc{n1, n2};
            const EstimateReport rep = estimate(SurveyOutcome{xi1, xi2, xi}, alloc, d, nc);
            json j = rep;
            j["command"] = "estimate";
            j["design"] = d;
            j["allocation"] = alloc;
            emit(j);
        } else if (*tab) {
            const StratifiedDesign d = published_table_design(table_w1);
            std::ofstream file;
            if (!out_path.empty()) {
                file.open(out_path);
                if (!file) throw std::runtime_error("cannot open " + out_path);
            }
            std::ostream& os = out_path.empty() ? std::cout : file;
            if (format == "json") {
                json arr = json::array();
                for (int id : which) arr.push_back(table_json(regenerate_table(id, d), compare));
                os << json{{"command", "tables"}, {"tables", arr}}.dump(2) << "\n";
            } else {
                bool first = true;
                for (int id : which) {
                    if (!first) os << "\n";
                    first = false;
                    write_table_csv(os, regenerate_table(id, d), compare);
                }
            }
        } else if (*sim) {
            const StratifiedDesign d = sim_design.build();
            SimulationConfig cfg{d, Allocation{sn1, sn2}, TrueState::from_fractions(theta1, theta2, d),
                                 replicates, seed, snc, sim_workers};
            const SimulationResult res = run_simulation(cfg);
            json j = res;
            j["command"] = "simulate";
            j["seed"] = seed;
            j["allocation"] = cfg.alloc;
            j["design"] = d;
            j["verdict"] = judge(res);
            emit(j);
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const BranchError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitOk;
}
