#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(STRATA_ALLOC_EXE) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    while (const std::size_t n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

constexpr const char* kPoll = "--n1-pop 14526524 --n2-pop 16182757";

} // namespace

TEST_CASE("plan reproduces the published allocation with two-decimal weights", "[cli]") {
    const auto r = run(std::string("plan ") + kPoll + " --weight-decimals 2 --c1 3 --c2 1 --budget 1200");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["n_c"] == 618);
    CHECK(j["n1"] == 242);
    CHECK(j["n2"] == 474);
    CHECK(j["cost"] == 1200.0);
    CHECK(j["design"]["w1"] == 0.47);
    CHECK(j["method"] == "numerical_minimax");
}

TEST_CASE("plan rejects an unaffordable budget", "[cli]") {
    CHECK(run(std::string("plan ") + kPoll + " --c1 3 --c2 1 --budget 3").code == 2);
    CHECK(run(std::string("plan ") + kPoll + " --c1 0 --c2 1 --budget 30").code == 2);
    CHECK(run("plan --n1-pop 0 --n2-pop 5 --c1 1 --c2 1 --budget 30").code == 2);
    CHECK(run("plan --n2-pop 5 --c1 1 --c2 1 --budget 30").code == 2);
    CHECK(run(std::string("plan ") + kPoll + " --w1 0.4 --weight-decimals 2 --c1 1 --c2 1 --budget 30").code == 2);
    CHECK(run("").code == 2);
}

TEST_CASE("estimate reports both sides and the reduction", "[cli]") {
    const auto r = run(std::string("estimate ") + kPoll + " --n1 242 --n2 474 --xi1 10 --xi2 128 --nc 618 --xi 100");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["v_hat_w"].get<double>() == Catch::Approx(1.521e-4).epsilon(1e-3));
    CHECK(j["v_hat_c"].get<double>() == Catch::Approx(0.00021946).epsilon(5e-5));
    CHECK(std::abs(j["reduction_pct"].get<double>() - 30.94) <= 0.7);

    const auto bare = run(std::string("estimate ") + kPoll + " --n1 242 --n2 474 --xi1 10 --xi2 128");
    REQUIRE(bare.code == 0);
    CHECK(json::parse(bare.out)["reduction_pct"].is_null());

    CHECK(run(std::string("estimate ") + kPoll + " --n1 242 --n2 474 --xi1 300 --xi2 128").code == 2);
    CHECK(run(std::string("estimate ") + kPoll + " --n1 242 --n2 474 --xi1 1 --xi2 1 --nc 618").code == 2);
}

TEST_CASE("tables as csv", "[cli]") {
    const auto r = run("tables --which 1,5 --compare-paper");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# table 1:") != std::string::npos);
    CHECK(r.out.find("# table 5:") != std::string::npos);
    CHECK(r.out.find("# flag: printed body inconsistent with caption") != std::string::npos);
    CHECK(r.out.find("xi1,xi2,support,variance,reduction,printed_xi2") != std::string::npos);
    CHECK(r.out.find("\n10,128,16.14,") != std::string::npos);
    CHECK(run("tables --which 7").code == 2);
    CHECK(run("tables --format xml").code == 2);
}

TEST_CASE("tables as json to a file", "[cli]") {
    const std::string path = "cli_test_tables.json";
    const auto r = run("tables --format json --which 2,5 --out " + path);
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    REQUIRE(in);
    const json j = json::parse(in);
    REQUIRE(j["tables"].size() == 2);
    CHECK(j["tables"][0]["table"] == 2);
    CHECK(j["tables"][1]["metadata"]["flag"] == "printed body inconsistent with caption");
    std::remove(path.c_str());
}

TEST_CASE("simulate is deterministic for a seed", "[cli]") {
    const std::string args = std::string("simulate ") + kPoll +
                             " --n1 242 --n2 474 --theta1 0.3 --theta2 0.6 --replicates 20000 --seed 7";
    const auto a = run(args);
    const auto b = run(args + " --workers 3");
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.out == b.out);
    const json j = json::parse(a.out);
    CHECK(j["verdict"]["unbiased"] == "pass");
    CHECK(j["verdict"]["variance_agreement"] == "pass");
    CHECK(j["seed"] == 7);
    CHECK(run(std::string("simulate ") + kPoll + " --n1 242 --n2 474 --theta1 0.3 --theta2 0.6 --replicates 10")
              .code == 2);
}
