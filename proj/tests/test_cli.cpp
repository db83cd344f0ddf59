#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "cli_runner.hpp"
#include "model_builders.hpp"
#include "weakch/model_io.hpp"
#include "weakch/qm_singlet.hpp"

using clirun::run;

TEST_CASE("cli envelope and thresholds") {
    const auto r = run("thresholds");
    REQUIRE(r.status == 0);
    const auto j = r.json();
    CHECK(j["command"] == "thresholds");
    CHECK(j.contains("inputs"));
    CHECK(j.contains("version"));
    CHECK(j["result"]["eps_lower_max_4sig"] == "2.689e-05");
    CHECK(j["result"]["eps_upper_max_4sig"] == "9.869e-06");
}

TEST_CASE("cli predict") {
    const auto j = run("predict --angles 0,-90,45,-45 --degrees").json();
    CHECK(std::abs(j["result"]["ch_value"].get<double>() - weakch::kQuantumChMin) <= 1e-12);
    CHECK(j["result"]["in_tsirelson_interval"] == true);

    const auto p = run("predict --phi 0 --outcomes ++").json();
    CHECK(p["result"]["probability"].get<double>() == 0.0);
    CHECK(run("predict").status == 1);
    CHECK(run("predict --angles 1,2,3").status == 1);
    CHECK(run("predict --phi 1 --outcomes +x").status == 1);
}

TEST_CASE("cli exit codes") {
    CHECK(run("").status == 1);
    CHECK(run("no-such-command").status == 1);
    CHECK(run("bounds --epsilon 0.1 --bogus").status == 1);
    CHECK(run("bounds").status == 1);
    CHECK(run("--help").status == 0);

    const auto bad = run("bounds --epsilon 2");
    CHECK(bad.status == 2);
    CHECK(bad.json()["error"]["type"] == "BadEpsilon");

    CHECK(run("check --value -0.5").status == 0);
    CHECK(run("check --value -1.2").status == 3);
    CHECK(run("check --value -1.2 --epsilon 0.01").status == 0);
    CHECK(run("check-model --file does-not-exist.json").status == 2);
}

TEST_CASE("cli csv format") {
    const auto r = run("--format csv bounds --epsilon 0.01");
    REQUIRE(r.status == 0);
    CHECK(r.out.rfind("key,value\n", 0) == 0);
    CHECK(r.out.find("result.lower,") != std::string::npos);

    const auto e = run("bounds --epsilon 0.01", "WEAKCH_FORMAT=csv");
    CHECK(e.out == r.out);
    CHECK(run("bounds --epsilon 0.01", "WEAKCH_FORMAT=xml").status == 1);

    const auto s = run("--format csv simulate --n 500 --angles 0,1,2,3");
    CHECK(s.out.rfind("alice_setting,bob_setting,alice_outcome,bob_outcome,count\n", 0) == 0);
}

TEST_CASE("cli bounds match the closed form") {
    const double eps = 1e-4;
    const auto r = run("bounds --epsilon 0.0001").json()["result"];
    CHECK(r["lower"].get<double>() == doctest::Approx(-1 - (40 * std::sqrt(eps) - 12 * eps)).epsilon(1e-12));
    CHECK(r["upper"].get<double>() == doctest::Approx(66 * std::sqrt(eps) - 24 * eps).epsilon(1e-12));
}

TEST_CASE("cli oracle") {
    std::string uniform;
    for (int i = 0; i < 16; ++i) uniform += (i ? "," : "") + std::string("0.0625");
    const auto r = run("oracle --probs " + uniform);
    CHECK(r.status == 0);
    CHECK(r.json()["result"]["value"].get<double>() == doctest::Approx(-0.5));
    CHECK(run("oracle --probs 0.5,0.5").status == 1);
}

TEST_CASE("cli check-model") {
    const std::string path = "weakch_cli_model.json";
    {
        std::ofstream out(path);
        out << weakch::to_json(testmodels::deterministic()).dump();
    }
    const auto r = run("check-model --file " + path);
    CHECK(r.status == 0);
    const auto j = r.json()["result"];
    CHECK(j["assumptions"]["hold"] == true);
    CHECK(j["weak_ch"]["value"].get<double>() == doctest::Approx(-1.0));

    {
        std::ofstream out(path);
        out << R"({"kind":"pairwise","cells":2,"weights":[0.5,0,0,0,0,0,0,0.5]})";
    }
    CHECK(run("check-model --file " + path).status == 0);
    {
        std::ofstream out(path);
        out << R"({"kind":"other"})";
    }
    CHECK(run("check-model --file " + path).status == 2);
    std::remove(path.c_str());
}

TEST_CASE("cli randomized commands replay") {
    const std::string search = "search --seed 4 --restarts 2 --max-iters 500";
    const auto a = run(search), b = run(search + " --threads 1");
    REQUIRE(a.status == 0);
    CHECK(a.json()["result"] == b.json()["result"]);
    CHECK(a.json()["inputs"]["seed"] == 4);
    CHECK(run(search + " --eps-band 0.1").status == 1);
    CHECK(run(search + " --eps-band 0.2,0.1").status == 2);

    const std::string sim = "simulate --seed 11 --n 200000 --angles 0,-90,45,-45 --degrees";
    const auto s1 = run(sim + " --threads 1"), s2 = run(sim + " --threads 3");
    CHECK(s1.status == 3);
    CHECK(s1.out == s2.out);
    CHECK(run(sim + " --epsilon 0.001").status == 0);
    CHECK(run("simulate --n 10").status == 1);
}
