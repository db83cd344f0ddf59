#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "model_builders.hpp"
#include "weakch/eprb_sim.hpp"
#include "weakch/errors.hpp"
#include "weakch/model_io.hpp"

using namespace weakch;
using std::numbers::pi;

namespace {

const std::array<Angle, 4> kLowerAngles{Angle(0.0), Angle(-pi / 2), Angle(pi / 4), Angle(-pi / 4)};

SimConfig config(std::uint64_t seed, std::uint64_t n) {
    SimConfig c;
    c.seed = seed;
    c.n = n;
    c.theta = kLowerAngles;
    return c;
}

}  // namespace

TEST_CASE("counts") {
    const auto one = sample_runs(config(1, 1));
    CHECK(one.total() == 1);
    CHECK(one.n == 1);

    // theta1 = theta3 so the (1,3) pair never shows (+,+)
    auto c = config(2, 20000);
    c.theta = {Angle(0.3), Angle(1.0), Angle(0.3), Angle(2.0)};
    const auto t = sample_runs(c);
    CHECK(t.total() == 20000);
    CHECK(t.counts[0][0][0][0] == 0);
    CHECK(t.counts[0][0][1][1] == 0);
    CHECK(t.pair_total(0, 0) > 0);

    CHECK_THROWS_AS(sample_runs(config(1, 0)), std::invalid_argument);
    auto bad = config(1, 10);
    bad.setting_probs = {0.5, 0.5, 0.5, 0.0};
    CHECK_THROWS_AS(sample_runs(bad), std::invalid_argument);
}

TEST_CASE("sampling is deterministic across thread counts") {
    auto c = config(9, 300000);
    c.threads = 1;
    const auto a = sample_runs(c);
    c.threads = 4;
    const auto b = sample_runs(c);
    CHECK(a.counts == b.counts);
    c.seed = 10;
    CHECK_FALSE(sample_runs(c).counts == a.counts);
}

TEST_CASE("Wald estimates") {
    const ProbEstimate e{3, 12};
    CHECK(e.value() == 0.25);
    CHECK(e.se() == doctest::Approx(0.125).epsilon(1e-15));
    const ProbEstimate all{7, 7};
    CHECK(all.value() == 1.0);
    CHECK(all.se() == 0.0);
    const ProbEstimate none{0, 0};
    CHECK_FALSE(none.defined());
    CHECK_THROWS_AS(none.value(), UndefinedEstimate);

    CountsTable t;
    t.counts[0][0][0][0] = 5;
    t.counts[0][0][1][1] = 5;
    t.n = 10;
    const auto est = estimate(t);
    CHECK_FALSE(est.joint[1][1][0][0].defined());
    CHECK(est.joint[0][0][0][0].value() == 0.5);
    CHECK_THROWS_AS(test_inequality(est, 0.0, 3.0), UndefinedEstimate);
}

TEST_CASE("frequencies per setting pair sum to one") {
    const auto est = estimate(sample_runs(config(3, 5000)));
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            std::uint64_t hits = 0;
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y) hits += est.joint[a][b][x][y].hits;
            CHECK(hits == est.joint[a][b][0][0].trials);
        }
}

TEST_CASE("large run at the lower-bound angles") {
    const auto est = estimate(sample_runs(config(2024, 1000000)));
    const auto& p13 = est.joint[0][0][0][0];
    CHECK(std::abs(p13.value() - 0.0732233047033631) <= 4 * p13.se());

    const auto r0 = test_inequality(est, 0.0, 3.0);
    CHECK(std::abs(r0.report.value - kQuantumChMin) <= 4 * r0.se);
    CHECK(r0.se == doctest::Approx(1.4e-3).epsilon(0.1));
    CHECK(r0.declared_lower);
    CHECK(r0.margin_lower < -3.0);

    const auto r1 = test_inequality(est, 1e-3, 3.0);
    CHECK_FALSE(r1.report.violated_lower);
    CHECK_FALSE(r1.declared_lower);
    CHECK(-1.0 - r1.report.lower == doctest::Approx(40 * std::sqrt(1e-3) - 12e-3).epsilon(1e-12));
}

TEST_CASE("small runs rarely decide") {
    int declared = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto r = test_inequality(estimate(sample_runs(config(seed, 100))), 0.0, 3.0);
        CHECK(std::isfinite(r.margin_lower));
        CHECK(r.se > 0.05);
        declared += r.declared() ? 1 : 0;
    }
    CHECK(declared <= 2);
}

TEST_CASE("estimates converge with n") {
    double prev_se = 1.0;
    for (std::uint64_t n : {1000ULL, 10000ULL, 100000ULL, 1000000ULL}) {
        const auto r = test_inequality(estimate(sample_runs(config(77, n))), 0.0, 3.0);
        CHECK(std::abs(r.report.value - kQuantumChMin) <= 4 * r.se);
        CHECK(r.se < prev_se);
        prev_se = r.se;
    }
}

TEST_CASE("sampling from a model") {
    auto c = config(5, 100000);
    c.model = testmodels::deterministic();
    const auto est = estimate(sample_runs(c));
    // perfect anticorrelation between partners, CH at -1
    CHECK(est.joint[0][0][0][0].hits == 0);
    CHECK(est.joint[0][0][1][1].hits == 0);
    const auto r = test_inequality(est, 0.0, 3.0);
    CHECK(std::abs(r.report.value + 1.0) <= 4 * r.se + 1e-12);
    CHECK_FALSE(r.declared());
}

TEST_CASE("model files") {
    const auto m = testmodels::deterministic();
    const auto j = to_json(m);
    const auto back = eprb_model_from_json(j);
    CHECK(std::ranges::equal(back.weights(), m.weights()));

    const std::string path = "weakch_test_model.json";
    {
        std::ofstream out(path);
        out << j.dump();
    }
    CHECK(std::ranges::equal(load_eprb_model(path).weights(), m.weights()));
    std::remove(path.c_str());

    CHECK_THROWS_AS(load_eprb_model("does/not/exist.json"), BadModelFile);
    CHECK_THROWS_AS(eprb_model_from_json(nlohmann::json{{"kind", "eprb"}, {"cards", {2, 2}}}), BadModelFile);
    CHECK_THROWS_AS(eprb_model_from_json(nlohmann::json{{"kind", "eprb"}, {"cards", {1, 1, 1, 1}}, {"weights", {1, 2}}}),
                    BadModelFile);

    const auto p = pairwise_model_from_json(
        nlohmann::json::parse(R"({"kind":"pairwise","cells":2,"weights":[0.5,0,0,0,0,0,0,0.5]})"));
    CHECK(prop1_check(p).ok());
    const auto q = pairwise_model_from_json(nlohmann::json::parse(
        R"({"kind":"pairwise","atoms":["u","v"],"weights":[1,1],"A":["u"],"B":["u"],"C":[["u"],["v"]]})"));
    CHECK(prop1_check(q).epsilon == 0.0);
    CHECK_THROWS_AS(pairwise_model_from_json(nlohmann::json::parse(
                        R"({"kind":"pairwise","atoms":["u"],"weights":[1],"A":["w"],"B":[],"C":[["u"]]})")),
                    BadModelFile);
}
