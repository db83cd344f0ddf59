#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "model_builders.hpp"
#include "oracles.hpp"
#include "weakch/rng.hpp"
#include "weakch/search.hpp"

using namespace weakch;

namespace {

std::vector<double> weights_of(const EprbModel& m) { return {m.weights().begin(), m.weights().end()}; }

// swaps cells 0 and 1 of cause d
EprbModel relabel(const EprbModel& m, int d) {
    std::vector<double> w(m.space().size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        GridPoint g = m.point(i);
        if (g.c[d] < 2) g.c[d] = 1 - g.c[d];
        w[m.index(g)] = m.weights()[i];
    }
    return EprbModel(m.cards(), w);
}

double phi_cos(const AngleOptimum& o, int i, int j) {
    return std::cos(o.theta[i].radians() - o.theta[j].radians());
}

SearchConfig small_config(std::uint64_t seed) {
    SearchConfig c;
    c.seed = seed;
    c.restarts = 3;
    c.max_iters = 300;
    c.threads = 1;
    return c;
}

}  // namespace

TEST_CASE("constraint penalty") {
    CHECK(constraint_penalty(testmodels::deterministic()) == 0.0);
    const auto m = random_local_model(3, 2, 1e-3);
    CHECK(constraint_penalty(m) <= 1e-25);

    auto w = weights_of(m);
    w[17] += 1e-3;
    const EprbModel bumped(m.cards(), w);
    CHECK(constraint_penalty(bumped) > 1e-12);

    for (int d = 0; d < 4; ++d) {
        const auto r = relabel(bumped, d);
        CHECK(constraint_penalty(r) == doctest::Approx(constraint_penalty(bumped)).epsilon(1e-12));
    }
}

TEST_CASE("property: one-pass summary agrees with the validators") {
    CounterRng rng(51);
    for (int t = 0; t < 60; ++t) {
        const CauseCards cards{2 + rng.below(2), 2, 2 + rng.below(2), 2};
        std::vector<double> w(EprbModel::atom_count(cards));
        if (t % 2 == 0) {
            for (double& x : w) x = rng.uniform() < 0.3 ? 0.0 : rng.exponential();
        } else {
            const auto base = random_local_model(rng(), 2, 0.01);
            const CauseCards c2{2, 2, 2, 2};
            w.assign(base.weights().begin(), base.weights().end());
            for (int k = 0; k < 3; ++k) w[rng.below(w.size())] *= 1.0 + 0.01 * rng.normal();
            const EprbModel m(c2, w);
            const auto s = summarize(c2, w);
            CHECK(s.penalty == doctest::Approx(constraint_penalty(m)).epsilon(1e-9));
            CHECK(std::abs(s.ch_value - ch_terms(m).value()) <= 1e-12);
            continue;
        }
        const EprbModel m(cards, w);
        const auto s = summarize(cards, w);
        CHECK(s.penalty == doctest::Approx(constraint_penalty(m)).epsilon(1e-9));
        CHECK(std::abs(s.eps_global - epsilon_profile(m).eps_global) <= 1e-12);
        CHECK(std::abs(s.ch_value - ch_terms(m).value()) <= 1e-12);
        const auto b = weak_ch_bounds(m, s.eps_global);
        CHECK(std::abs(s.bounds.lower - b.lower) <= 1e-9);
        CHECK(std::abs(s.bounds.upper - b.upper) <= 1e-9);
    }
}

TEST_CASE("angle optimizer") {
    const double r = std::numbers::sqrt2 / 2;
    const auto lo = optimize_angles(1, 16, 200, AngleMode::minimize);
    CHECK(std::abs(lo.value - kQuantumChMin) <= 1e-9);
    CHECK(lo.theta[0].radians() == 0.0);
    CHECK(std::abs(phi_cos(lo, 0, 2) - r) <= 1e-4);
    CHECK(std::abs(phi_cos(lo, 0, 3) - r) <= 1e-4);
    CHECK(std::abs(phi_cos(lo, 1, 3) - r) <= 1e-4);
    CHECK(std::abs(phi_cos(lo, 1, 2) + r) <= 1e-4);

    const auto hi = optimize_angles(1, 16, 200, AngleMode::maximize);
    CHECK(std::abs(hi.value - kQuantumChMax) <= 1e-9);
    CHECK(std::abs(phi_cos(hi, 0, 2) + r) <= 1e-4);
    CHECK(std::abs(phi_cos(hi, 1, 3) + r) <= 1e-4);
    CHECK(std::abs(phi_cos(hi, 0, 3) + r) <= 1e-4);
    CHECK(std::abs(phi_cos(hi, 1, 2) - r) <= 1e-4);

    for (std::uint64_t seed : {2, 3, 4}) {
        CHECK(std::abs(optimize_angles(seed, 8, 200, AngleMode::minimize).value - kQuantumChMin) <= 1e-9);
    }
    CHECK_THROWS_AS(optimize_angles(1, 7, 10, AngleMode::minimize), std::invalid_argument);
}

TEST_CASE("angle optimizer agrees with a dense grid") {
    const double grid_min = oracle::dense_grid_ch(true);
    const double grid_max = oracle::dense_grid_ch(false);
    CHECK(std::abs(optimize_angles(5, 16, 200, AngleMode::minimize).value - grid_min) <= 1e-6);
    CHECK(std::abs(optimize_angles(5, 16, 200, AngleMode::maximize).value - grid_max) <= 1e-6);
}

TEST_CASE("search config validation") {
    SearchConfig c;
    CHECK_NOTHROW(c.validate());
    c.restarts = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.cards = {2, 1, 2, 2};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.step0 = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.eps_lo = 0.2;
    c.eps_hi = 0.1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("search replay and monotone penalty trace") {
    const auto r1 = search_counterexample(small_config(8));
    const auto r2 = search_counterexample(small_config(8));
    CHECK(std::ranges::equal(r1.model.weights(), r2.model.weights()));
    REQUIRE(r1.trace.size() == r2.trace.size());
    for (std::size_t i = 0; i < r1.trace.size(); ++i) {
        CHECK(r1.trace[i].penalty == r2.trace[i].penalty);
        CHECK(r1.trace[i].objective == r2.trace[i].objective);
    }
    CHECK(r1.trace.size() == 300);
    for (std::size_t i = 1; i < r1.trace.size(); ++i) {
        CHECK(r1.trace[i].penalty <= r1.trace[i - 1].penalty);
        CHECK(r1.trace[i].objective >= r1.trace[i - 1].objective);
    }

    // the restart schedule does not depend on the worker count
    auto threaded = small_config(8);
    threaded.threads = 3;
    const auto r3 = search_counterexample(threaded);
    CHECK(r3.restart == r1.restart);
    CHECK(std::ranges::equal(r1.model.weights(), r3.model.weights()));

    CHECK(r1.penalty == doctest::Approx(constraint_penalty(r1.model)).epsilon(1e-15));
}

TEST_CASE("epsilon = 0 band is infeasible") {
    for (std::uint64_t seed : {1, 2, 3}) {
        auto c = small_config(seed);
        c.eps_lo = c.eps_hi = 0.0;
        const auto r = search_counterexample(c);
        CHECK_FALSE(r.feasible);
    }
}

TEST_CASE("feasible claims survive independent re-validation") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto r = search_counterexample(small_config(seed));
        if (!r.feasible) continue;
        const auto prof = epsilon_profile(r.model);
        CHECK(constraint_penalty(r.model) <= kFeasibilityTolerance);
        const double ch = ch_terms(r.model).value();
        CHECK_FALSE(ch_holds(ch));
        CHECK_FALSE(evaluate_weak_ch(ch, weak_ch_bounds(r.model, prof.eps_global), prof.eps_global).violated());
    }
}
