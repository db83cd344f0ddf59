#include "doctest.h"

#include <cmath>
#include <numbers>

#include "weakch/errors.hpp"
#include "weakch/inequalities.hpp"
#include "weakch/rng.hpp"

using namespace weakch;
using std::numbers::pi;

namespace {

const SettingProbs kSym{};

// reference values from an arbitrary-precision evaluation of the closed forms
constexpr double kEpsLowerMax = 2.68918691709054e-5;
constexpr double kEpsUpperMax = 9.86946476292407e-6;

}  // namespace

TEST_CASE("correction terms") {
    const auto z = correction_terms(0.0, SettingProbs{0.3, 0.6, 0.1});
    CHECK(z.d_minus_ab == 0.0);
    CHECK(z.d_plus_ab == 0.0);
    CHECK(z.d_minus == 0.0);
    CHECK(z.d_plus == 0.0);

    const auto c = correction_terms(1e-4, kSym);
    CHECK(std::abs(c.d_minus_ab - 0.04) <= 1e-12);
    CHECK(std::abs(c.d_plus_ab - 0.1992) <= 1e-12);
    CHECK(std::abs(c.d_minus - 0.01) <= 1e-12);
    CHECK(std::abs(c.d_plus - 0.0398) <= 1e-12);

    CounterRng rng(21);
    for (int t = 0; t < 100; ++t) {
        const double e = rng.uniform();
        const auto k = correction_terms(e, kSym);
        CHECK(std::abs(k.d_minus_ab - 4 * std::sqrt(e)) <= 1e-12);
        CHECK(std::abs(k.d_plus_ab - (20 * std::sqrt(e) - 8 * e)) <= 1e-12);
        CHECK(k.d_plus_ab >= k.d_minus_ab);
        CHECK(k.d_plus >= k.d_minus);
    }

    CHECK_THROWS_AS(correction_terms(-0.1, kSym), BadEpsilon);
    CHECK_THROWS_AS(correction_terms(1.5, kSym), BadEpsilon);
    CHECK_THROWS_AS(correction_terms(0.1, SettingProbs{0.5, 0.5, 0.0}), BadSettingProbs);
    CHECK_THROWS_AS(correction_terms(0.1, SettingProbs{0.5, 0.4, 0.45}), BadSettingProbs);
}

TEST_CASE("CH expression on atoms") {
    // everything occurs
    CHECK(ch_expression(1, 1, 1, 1, 1, 1) == 0.0);
    // only A', B, B' occur: p(A'B') = p(A'B) = p(B') = 1
    CHECK(ch_expression(0, 0, 1, 1, 0, 1) == -1.0);
    CHECK(ch_expression(0.25, 0.25, 0.25, 0.25, 0.5, 0.5) == -0.5);
}

TEST_CASE("weak bounds") {
    const auto z = weak_ch_bounds(0.0, kSym);
    CHECK(z.lower == -1.0);
    CHECK(z.upper == 0.0);

    CounterRng rng(22);
    for (int t = 0; t < 200; ++t) {
        const double e = rng.uniform();
        const auto b = weak_ch_bounds(e, kSym);
        CHECK(std::abs(b.lower - (-1 - (40 * std::sqrt(e) - 12 * e))) <= 1e-12);
        CHECK(std::abs(b.upper - (66 * std::sqrt(e) - 24 * e)) <= 1e-12);
        CHECK(b.lower <= -1.0);
        CHECK(b.upper >= 0.0);
    }

    const auto c1 = correction_terms(1e-4, kSym);
    const auto c2 = correction_terms(2e-4, kSym);
    CHECK_THROWS_AS(weak_ch_bounds(c1, c1, c2, c1), MixedEpsilon);
}

TEST_CASE("property: bounds widen monotonically in epsilon") {
    double prev_lo = -1.0, prev_hi = 0.0;
    for (int i = 1; i <= 1000; ++i) {
        const auto b = weak_ch_bounds(i / 1000.0, kSym);
        CHECK(b.lower <= prev_lo);
        CHECK(b.upper >= prev_hi);
        CHECK(b.lower < -1.0);
        CHECK(b.upper > 0.0);
        prev_lo = b.lower;
        prev_hi = b.upper;
    }
}

TEST_CASE("evaluate weak CH") {
    const auto r0 = evaluate_weak_ch(kQuantumChMin, weak_ch_bounds(0.0, kSym), 0.0);
    CHECK(r0.violated_lower);
    CHECK_FALSE(r0.violated_upper);

    const auto r1 = evaluate_weak_ch(kQuantumChMin, weak_ch_bounds(1e-4, kSym), 1e-4);
    CHECK_FALSE(r1.violated_lower);
    CHECK(std::abs((-1.0 - r1.lower) - 0.3988) <= 1e-12);

    const auto r2 = evaluate_weak_ch(-0.5, weak_ch_bounds(0.0, kSym), 0.0);
    CHECK_FALSE(r2.violated());

    // the bounds themselves are not violations
    CHECK_FALSE(evaluate_weak_ch(-1.0, WeakBounds{}, 0.0).violated());
    CHECK_FALSE(evaluate_weak_ch(0.0, WeakBounds{}, 0.0).violated());
    CHECK(evaluate_weak_ch(1e-9, WeakBounds{}, 0.0).violated_upper);

    const std::array<Angle, 4> lo{Angle(0.0), Angle(-pi / 2), Angle(pi / 4), Angle(-pi / 4)};
    const auto r3 = evaluate_weak_ch(ch_terms(lo), weak_ch_bounds(0.0, kSym), 0.0);
    REQUIRE(r3.terms.has_value());
    CHECK(r3.terms->p1 == 0.5);
    CHECK(r3.violated_lower);
}

TEST_CASE("epsilon thresholds") {
    const auto th = epsilon_thresholds();
    CHECK(std::abs(th.eps_lower_max - kEpsLowerMax) <= 1e-17);
    CHECK(std::abs(th.eps_upper_max - kEpsUpperMax) <= 1e-17);
    // four significant digits as printed
    CHECK(std::round(th.eps_lower_max * 1e8) == 2689.0);
    CHECK(std::round(th.eps_upper_max * 1e9) == 9869.0);
    CHECK(solve_threshold(40, 12, 0.0) == 0.0);

    const auto lo = [](double e) { return evaluate_weak_ch(kQuantumChMin, weak_ch_bounds(e, kSym), e); };
    CHECK(lo(th.eps_lower_max * (1 - 1e-6)).violated_lower);
    CHECK_FALSE(lo(th.eps_lower_max * (1 + 1e-6)).violated_lower);
    const auto hi = [](double e) { return evaluate_weak_ch(kQuantumChMax, weak_ch_bounds(e, kSym), e); };
    CHECK(hi(th.eps_upper_max * (1 - 1e-6)).violated_upper);
    CHECK_FALSE(hi(th.eps_upper_max * (1 + 1e-6)).violated_upper);
}

TEST_CASE("no-signalling") {
    CounterRng rng(23);
    for (int t = 0; t < 100; ++t) {
        DirectionConfig cfg;
        for (int k = 0; k < 2; ++k) {
            cfg.alice.emplace_back(rng.uniform(0, 2 * pi));
            cfg.bob.emplace_back(rng.uniform(0, 2 * pi));
        }
        for (double r : no_signalling_residuals(singlet_tables(cfg))) CHECK(std::abs(r) <= 1e-12);
    }

    const OutcomeTable t{{{0.1, 0.4}, {0.4, 0.1}}};
    SettingTables same{{t, t}, {t, t}};
    for (double r : no_signalling_residuals(same)) CHECK(r == 0.0);

    OutcomeTable bumped = t;
    bumped[0][0] += 0.01;
    for (auto& row : bumped)
        for (auto& x : row) x /= 1.01;
    SettingTables sig{{t, bumped}, {t, t}};
    double worst = 0.0;
    for (double r : no_signalling_residuals(sig)) worst = std::max(worst, std::abs(r));
    CHECK(worst > 1e-3);

    SettingTables bad{{OutcomeTable{{{0.5, 0.5}, {0.5, 0.5}}}}};
    CHECK_THROWS_AS(no_signalling_residuals(bad), UnnormalizedTable);
}

TEST_CASE("Tsirelson check") {
    CHECK(tsirelson_check(kQuantumChMin));
    CHECK(tsirelson_check(kQuantumChMax));
    CHECK(tsirelson_check(0.0));
    CHECK_FALSE(tsirelson_check(-1.3));
    CHECK_FALSE(tsirelson_check(0.3));
}

TEST_CASE("property: strict and weak CH agree at eps = 0") {
    CounterRng rng(24);
    const auto b = weak_ch_bounds(0.0, kSym);
    for (int t = 0; t < 1000; ++t) {
        double p[6];
        for (double& x : p) x = rng.uniform();
        const double v = ch_expression(p[0], p[1], p[2], p[3], p[4], p[5]);
        CHECK(ch_holds(v) == !evaluate_weak_ch(v, b, 0.0).violated());
    }
}
