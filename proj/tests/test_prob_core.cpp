#include "doctest.h"

#include <cmath>
#include <vector>

#include "weakch/prob_core.hpp"
#include "weakch/rng.hpp"

using namespace weakch;

namespace {

Event ev(std::size_t n, std::initializer_list<std::size_t> members) {
    std::vector<std::size_t> m(members);
    return Event(n, m);
}

}  // namespace

TEST_CASE("make_space normalizes and validates") {
    std::vector<double> one{1.0};
    auto s1 = make_space(one);
    CHECK(s1.size() == 1);
    CHECK(s1.weight(0) == 1.0);

    std::vector<double> half{0.5, 0.5};
    auto s2 = make_space(half);
    CHECK(s2.weight(0) == 0.5);
    CHECK(s2.weight(1) == 0.5);

    std::vector<double> twos{2.0, 2.0};
    auto s3 = make_space(twos);
    CHECK(s3.weight(0) == 0.5);
    CHECK(s3.weight(1) == 0.5);

    std::vector<double> none;
    CHECK_THROWS_AS(make_space(none), EmptySpace);
    std::vector<double> zeros{0.0, 0.0};
    CHECK_THROWS_AS(make_space(zeros), EmptySpace);
    std::vector<double> neg{0.5, -0.1, 0.6};
    CHECK_THROWS_AS(make_space(neg), NegativeWeight);
}

TEST_CASE("prob sums member weights") {
    std::vector<double> w{0.5, 0.5};
    auto s = make_space(w);
    CHECK(prob(s, s.full()) == 1.0);
    CHECK(prob(s, s.empty_event()) == 0.0);
    CHECK(prob(s, ev(2, {1})) == 0.5);

    CHECK_THROWS_AS(prob(s, ev(3, {0})), ForeignEvent);
    CHECK_THROWS_AS(ev(2, {2}), ForeignEvent);
    std::vector<std::string> bad{"nope"};
    CHECK_THROWS_AS(s.event(bad), ForeignEvent);
}

TEST_CASE("cond_prob") {
    std::vector<double> w{0.25, 0.25, 0.25, 0.25};
    auto s = make_space(w);
    const Event a = ev(4, {1, 2});
    const Event b = ev(4, {2, 3});
    CHECK(cond_prob(s, a, s.full()) == doctest::Approx(prob(s, a)).epsilon(1e-15));
    CHECK(cond_prob(s, a, a) == 1.0);
    // A n B = {2}: (1/4) / (1/2)
    CHECK(cond_prob(s, a, b) == 0.5);

    std::vector<double> w2{1.0, 0.0};
    auto s2 = make_space(w2);
    CHECK_THROWS_AS(cond_prob(s2, ev(2, {0}), ev(2, {1})), ZeroConditioner);
}

TEST_CASE("labelled space resolves events") {
    std::vector<double> w{1, 2, 3};
    auto s = make_space({"x", "y", "z"}, w);
    std::vector<std::string> labels{"x", "z"};
    CHECK(prob(s, s.event(labels)) == doctest::Approx(4.0 / 6.0));
    CHECK_THROWS_AS(make_space({"x", "x"}, std::vector<double>{1, 1}), std::invalid_argument);
}

TEST_CASE("partition validation") {
    CHECK_NOTHROW(Partition(4, {ev(4, {0, 1}), ev(4, {2, 3})}));
    CHECK_THROWS_AS(Partition(4, {ev(4, {0, 1}), ev(4, {1, 2, 3})}), InvalidPartition);
    CHECK_THROWS_AS(Partition(4, {ev(4, {0, 1}), ev(4, {2})}), InvalidPartition);
    CHECK_THROWS_AS(Partition(4, {ev(4, {0, 1}), ev(5, {2, 3})}), ForeignEvent);
}

TEST_CASE("screening residuals") {
    // atoms: 0 = AB, 1 = A~B, 2 = ~AB, 3 = ~A~B
    std::vector<double> w{0.4, 0.1, 0.1, 0.4};
    auto s = make_space(w);
    const Event a = ev(4, {0, 1});
    const Event b = ev(4, {0, 2});

    SUBCASE("trivial partition gives the plain covariance") {
        const Partition c(4, {s.full()});
        const auto r = screening_residuals(s, a, b, c);
        REQUIRE(r.residuals.size() == 1);
        CHECK(*r.residuals[0] == doctest::Approx(0.4 - 0.5 * 0.5));
    }
    SUBCASE("deterministic cells screen off exactly") {
        const Partition c(4, {ev(4, {0}), ev(4, {3}), ev(4, {1}), ev(4, {2})});
        const auto r = screening_residuals(s, a, b, c);
        for (const auto& x : r.residuals) CHECK(*x == 0.0);
        CHECK(r.max_abs() == 0.0);
    }
    SUBCASE("null cells are skipped and listed") {
        std::vector<double> w0{0.5, 0.0, 0.0, 0.5};
        auto s0 = make_space(w0);
        const Partition c(4, {ev(4, {0, 3}), ev(4, {1, 2})});
        const auto r = screening_residuals(s0, a, b, c);
        REQUIRE(r.skipped.size() == 1);
        CHECK(r.skipped[0] == 1);
        CHECK_FALSE(r.residuals[1].has_value());
    }
}

TEST_CASE("property: complement and conditional additivity") {
    CounterRng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(12);
        std::vector<double> w(n);
        for (auto& x : w) x = rng.exponential();
        const auto s = make_space(w);

        Event e = Event::none(n), f = Event::none(n), g = Event::none(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = rng.uniform();
            if (u < 0.3) e.insert(i);
            else if (u < 0.6) f.insert(i);
            if (rng.uniform() < 0.7) g.insert(i);
        }
        CHECK(std::abs(prob(s, e) + prob(s, e.complement()) - 1.0) <= 1e-12);
        if (prob(s, g) > 0.0) {
            // e and f are disjoint by construction
            const double lhs = cond_prob(s, e | f, g);
            const double rhs = cond_prob(s, e, g) + cond_prob(s, f, g);
            CHECK(std::abs(lhs - rhs) <= 1e-12);
            CHECK(std::abs(cond_prob(s, s.full(), g) - 1.0) <= 1e-12);
        }
    }
}
