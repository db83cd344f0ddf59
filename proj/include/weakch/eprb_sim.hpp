#pragma once

// Monte Carlo EPRB runs: draw a setting pair, then an outcome pair, count,
// estimate the CH terms with Wald errors and test the (weak) CH inequality
// at a k-sigma margin.

#include <array>
#include <cstdint>
#include <optional>

#include "weakch/eprb_model.hpp"
#include "weakch/inequalities.hpp"
#include "weakch/qm_singlet.hpp"

namespace weakch {

struct SimConfig {
    std::uint64_t seed = 0;
    std::uint64_t n = 1;
    std::array<Angle, 4> theta{};  // theta1, theta2 (Alice), theta3, theta4 (Bob)
    // probability of each setting pair, index 2a + b: (1,3), (1,4), (2,3), (2,4)
    std::array<double, 4> setting_probs{0.25, 0.25, 0.25, 0.25};
    // outcome statistics come from this model instead of the singlet when set
    std::optional<EprbModel> model;
    unsigned threads = 0;  // 0: one per hardware thread

    /// Throws std::invalid_argument for n < 1, negative setting
    /// probabilities or a sum off one by more than 1e-12.
    void validate() const;

    /// p(a), p(b), p(ab) for the setting pair (a, b).
    SettingProbs pair_probs(int a, int b) const;
};

/// Runs per shard; shard s draws from the stream (seed, s).
inline constexpr std::uint64_t kShardSize = 65536;

struct CountsTable {
    // counts[a][b][x][y], outcome index 0 = +
    std::array<std::array<std::array<std::array<std::uint64_t, 2>, 2>, 2>, 2> counts{};
    std::uint64_t n = 0;

    std::uint64_t pair_total(int a, int b) const;
    std::uint64_t total() const;
};

/// Each run independently draws a setting pair and then an outcome pair
/// from the singlet (or the model's conditional) table. Deterministic per
/// seed for any thread count. Throws ZeroConditioner if the model gives a
/// sampled setting pair no mass.
CountsTable sample_runs(const SimConfig& cfg);

struct ProbEstimate {
    std::uint64_t hits = 0;
    std::uint64_t trials = 0;

    bool defined() const { return trials > 0; }
    /// Relative frequency; throws UndefinedEstimate without trials.
    double value() const;
    /// Wald standard error sqrt(p(1-p)/n); throws UndefinedEstimate without trials.
    double se() const;
};

struct Estimates {
    // p(x y | a b)
    std::array<std::array<std::array<std::array<ProbEstimate, 2>, 2>, 2>, 2> joint;
    std::array<ProbEstimate, 2> alice_plus;  // p(+ | a), pooled over Bob's setting
    std::array<ProbEstimate, 2> bob_plus;    // p(+ | b), pooled over Alice's setting

    /// The six CH inputs; throws UndefinedEstimate if any is undefined.
    ChTerms ch_terms() const;
};

Estimates estimate(const CountsTable& t);

struct EmpiricalChReport {
    WeakChReport report;        // value is the point estimate
    double se = 0.0;            // root-sum-square of the six term errors
    double k_sigma = 0.0;
    double margin_lower = 0.0;  // (value - lower) / se
    double margin_upper = 0.0;  // (upper - value) / se
    bool declared_lower = false;
    bool declared_upper = false;

    bool declared() const { return declared_lower || declared_upper; }
};

/// Violation is declared only when a bound is exceeded by more than
/// k_sigma standard errors. The two marginals overlap with the joint
/// subsamples; that covariance is ignored. Throws UndefinedEstimate.
EmpiricalChReport test_inequality(const Estimates& est, double epsilon, double k_sigma,
                                  const std::array<SettingProbs, 4>& sp);
EmpiricalChReport test_inequality(const Estimates& est, double epsilon, double k_sigma);

}  // namespace weakch
