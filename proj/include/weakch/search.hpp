#pragma once

// Numerical searches: the measurement angles that extremize the CH
// combination for the singlet, and an exploratory local search over
// separate-common-cause models that break the strict CH inequality while
// keeping the weak one.

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "weakch/eprb_model.hpp"
#include "weakch/inequalities.hpp"
#include "weakch/qm_singlet.hpp"

namespace weakch {

enum class AngleMode { minimize, maximize };

struct AngleOptimum {
    std::array<Angle, 4> theta;  // theta1 is pinned to 0
    double value = 0.0;
    std::size_t evaluations = 0;
};

/// Coarse grid over (theta2, theta3, theta4) with theta1 = 0, shifted by a
/// seeded random offset, then compass search with step halving.
/// Throws std::invalid_argument for grid < 8.
AngleOptimum optimize_angles(std::uint64_t seed, std::size_t grid, std::size_t refine_iters, AngleMode mode);

/// Sum of squared residuals of validate_loc, validate_no_conspiracy and
/// validate_screening (partner-direction causes only).
double constraint_penalty(const EprbModel& m);

/// Everything the search needs from a weight vector, in one pass over the
/// atoms. `penalty` equals constraint_penalty of the same model up to
/// rounding.
struct ModelSummary {
    double penalty = 0.0;
    double eps_global = 0.0;
    double ch_value = 0.0;
    WeakBounds bounds;
};

/// Weights in EprbModel order; they are normalized internally.
ModelSummary summarize(const CauseCards& cards, std::span<const double> weights);

struct SearchConfig {
    std::uint64_t seed = 0;
    std::size_t restarts = 4;
    std::size_t max_iters = 20000;
    CauseCards cards{2, 2, 2, 2};
    double step0 = 0.002;
    double decay = 0.9998;
    double penalty_weight = 100.0;
    double init_noise = 0.01;  // weight of the random simplex point in the starting blend
    double eps_lo = 0.0;
    double eps_hi = 0.05;
    unsigned threads = 0;  // 0: one per hardware thread

    /// Throws std::invalid_argument when restarts < 1, a cardinality < 2,
    /// step0 <= 0, decay or init_noise outside (0, 1] / [0, 1], a negative
    /// penalty weight or an empty band.
    void validate() const;
};

/// Feasibility tolerance on the re-validated penalty.
inline constexpr double kFeasibilityTolerance = 1e-9;

struct TracePoint {
    double penalty = 0.0;
    double objective = 0.0;
};

struct SearchResult {
    explicit SearchResult(EprbModel m) : model(std::move(m)) {}

    EprbModel model;
    std::size_t restart = 0;      // restart that produced the model
    double objective = 0.0;
    double penalty = 0.0;         // recomputed with the validators
    double ch_value = 0.0;
    double eps_global = 0.0;
    WeakChReport weak_report;
    bool strict_violated = false;
    std::vector<TracePoint> trace;  // incumbent after each iteration of the reported restart
    bool feasible = false;
};

/// Infeasible outcomes are ordinary results with feasible = false.
SearchResult search_counterexample(const SearchConfig& cfg);

}  // namespace weakch
