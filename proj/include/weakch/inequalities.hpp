#pragma once

// The Clauser-Horne inequality, its weak form with epsilon-dependent
// correction terms, the epsilon thresholds for the quantum extrema, the
// no-signalling constraint and the Tsirelson interval.

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "weakch/qm_singlet.hpp"

namespace weakch {

/// Strict inequalities are evaluated as non-strict with this slack.
inline constexpr double kInequalityTolerance = 1e-12;

/// Setting probabilities p(a), p(b), p(ab) for one setting pair.
struct SettingProbs {
    double p_a = 0.5;
    double p_b = 0.5;
    double p_ab = 0.25;

    /// Throws BadSettingProbs unless all lie in (0,1] and p_ab <= min(p_a, p_b).
    void validate() const;
};

struct CorrectionTerms {
    double d_minus_ab = 0.0;  // (p_a + p_b) sqrt(eps) / p_ab
    double d_plus_ab = 0.0;   // (p_a + p_b) (5 sqrt(eps) - 2 eps) / p_ab
    double d_minus = 0.0;     // sqrt(eps)
    double d_plus = 0.0;      // 4 sqrt(eps) - 2 eps
    double epsilon = 0.0;
};

/// Throws BadEpsilon for eps outside [0,1], BadSettingProbs for invalid sp.
CorrectionTerms correction_terms(double epsilon, const SettingProbs& sp);

/// pAB + pAB' + pA'B' - pA'B - pA - pB'. Lies in [-1, 0] for any four events
/// of a classical probability space.
double ch_expression(double p_ab, double p_ab2, double p_a2b2, double p_a2b, double p_a, double p_b2);

struct WeakBounds {
    double lower = -1.0;
    double upper = 0.0;
};

/// Bounds of the weak CH inequality for Alice directions 1,2 and Bob
/// directions 3,4. Throws MixedEpsilon when the terms disagree on epsilon.
WeakBounds weak_ch_bounds(const CorrectionTerms& ct13, const CorrectionTerms& ct14,
                          const CorrectionTerms& ct24, const CorrectionTerms& ct23);

/// Convenience: the same setting probabilities for every pair.
WeakBounds weak_ch_bounds(double epsilon, const SettingProbs& sp);

struct WeakChReport {
    double value = 0.0;
    double lower = -1.0;
    double upper = 0.0;
    bool violated_lower = false;
    bool violated_upper = false;
    double epsilon = 0.0;
    std::optional<ChTerms> terms;

    bool violated() const { return violated_lower || violated_upper; }
};

WeakChReport evaluate_weak_ch(double value, WeakBounds bounds, double epsilon);
WeakChReport evaluate_weak_ch(const ChTerms& terms, WeakBounds bounds, double epsilon);

/// Strict CH check with the same tolerance convention: -1 <= value <= 0.
bool ch_holds(double value);

/// Smallest x >= 0 with linear*x - quadratic*x^2 = rhs, solved in closed
/// form. Returns eps = x^2.
double solve_threshold(double linear, double quadratic, double rhs);

struct EpsilonThresholds {
    double eps_lower_max = 0.0;  // largest eps for which the QM minimum breaks the lower bound
    double eps_upper_max = 0.0;  // same for the QM maximum and the upper bound
};

/// Thresholds for symmetric settings p(a) = p(b) = 1/2, p(ab) = 1/4.
EpsilonThresholds epsilon_thresholds();

/// p(A_a B_b | a b) indexed [alice outcome][bob outcome], 0 = plus.
using OutcomeTable = std::array<std::array<double, 2>, 2>;

/// tables[i][j] is the outcome table for Alice setting i and Bob setting j.
using SettingTables = std::vector<std::vector<OutcomeTable>>;

/// Singlet tables for the given directions.
SettingTables singlet_tables(const DirectionConfig& cfg);

/// Marginal differences across the far setting: for every Alice setting and
/// outcome, sum_B p(A,B|a,b) - sum_B p(A,B|a,b') over all b < b', then the
/// same for Bob. Throws UnnormalizedTable if an entry is negative or a table
/// does not sum to one within 1e-9.
std::vector<double> no_signalling_residuals(const SettingTables& tables);

/// True iff value lies in the quantum interval [-(sqrt2+1)/2, (sqrt2-1)/2]
/// within 1e-12.
bool tsirelson_check(double value);

}  // namespace weakch
