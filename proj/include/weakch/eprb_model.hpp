#pragma once

// Joint distribution of an EPRB run: settings (Alice 1|2, Bob 3|4), both
// outcomes and the values of four separate common causes, one per
// measurement direction. Cause k partitions the runs for the correlation
// between direction k and its partner direction on the other side.
//
// Atom layout is row-major over
//   (alice setting, bob setting, alice outcome, bob outcome, c1, c2, c3, c4)
// with sizes (2, 2, 2, 2, n1, n2, n3, n4); outcome index 0 is "+".

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "weakch/common_cause.hpp"
#include "weakch/inequalities.hpp"
#include "weakch/prob_core.hpp"
#include "weakch/qm_singlet.hpp"

namespace weakch {

using CauseCards = std::array<std::size_t, 4>;

struct GridPoint {
    int a = 0;  // Alice setting: 0 -> direction 1, 1 -> direction 2
    int b = 0;  // Bob setting:   0 -> direction 3, 1 -> direction 4
    int x = 0;  // Alice outcome, 0 = +
    int y = 0;  // Bob outcome, 0 = +
    std::array<std::size_t, 4> c{};
};

class EprbModel {
public:
    /// Weights in the documented row-major order; normalized on construction.
    /// Throws std::invalid_argument for a cardinality < 1 or a size mismatch.
    EprbModel(CauseCards cards, std::span<const double> weights);

    static std::size_t atom_count(const CauseCards& cards);

    const FiniteProbSpace& space() const { return space_; }
    const CauseCards& cards() const { return cards_; }
    std::span<const double> weights() const { return space_.weights(); }

    std::size_t index(const GridPoint& g) const;
    GridPoint point(std::size_t atom) const;

    const Event& alice_setting(int a) const { return alice_setting_[a]; }
    const Event& bob_setting(int b) const { return bob_setting_[b]; }
    const Event& setting_pair(int a, int b) const { return setting_pair_[2 * a + b]; }
    const Event& alice_outcome(int x) const { return alice_outcome_[x]; }
    const Event& bob_outcome(int y) const { return bob_outcome_[y]; }
    /// Cell i of the cause attached to direction d (0..3 for directions 1..4).
    const Event& cause_cell(int d, std::size_t i) const { return cause_cells_[d][i]; }
    Partition cause_partition(int d) const;

    SettingProbs setting_probs(int a, int b) const;

private:
    template <class Pred>
    Event select(Pred pred) const;

    CauseCards cards_;
    FiniteProbSpace space_;
    std::array<Event, 2> alice_setting_, bob_setting_, alice_outcome_, bob_outcome_;
    std::array<Event, 4> setting_pair_;
    std::array<std::vector<Event>, 4> cause_cells_;
};

/// p(A, B | a b) for the four setting pairs. Pairs with no mass get a zero table.
SettingTables outcome_tables(const EprbModel& m);

/// p_{a,b}(+_a | -_b) and p_{a,b}(+_b | -_a) from the model's own
/// distribution. Undefined conditionals are reported as 0 (eps = 1).
AnticorrelationTable anticorrelations(const EprbModel& m);
EpsilonProfile epsilon_profile(const EprbModel& m);

/// Six CH terms read off the model (directions 1, 2 for Alice; 3, 4 for Bob).
/// Throws ZeroConditioner if a setting pair has no mass.
ChTerms ch_terms(const EprbModel& m);

/// Weak CH bounds with the model's setting probabilities and the given eps.
WeakBounds weak_ch_bounds(const EprbModel& m, double epsilon);

struct Residual {
    std::string label;
    double value = 0.0;
};

struct ResidualReport {
    std::vector<Residual> entries;
    std::vector<std::string> skipped;  // conditioning events of zero mass

    double max_abs() const;
    double sum_sq() const;
    void append(const ResidualReport& other);
};

/// p(A_a | a b C_i) - p(A_a | a C_i) and p(B_b | a b C_i) - p(B_b | b C_i)
/// for every cause, cell, setting pair and outcome.
ResidualReport validate_loc(const EprbModel& m);

/// The five product conditions between settings and the direction causes.
ResidualReport validate_no_conspiracy(const EprbModel& m);

/// Screening-off of each direction's correlation with its partner by the
/// direction's own cause, within the partner setting pair.
ResidualReport validate_screening(const EprbModel& m, const EpsilonProfile& profile);
ResidualReport validate_screening(const EprbModel& m);

/// Screening of every outcome pair under every setting pair by cause d (a
/// "common common cause"). Diagnostic only; not an assumption of the bounds.
ResidualReport common_common_cause_residuals(const EprbModel& m, int d);

/// Union of the cells of cause d whose conditional of the "+" outcome in
/// direction d, given setting d, is at least 1 - sqrt(eps_d) (within 1e-12).
/// Throws PreconditionViolated if LOC residuals exceed 1e-9.
Event build_aggregate_cause(const EprbModel& m, int d, const EpsilonProfile& profile);
Event build_aggregate_cause(const EprbModel& m, int d);

struct PairBoundCheck {
    int a = 0;
    int b = 0;
    double p_plus_plus = 0.0;  // p(+_a +_b | a b)
    double p_causes = 0.0;     // p(C^a C^b)
    double d_plus = 0.0;
    double d_minus = 0.0;
    bool lower_ok = false;     // p_plus_plus - d_plus < p_causes
    bool upper_ok = false;     // p_causes <= p_plus_plus + d_minus
};

struct DirectionBoundCheck {
    int d = 0;
    double p_plus = 0.0;  // p(+_d | d)
    double p_cause = 0.0; // p(C^d)
    bool lower_ok = false;
    bool upper_ok = false;
};

struct JointCauseReport {
    double epsilon = 0.0;
    EpsilonProfile profile;
    std::array<PairBoundCheck, 4> pairs;        // (1,3), (1,4), (2,3), (2,4)
    std::array<DirectionBoundCheck, 4> directions;
    double max_assumption_residual = 0.0;

    bool ok() const;
};

/// Checks the joint-cause bounds with the model's eps_global (or the
/// override). Throws PreconditionViolated unless LOC, no-conspiracy and
/// partner screening hold within 1e-9 and every outcome is fair (1/2) under
/// every setting pair within 1e-9.
JointCauseReport joint_cause_bounds_check(const EprbModel& m, std::optional<double> eps_override = {});

/// Local model with one shared hidden value lambda copied into all four
/// causes (so every screening condition holds exactly), fair marginals via
/// mirrored lambda pairs, partner anticorrelations within eps_max of perfect
/// and a random setting distribution independent of lambda. All four
/// cardinalities equal `card`. eps_max = 0 yields a deterministic model.
EprbModel random_local_model(std::uint64_t seed, std::size_t card, double eps_max);

}  // namespace weakch
