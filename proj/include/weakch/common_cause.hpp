#pragma once

// Verification engine for almost perfectly correlated events with a
// screening-off common cause: the three-way split of the cause values, the
// bounds on p(A) in terms of the near-deterministic cells, a generator for
// exactly screened test models and the 16-atom Clauser-Horne oracle.
//
// The EPRB-specific validators (locality, no-conspiracy, aggregate causes,
// joint-cause bounds) live in eprb_model.hpp.

#include <array>
#include <cstdint>
#include <vector>

#include "weakch/prob_core.hpp"

namespace weakch {

/// Tolerance for the screening-off and p(A) = p(B) = 1/2 preconditions and
/// for the strict side of the bounds.
inline constexpr double kModelTolerance = 1e-9;

struct PairwiseCcModel {
    FiniteProbSpace space;
    Event a;
    Event b;
    Partition c;

    /// Throws ForeignEvent when events or cells don't belong to `space`.
    PairwiseCcModel(FiniteProbSpace space, Event a, Event b, Partition c);
};

/// Cell-classification cutoffs. I1 = {p(A|C_i) >= 1 - m sqrt(eps)},
/// I3 = {p(A|C_i) <= m sqrt(eps)}, I2 the rest; I2 is further split at
/// |p(A|C_i) - p(B|C_i)| >= s sqrt(eps). Defaults m = 1, s = 1/2.
struct Prop1Cutoffs {
    double membership = 1.0;
    double split = 0.5;
};

struct Prop1Partition {
    std::vector<std::size_t> i1;
    std::vector<std::size_t> i2;
    std::vector<std::size_t> i3;
};

struct Prop1Diagnostics {
    double half_epsilon = 0.0;
    double sum_a_not_b = 0.0;   // sum_i p(A|C_i)(1 - p(B|C_i)) p(C_i), equals eps/2
    double sum_b_not_a = 0.0;   // mirror, equals eps/2
    double i2_abs_diff = 0.0;   // sum over I2 of |p(A|C_i) - p(B|C_i)| p(C_i), at most eps
    double i2_split_mass = 0.0; // mass of the I2 cells with a large A/B difference
    double i2_split_bound = 0.0;
    double i2_weighted = 0.0;   // sum over I2 of p(A|C_i) p(C_i), below 3 sqrt(eps) - 2 eps
    double i2_weighted_bound = 0.0;
};

struct Prop1Report {
    double epsilon = 0.0;
    double p_a = 0.0;
    double p_b = 0.0;
    double p_c = 0.0;  // total mass of I1
    double lower_bound = 0.0;  // p_c - sqrt(eps)
    double upper_bound = 0.0;  // p_c + 4 sqrt(eps) - 2 eps
    Prop1Partition partition;
    bool lower_ok = false;
    bool upper_ok = false;
    Prop1Diagnostics diagnostics;
    double max_screening_residual = 0.0;
    std::vector<std::size_t> null_cells;

    bool diagnostics_ok(double tol = kModelTolerance) const;
    bool ok() const { return lower_ok && upper_ok; }
};

/// Throws PreconditionViolated unless every cell screens off A from B within
/// 1e-9 and p(A), p(B) are within 1e-9 of one half. Null cells go to I3.
Prop1Partition prop1_partition(const PairwiseCcModel& m, const Prop1Cutoffs& cut = {});

Prop1Report prop1_check(const PairwiseCcModel& m, const Prop1Cutoffs& cut = {});

/// Builds an exactly screened model with p(A) = p(B) = 1/2 and
/// 1 - p(A|B) = eps_target. Cells come in mirror pairs (p(A|C), p(B|C)) and
/// (1 - p(A|C), 1 - p(B|C)); an odd cell count adds one cell with both
/// conditionals at 1/2. Throws GenerationFailed if no model is found within
/// 10^4 draws (always the case for a single cell).
PairwiseCcModel random_screened_model(std::uint64_t seed, std::size_t n_cells, double eps_target);

/// Residual of the Clauser-Horne expression over a distribution on the 16
/// atoms of four events A, A', B, B'. Atom index = 8A + 4A' + 2B + B' with 1
/// meaning the event occurs.
struct ChOracleResult {
    double value = 0.0;           // from the six marginals
    double identity_value = 0.0;  // minus the mass of the eight atoms that contribute -1
    bool in_bounds = false;       // -1 <= value <= 0 within 1e-12
};

/// Throws UnnormalizedInput for negative entries or a total off by > 1e-9.
ChOracleResult ch_atom_oracle(const std::array<double, 16>& atoms);

}  // namespace weakch
