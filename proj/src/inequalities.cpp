#include "weakch/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "weakch/errors.hpp"

namespace weakch {

void SettingProbs::validate() const {
    const auto in_unit = [](double p) { return p > 0.0 && p <= 1.0; };
    if (!in_unit(p_a) || !in_unit(p_b) || !in_unit(p_ab)) {
        throw BadSettingProbs("setting probabilities must lie in (0, 1]");
    }
    if (p_ab > std::min(p_a, p_b) + kInequalityTolerance) {
        throw BadSettingProbs("p(ab) exceeds min(p(a), p(b))");
    }
}

CorrectionTerms correction_terms(double epsilon, const SettingProbs& sp) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw BadEpsilon("epsilon must lie in [0, 1], got " + std::to_string(epsilon));
    }
    sp.validate();
    const double r = std::sqrt(epsilon);
    const double scale = (sp.p_a + sp.p_b) / sp.p_ab;
    CorrectionTerms ct;
    ct.d_minus_ab = scale * r;
    ct.d_plus_ab = scale * (5.0 * r - 2.0 * epsilon);
    ct.d_minus = r;
    ct.d_plus = 4.0 * r - 2.0 * epsilon;
    ct.epsilon = epsilon;
    return ct;
}

double ch_expression(double p_ab, double p_ab2, double p_a2b2, double p_a2b, double p_a, double p_b2) {
    return p_ab + p_ab2 + p_a2b2 - p_a2b - p_a - p_b2;
}

WeakBounds weak_ch_bounds(const CorrectionTerms& ct13, const CorrectionTerms& ct14,
                          const CorrectionTerms& ct24, const CorrectionTerms& ct23) {
    const double eps = ct13.epsilon;
    if (ct14.epsilon != eps || ct24.epsilon != eps || ct23.epsilon != eps) {
        throw MixedEpsilon("correction terms were computed for different epsilons");
    }
    // The single-direction terms only depend on eps, so any of the four will do.
    WeakBounds b;
    b.lower = -1.0 - ct13.d_minus_ab - ct14.d_minus_ab - ct24.d_minus_ab - ct23.d_plus_ab -
              2.0 * ct13.d_plus;
    b.upper = ct13.d_plus_ab + ct14.d_plus_ab + ct24.d_plus_ab + ct23.d_minus_ab + 2.0 * ct13.d_minus;
    return b;
}

WeakBounds weak_ch_bounds(double epsilon, const SettingProbs& sp) {
    const CorrectionTerms ct = correction_terms(epsilon, sp);
    return weak_ch_bounds(ct, ct, ct, ct);
}

WeakChReport evaluate_weak_ch(double value, WeakBounds bounds, double epsilon) {
    WeakChReport r;
    r.value = value;
    r.lower = bounds.lower;
    r.upper = bounds.upper;
    r.epsilon = epsilon;
    r.violated_lower = value < bounds.lower - kInequalityTolerance;
    r.violated_upper = value > bounds.upper + kInequalityTolerance;
    return r;
}

WeakChReport evaluate_weak_ch(const ChTerms& terms, WeakBounds bounds, double epsilon) {
    WeakChReport r = evaluate_weak_ch(terms.value(), bounds, epsilon);
    r.terms = terms;
    return r;
}

bool ch_holds(double value) {
    return value >= -1.0 - kInequalityTolerance && value <= kInequalityTolerance;
}

double solve_threshold(double linear, double quadratic, double rhs) {
    // Smaller root of quadratic*x^2 - linear*x + rhs = 0, written as
    // 2 rhs / (linear + sqrt(disc)) to avoid cancellation for small rhs.
    if (quadratic == 0.0) {
        const double x = rhs / linear;
        return x * x;
    }
    const double disc = linear * linear - 4.0 * quadratic * rhs;
    if (disc < 0.0) throw BadEpsilon("threshold equation has no real root");
    const double x = 2.0 * rhs / (linear + std::sqrt(disc));
    return x * x;
}

EpsilonThresholds epsilon_thresholds() {
    // With p(a) = p(b) = 1/2 and p(ab) = 1/4 the weak bounds are
    // -1 - (40 r - 12 eps) and 66 r - 24 eps, r = sqrt(eps).
    const double gap = kQuantumChMax;  // distance of either QM extremum from the CH interval
    return {solve_threshold(40.0, 12.0, gap), solve_threshold(66.0, 24.0, gap)};
}

SettingTables singlet_tables(const DirectionConfig& cfg) {
    SettingTables tables(cfg.alice.size(), std::vector<OutcomeTable>(cfg.bob.size()));
    for (std::size_t i = 0; i < cfg.alice.size(); ++i) {
        for (std::size_t j = 0; j < cfg.bob.size(); ++j) {
            const Angle phi = cfg.alice[i] - cfg.bob[j];
            for (int x = 0; x < 2; ++x) {
                for (int y = 0; y < 2; ++y) {
                    tables[i][j][x][y] = joint_prob(phi, x == 0 ? Outcome::plus : Outcome::minus,
                                                    y == 0 ? Outcome::plus : Outcome::minus);
                }
            }
        }
    }
    return tables;
}

std::vector<double> no_signalling_residuals(const SettingTables& tables) {
    const std::size_t na = tables.size();
    const std::size_t nb = na ? tables.front().size() : 0;
    for (const auto& row : tables) {
        if (row.size() != nb) throw UnnormalizedTable("setting tables have ragged rows");
        for (const auto& t : row) {
            double s = 0.0;
            for (const auto& r : t) {
                for (double p : r) {
                    if (p < 0.0) throw UnnormalizedTable("negative entry in outcome table");
                    s += p;
                }
            }
            if (std::abs(s - 1.0) > 1e-9) {
                throw UnnormalizedTable("outcome table sums to " + std::to_string(s));
            }
        }
    }

    std::vector<double> out;
    const auto alice_marginal = [&](std::size_t i, std::size_t j, int x) {
        return tables[i][j][x][0] + tables[i][j][x][1];
    };
    const auto bob_marginal = [&](std::size_t i, std::size_t j, int y) {
        return tables[i][j][0][y] + tables[i][j][1][y];
    };
    for (std::size_t i = 0; i < na; ++i) {
        for (int x = 0; x < 2; ++x) {
            for (std::size_t j = 0; j < nb; ++j) {
                for (std::size_t k = j + 1; k < nb; ++k) {
                    out.push_back(alice_marginal(i, j, x) - alice_marginal(i, k, x));
                }
            }
        }
    }
    for (std::size_t j = 0; j < nb; ++j) {
        for (int y = 0; y < 2; ++y) {
            for (std::size_t i = 0; i < na; ++i) {
                for (std::size_t k = i + 1; k < na; ++k) {
                    out.push_back(bob_marginal(i, j, y) - bob_marginal(k, j, y));
                }
            }
        }
    }
    return out;
}

bool tsirelson_check(double value) {
    return value >= kQuantumChMin - kInequalityTolerance && value <= kQuantumChMax + kInequalityTolerance;
}

}  // namespace weakch
