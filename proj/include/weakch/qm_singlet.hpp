#pragma once

// Quantum predictions for the spin singlet measured along two coplanar
// directions, the epsilon profile of a set of measurement directions and
// the six-term Clauser-Horne combination.

#include <array>
#include <cstddef>
#include <numbers>
#include <vector>

namespace weakch {

/// Angle in radians, canonicalized to [0, 2*pi).
class Angle {
public:
    constexpr Angle() = default;
    explicit Angle(double radians);
    static Angle degrees(double deg);

    double radians() const { return value_; }
    Angle operator-(Angle other) const { return Angle(value_ - other.value_); }
    bool operator==(const Angle&) const = default;

private:
    double value_ = 0.0;
};

enum class Outcome { plus, minus };

/// p_{a,b}(A_a B_b) for directions separated by `phi`.
double joint_prob(Angle phi, Outcome alice, Outcome bob);

/// p_{a,b}(A_a) and p_{a,b}(B_b); one half for every direction.
constexpr double marginal_prob(Outcome) { return 0.5; }

struct DirectionConfig {
    std::vector<Angle> alice;
    std::vector<Angle> bob;
};

/// Conditional probabilities of the anticorrelated outcome pairs, indexed
/// [alice direction][bob direction]:
///   plus_a_given_minus_b[i][j] = p_{i,j}(+_i | -_j)
///   plus_b_given_minus_a[i][j] = p_{i,j}(+_j | -_i)
struct AnticorrelationTable {
    std::vector<std::vector<double>> plus_a_given_minus_b;
    std::vector<std::vector<double>> plus_b_given_minus_a;
};

struct EpsilonProfile {
    // eps_ab[i][j] = eps_{a_i,b_j}, eps_ba[i][j] = eps_{b_j,a_i}
    std::vector<std::vector<double>> eps_ab;
    std::vector<std::vector<double>> eps_ba;
    std::vector<double> eps_a;                // row minima
    std::vector<std::size_t> partner_of_a;    // index into bob directions
    std::vector<double> eps_b;                // column minima of eps_ba
    std::vector<std::size_t> partner_of_b;    // index into alice directions
    double eps_global = 0.0;
};

/// Throws std::invalid_argument if either side has no directions.
AnticorrelationTable singlet_anticorrelations(const DirectionConfig& cfg);

/// Profile from the singlet predictions.
EpsilonProfile epsilon_profile(const DirectionConfig& cfg);

/// Profile of an arbitrary (e.g. perturbed, non-quantum) world. Minimum ties
/// go to the lowest direction index.
EpsilonProfile epsilon_profile(const AnticorrelationTable& table);

/// The six probabilities entering the CH combination for Alice directions
/// 1, 2 and Bob directions 3, 4.
struct ChTerms {
    double p13 = 0.0;  // p_{1,3}(+1 +3)
    double p14 = 0.0;  // p_{1,4}(+1 +4)
    double p24 = 0.0;  // p_{2,4}(+2 +4)
    double p23 = 0.0;  // p_{2,3}(+2 +3)
    double p1 = 0.0;   // p(+1 | 1)
    double p4 = 0.0;   // p(+4 | 4)

    double value() const { return p13 + p14 + p24 - p23 - p1 - p4; }
};

/// theta = {theta1, theta2 (Alice), theta3, theta4 (Bob)}; phi_ij = theta_i - theta_j.
ChTerms ch_terms(const std::array<Angle, 4>& theta);
double ch_value(const std::array<Angle, 4>& theta);

/// Closed-form ends of the quantum (Tsirelson) interval of the CH combination.
inline constexpr double kQuantumChMin = -(std::numbers::sqrt2 + 1.0) / 2.0;
inline constexpr double kQuantumChMax = (std::numbers::sqrt2 - 1.0) / 2.0;

}  // namespace weakch
