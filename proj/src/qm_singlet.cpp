#include "weakch/qm_singlet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace weakch {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double canonical(double radians) {
    double r = std::fmod(radians, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    // fmod of a tiny negative value can round up to exactly 2*pi
    if (r >= kTwoPi) r = 0.0;
    return r;
}

double sin2_half(Angle phi) {
    const double s = std::sin(phi.radians() / 2.0);
    return s * s;
}

}  // namespace

Angle::Angle(double radians) : value_(canonical(radians)) {}

Angle Angle::degrees(double deg) { return Angle(deg * std::numbers::pi / 180.0); }

double joint_prob(Angle phi, Outcome alice, Outcome bob) {
    const double s2 = sin2_half(phi);
    return alice == bob ? 0.5 * s2 : 0.5 * (1.0 - s2);
}

AnticorrelationTable singlet_anticorrelations(const DirectionConfig& cfg) {
    if (cfg.alice.empty() || cfg.bob.empty()) {
        throw std::invalid_argument("both sides need at least one measurement direction");
    }
    AnticorrelationTable t;
    t.plus_a_given_minus_b.assign(cfg.alice.size(), std::vector<double>(cfg.bob.size()));
    t.plus_b_given_minus_a = t.plus_a_given_minus_b;
    for (std::size_t i = 0; i < cfg.alice.size(); ++i) {
        for (std::size_t j = 0; j < cfg.bob.size(); ++j) {
            const Angle phi = cfg.alice[i] - cfg.bob[j];
            t.plus_a_given_minus_b[i][j] =
                joint_prob(phi, Outcome::plus, Outcome::minus) / marginal_prob(Outcome::minus);
            t.plus_b_given_minus_a[i][j] =
                joint_prob(phi, Outcome::minus, Outcome::plus) / marginal_prob(Outcome::minus);
        }
    }
    return t;
}

EpsilonProfile epsilon_profile(const DirectionConfig& cfg) {
    return epsilon_profile(singlet_anticorrelations(cfg));
}

EpsilonProfile epsilon_profile(const AnticorrelationTable& table) {
    const std::size_t na = table.plus_a_given_minus_b.size();
    if (na == 0 || table.plus_b_given_minus_a.size() != na) {
        throw std::invalid_argument("anticorrelation table has inconsistent shape");
    }
    const std::size_t nb = table.plus_a_given_minus_b.front().size();
    if (nb == 0) throw std::invalid_argument("anticorrelation table has no bob directions");

    EpsilonProfile p;
    p.eps_ab.assign(na, std::vector<double>(nb));
    p.eps_ba = p.eps_ab;
    for (std::size_t i = 0; i < na; ++i) {
        if (table.plus_a_given_minus_b[i].size() != nb || table.plus_b_given_minus_a[i].size() != nb) {
            throw std::invalid_argument("anticorrelation table has ragged rows");
        }
        for (std::size_t j = 0; j < nb; ++j) {
            p.eps_ab[i][j] = std::clamp(1.0 - table.plus_a_given_minus_b[i][j], 0.0, 1.0);
            p.eps_ba[i][j] = std::clamp(1.0 - table.plus_b_given_minus_a[i][j], 0.0, 1.0);
        }
    }

    p.eps_a.assign(na, std::numeric_limits<double>::infinity());
    p.partner_of_a.assign(na, 0);
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            if (p.eps_ab[i][j] < p.eps_a[i]) {
                p.eps_a[i] = p.eps_ab[i][j];
                p.partner_of_a[i] = j;
            }
        }
    }
    p.eps_b.assign(nb, std::numeric_limits<double>::infinity());
    p.partner_of_b.assign(nb, 0);
    for (std::size_t j = 0; j < nb; ++j) {
        for (std::size_t i = 0; i < na; ++i) {
            if (p.eps_ba[i][j] < p.eps_b[j]) {
                p.eps_b[j] = p.eps_ba[i][j];
                p.partner_of_b[j] = i;
            }
        }
    }

    p.eps_global = 0.0;
    for (double e : p.eps_a) p.eps_global = std::max(p.eps_global, e);
    for (double e : p.eps_b) p.eps_global = std::max(p.eps_global, e);
    return p;
}

ChTerms ch_terms(const std::array<Angle, 4>& theta) {
    const auto pp = [&](int i, int j) { return joint_prob(theta[i] - theta[j], Outcome::plus, Outcome::plus); };
    ChTerms t;
    t.p13 = pp(0, 2);
    t.p14 = pp(0, 3);
    t.p24 = pp(1, 3);
    t.p23 = pp(1, 2);
    t.p1 = marginal_prob(Outcome::plus);
    t.p4 = marginal_prob(Outcome::plus);
    return t;
}

double ch_value(const std::array<Angle, 4>& theta) { return ch_terms(theta).value(); }

}  // namespace weakch
