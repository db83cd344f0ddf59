#include "weakch/eprb_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "weakch/rng.hpp"

namespace weakch {

namespace {

std::vector<std::string> grid_labels(const CauseCards& cards) {
    std::vector<std::string> labels;
    labels.reserve(EprbModel::atom_count(cards));
    const char* sign = "+-";
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y)
                    for (std::size_t c1 = 0; c1 < cards[0]; ++c1)
                        for (std::size_t c2 = 0; c2 < cards[1]; ++c2)
                            for (std::size_t c3 = 0; c3 < cards[2]; ++c3)
                                for (std::size_t c4 = 0; c4 < cards[3]; ++c4) {
                                    std::string l = "a";
                                    l += static_cast<char>('1' + a);
                                    l += 'b';
                                    l += static_cast<char>('3' + b);
                                    l += sign[x];
                                    l += sign[y];
                                    l += ":" + std::to_string(c1) + "." + std::to_string(c2) + "." +
                                         std::to_string(c3) + "." + std::to_string(c4);
                                    labels.push_back(std::move(l));
                                }
    return labels;
}

std::size_t grid_index(const CauseCards& cards, const GridPoint& g) {
    std::size_t i = static_cast<std::size_t>(((g.a * 2 + g.b) * 2 + g.x) * 2 + g.y);
    for (int d = 0; d < 4; ++d) i = i * cards[d] + g.c[d];
    return i;
}

std::string dir_name(int d) { return std::to_string(d + 1); }

const char* sign_name(int s) { return s == 0 ? "+" : "-"; }

// p(e | given), or nullopt if the conditioning event has no mass.
std::optional<double> cp(const FiniteProbSpace& s, const Event& e, const Event& given) {
    const double pg = prob(s, given);
    if (pg <= 0.0) return std::nullopt;
    return prob(s, e & given) / pg;
}

}  // namespace

EprbModel::EprbModel(CauseCards cards, std::span<const double> weights) : cards_(cards) {
    for (std::size_t n : cards) {
        if (n < 1) throw std::invalid_argument("cause cardinalities must be at least 1");
    }
    if (weights.size() != atom_count(cards)) {
        throw std::invalid_argument("expected " + std::to_string(atom_count(cards)) + " weights, got " +
                                    std::to_string(weights.size()));
    }
    space_ = make_space(grid_labels(cards), weights);

    for (int v = 0; v < 2; ++v) {
        alice_setting_[v] = select([v](const GridPoint& g) { return g.a == v; });
        bob_setting_[v] = select([v](const GridPoint& g) { return g.b == v; });
        alice_outcome_[v] = select([v](const GridPoint& g) { return g.x == v; });
        bob_outcome_[v] = select([v](const GridPoint& g) { return g.y == v; });
    }
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) setting_pair_[2 * a + b] = alice_setting_[a] & bob_setting_[b];
    for (int d = 0; d < 4; ++d)
        for (std::size_t i = 0; i < cards[d]; ++i)
            cause_cells_[d].push_back(select([d, i](const GridPoint& g) { return g.c[d] == i; }));
}

std::size_t EprbModel::atom_count(const CauseCards& cards) {
    return 16 * cards[0] * cards[1] * cards[2] * cards[3];
}

std::size_t EprbModel::index(const GridPoint& g) const { return grid_index(cards_, g); }

GridPoint EprbModel::point(std::size_t atom) const {
    GridPoint g;
    for (int d = 3; d >= 0; --d) {
        g.c[d] = atom % cards_[d];
        atom /= cards_[d];
    }
    g.y = static_cast<int>(atom % 2);
    atom /= 2;
    g.x = static_cast<int>(atom % 2);
    atom /= 2;
    g.b = static_cast<int>(atom % 2);
    atom /= 2;
    g.a = static_cast<int>(atom);
    return g;
}

template <class Pred>
Event EprbModel::select(Pred pred) const {
    Event e = Event::none(space_.size());
    for (std::size_t i = 0; i < space_.size(); ++i) {
        if (pred(point(i))) e.insert(i);
    }
    return e;
}

Partition EprbModel::cause_partition(int d) const {
    std::vector<Event> cells;
    for (std::size_t i = 0; i < cards_[d]; ++i) cells.push_back(cause_cell(d, i));
    return Partition(space_.size(), std::move(cells));
}

SettingProbs EprbModel::setting_probs(int a, int b) const {
    return {prob(space_, alice_setting(a)), prob(space_, bob_setting(b)), prob(space_, setting_pair(a, b))};
}

SettingTables outcome_tables(const EprbModel& m) {
    SettingTables t(2, std::vector<OutcomeTable>(2));
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const Event s = m.setting_pair(a, b);
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y)
                    t[a][b][x][y] = cp(m.space(), m.alice_outcome(x) & m.bob_outcome(y), s).value_or(0.0);
        }
    return t;
}

AnticorrelationTable anticorrelations(const EprbModel& m) {
    AnticorrelationTable t;
    t.plus_a_given_minus_b.assign(2, std::vector<double>(2, 0.0));
    t.plus_b_given_minus_a = t.plus_a_given_minus_b;
    const auto& s = m.space();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const Event pair = m.setting_pair(a, b);
            t.plus_a_given_minus_b[a][b] = cp(s, m.alice_outcome(0), pair & m.bob_outcome(1)).value_or(0.0);
            t.plus_b_given_minus_a[a][b] = cp(s, m.bob_outcome(0), pair & m.alice_outcome(1)).value_or(0.0);
        }
    return t;
}

EpsilonProfile epsilon_profile(const EprbModel& m) { return epsilon_profile(anticorrelations(m)); }

ChTerms ch_terms(const EprbModel& m) {
    const auto& s = m.space();
    const Event pp = m.alice_outcome(0) & m.bob_outcome(0);
    ChTerms t;
    t.p13 = cond_prob(s, pp, m.setting_pair(0, 0));
    t.p14 = cond_prob(s, pp, m.setting_pair(0, 1));
    t.p24 = cond_prob(s, pp, m.setting_pair(1, 1));
    t.p23 = cond_prob(s, pp, m.setting_pair(1, 0));
    t.p1 = cond_prob(s, m.alice_outcome(0), m.alice_setting(0));
    t.p4 = cond_prob(s, m.bob_outcome(0), m.bob_setting(1));
    return t;
}

WeakBounds weak_ch_bounds(const EprbModel& m, double epsilon) {
    const auto ct = [&](int a, int b) { return correction_terms(epsilon, m.setting_probs(a, b)); };
    return weak_ch_bounds(ct(0, 0), ct(0, 1), ct(1, 1), ct(1, 0));
}

double ResidualReport::max_abs() const {
    double r = 0.0;
    for (const auto& e : entries) r = std::max(r, std::abs(e.value));
    return r;
}

double ResidualReport::sum_sq() const {
    double r = 0.0;
    for (const auto& e : entries) r += e.value * e.value;
    return r;
}

void ResidualReport::append(const ResidualReport& other) {
    entries.insert(entries.end(), other.entries.begin(), other.entries.end());
    skipped.insert(skipped.end(), other.skipped.begin(), other.skipped.end());
}

ResidualReport validate_loc(const EprbModel& m) {
    ResidualReport rep;
    const auto& s = m.space();
    for (int d = 0; d < 4; ++d) {
        for (std::size_t i = 0; i < m.cards()[d]; ++i) {
            const Event cell = m.cause_cell(d, i);
            const std::string cname = "C" + dir_name(d) + "=" + std::to_string(i);
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    const std::string sname = "a" + dir_name(a) + "b" + dir_name(2 + b);
                    const Event ab_c = m.setting_pair(a, b) & cell;
                    if (prob(s, ab_c) <= 0.0) {
                        rep.skipped.push_back("loc|" + sname + "," + cname);
                        continue;
                    }
                    const Event a_c = m.alice_setting(a) & cell;
                    const Event b_c = m.bob_setting(b) & cell;
                    for (int o = 0; o < 2; ++o) {
                        rep.entries.push_back({"loc:A" + std::string(sign_name(o)) + "|" + sname + "," + cname,
                                               *cp(s, m.alice_outcome(o), ab_c) - *cp(s, m.alice_outcome(o), a_c)});
                        rep.entries.push_back({"loc:B" + std::string(sign_name(o)) + "|" + sname + "," + cname,
                                               *cp(s, m.bob_outcome(o), ab_c) - *cp(s, m.bob_outcome(o), b_c)});
                    }
                }
            }
        }
    }
    return rep;
}

ResidualReport validate_no_conspiracy(const EprbModel& m) {
    ResidualReport rep;
    const auto& s = m.space();
    const auto product = [&](const std::string& label, const Event& x, const Event& y) {
        rep.entries.push_back({label, prob(s, x & y) - prob(s, x) * prob(s, y)});
    };
    for (int a = 0; a < 2; ++a)
        for (std::size_t i = 0; i < m.cards()[a]; ++i)
            product("nc:a" + dir_name(a) + ",C" + dir_name(a) + "=" + std::to_string(i), m.alice_setting(a),
                    m.cause_cell(a, i));
    for (int b = 0; b < 2; ++b)
        for (std::size_t j = 0; j < m.cards()[2 + b]; ++j)
            product("nc:b" + dir_name(2 + b) + ",C" + dir_name(2 + b) + "=" + std::to_string(j), m.bob_setting(b),
                    m.cause_cell(2 + b, j));
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const Event ab = m.setting_pair(a, b);
            const std::string sname = "a" + dir_name(a) + "b" + dir_name(2 + b);
            for (std::size_t i = 0; i < m.cards()[a]; ++i)
                product("nc:" + sname + ",C" + dir_name(a) + "=" + std::to_string(i), ab, m.cause_cell(a, i));
            for (std::size_t j = 0; j < m.cards()[2 + b]; ++j)
                product("nc:" + sname + ",C" + dir_name(2 + b) + "=" + std::to_string(j), ab,
                        m.cause_cell(2 + b, j));
            for (std::size_t i = 0; i < m.cards()[a]; ++i)
                for (std::size_t j = 0; j < m.cards()[2 + b]; ++j)
                    product("nc:" + sname + ",C" + dir_name(a) + "=" + std::to_string(i) + ",C" +
                                dir_name(2 + b) + "=" + std::to_string(j),
                            ab, m.cause_cell(a, i) & m.cause_cell(2 + b, j));
        }
    }
    return rep;
}

ResidualReport validate_screening(const EprbModel& m, const EpsilonProfile& profile) {
    ResidualReport rep;
    const auto& s = m.space();
    for (int d = 0; d < 4; ++d) {
        const bool alice = d < 2;
        const int a = alice ? d : static_cast<int>(profile.partner_of_b[d - 2]);
        const int b = alice ? static_cast<int>(profile.partner_of_a[d]) : d - 2;
        // the correlated pair is "+" in direction d and "-" in its partner
        const Event plus_side = alice ? m.alice_outcome(0) : m.bob_outcome(0);
        const Event minus_side = alice ? m.bob_outcome(1) : m.alice_outcome(1);
        const Event pair = m.setting_pair(a, b);
        const std::string sname = "a" + dir_name(a) + "b" + dir_name(2 + b);
        for (std::size_t i = 0; i < m.cards()[d]; ++i) {
            const Event given = pair & m.cause_cell(d, i);
            const std::string label = "scr:" + sname + ",C" + dir_name(d) + "=" + std::to_string(i);
            if (prob(s, given) <= 0.0) {
                rep.skipped.push_back(label);
                continue;
            }
            rep.entries.push_back(
                {label, *cp(s, plus_side & minus_side, given) - *cp(s, plus_side, given) * *cp(s, minus_side, given)});
        }
    }
    return rep;
}

ResidualReport validate_screening(const EprbModel& m) { return validate_screening(m, epsilon_profile(m)); }

ResidualReport common_common_cause_residuals(const EprbModel& m, int d) {
    ResidualReport rep;
    const auto& s = m.space();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (std::size_t i = 0; i < m.cards()[d]; ++i) {
                const Event given = m.setting_pair(a, b) & m.cause_cell(d, i);
                const std::string base =
                    "a" + dir_name(a) + "b" + dir_name(2 + b) + ",C" + dir_name(d) + "=" + std::to_string(i);
                if (prob(s, given) <= 0.0) {
                    rep.skipped.push_back("ccc|" + base);
                    continue;
                }
                for (int x = 0; x < 2; ++x)
                    for (int y = 0; y < 2; ++y) {
                        const Event ex = m.alice_outcome(x), ey = m.bob_outcome(y);
                        rep.entries.push_back({"ccc:" + std::string(sign_name(x)) + sign_name(y) + "|" + base,
                                               *cp(s, ex & ey, given) - *cp(s, ex, given) * *cp(s, ey, given)});
                    }
            }
    return rep;
}

Event build_aggregate_cause(const EprbModel& m, int d, const EpsilonProfile& profile) {
    const double loc = validate_loc(m).max_abs();
    if (loc > kModelTolerance) {
        throw PreconditionViolated("LOC residual " + std::to_string(loc) + " exceeds 1e-9");
    }
    const bool alice = d < 2;
    const double eps_d = alice ? profile.eps_a[d] : profile.eps_b[d - 2];
    const double cutoff = 1.0 - std::sqrt(eps_d) - kProbTolerance;
    const Event setting = alice ? m.alice_setting(d) : m.bob_setting(d - 2);
    const Event plus = alice ? m.alice_outcome(0) : m.bob_outcome(0);

    Event agg = Event::none(m.space().size());
    for (std::size_t i = 0; i < m.cards()[d]; ++i) {
        const Event cell = m.cause_cell(d, i);
        const auto p = cp(m.space(), plus, setting & cell);
        if (p && *p >= cutoff) agg = agg | cell;
    }
    return agg;
}

Event build_aggregate_cause(const EprbModel& m, int d) { return build_aggregate_cause(m, d, epsilon_profile(m)); }

bool JointCauseReport::ok() const {
    for (const auto& p : pairs)
        if (!p.lower_ok || !p.upper_ok) return false;
    for (const auto& d : directions)
        if (!d.lower_ok || !d.upper_ok) return false;
    return true;
}

JointCauseReport joint_cause_bounds_check(const EprbModel& m, std::optional<double> eps_override) {
    JointCauseReport rep;
    rep.profile = epsilon_profile(m);
    const auto& s = m.space();

    ResidualReport all = validate_loc(m);
    all.append(validate_no_conspiracy(m));
    all.append(validate_screening(m, rep.profile));
    rep.max_assumption_residual = all.max_abs();
    if (rep.max_assumption_residual > kModelTolerance) {
        throw PreconditionViolated("assumption residual " + std::to_string(rep.max_assumption_residual) +
                                   " exceeds 1e-9");
    }
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const Event pair = m.setting_pair(a, b);
            const auto pa = cp(s, m.alice_outcome(0), pair);
            const auto pb = cp(s, m.bob_outcome(0), pair);
            if (!pa || !pb) throw PreconditionViolated("setting pair without mass");
            if (std::abs(*pa - 0.5) > kModelTolerance || std::abs(*pb - 0.5) > kModelTolerance) {
                throw PreconditionViolated("outcomes are not fair under every setting pair");
            }
        }

    rep.epsilon = eps_override.value_or(rep.profile.eps_global);
    std::array<Event, 4> agg;
    for (int d = 0; d < 4; ++d) agg[d] = build_aggregate_cause(m, d, rep.profile);

    const Event pp = m.alice_outcome(0) & m.bob_outcome(0);
    for (int k = 0; k < 4; ++k) {
        const int a = k / 2, b = k % 2;
        const CorrectionTerms ct = correction_terms(rep.epsilon, m.setting_probs(a, b));
        auto& pc = rep.pairs[k];
        pc.a = a;
        pc.b = b;
        pc.p_plus_plus = cond_prob(s, pp, m.setting_pair(a, b));
        pc.p_causes = prob(s, agg[a] & agg[2 + b]);
        pc.d_plus = ct.d_plus_ab;
        pc.d_minus = ct.d_minus_ab;
        pc.lower_ok = pc.p_plus_plus - pc.d_plus <= pc.p_causes + kModelTolerance;
        pc.upper_ok = pc.p_causes <= pc.p_plus_plus + pc.d_minus + kModelTolerance;
    }
    const CorrectionTerms ct = correction_terms(rep.epsilon, m.setting_probs(0, 0));
    for (int d = 0; d < 4; ++d) {
        auto& dc = rep.directions[d];
        dc.d = d;
        const bool alice = d < 2;
        dc.p_plus = alice ? cond_prob(s, m.alice_outcome(0), m.alice_setting(d))
                          : cond_prob(s, m.bob_outcome(0), m.bob_setting(d - 2));
        dc.p_cause = prob(s, agg[d]);
        dc.lower_ok = dc.p_plus - ct.d_plus <= dc.p_cause + kModelTolerance;
        dc.upper_ok = dc.p_cause <= dc.p_plus + ct.d_minus + kModelTolerance;
    }
    return rep;
}

EprbModel random_local_model(std::uint64_t seed, std::size_t card, double eps_max) {
    if (card < 2) throw std::invalid_argument("random_local_model needs card >= 2");
    if (!(eps_max >= 0.0 && eps_max <= 1.0)) throw std::invalid_argument("eps_max must lie in [0, 1]");
    const CauseCards cards{card, card, card, card};
    CounterRng rng(seed, 0x10CA1ULL);
    const std::size_t n_pairs = card / 2;
    const bool odd = card % 2 == 1;

    for (int draw = 0; draw < 10000; ++draw) {
        // Noise and the self-mirrored value each cost O(budget) in eps; a
        // quarter of eps_max leaves room for both.
        const double budget = eps_max / 4.0;
        const double noise = rng.uniform() < 0.2 ? 0.0 : budget * rng.uniform();
        const double w0 = odd ? budget * rng.uniform() : 0.0;

        std::vector<double> w(card, 0.0);
        std::vector<std::array<double, 2>> alpha(card), beta(card);  // p(+|setting, lambda)
        const bool swap_partners = rng.uniform() < 0.5;
        double total = 0.0;
        for (std::size_t k = 0; k < n_pairs; ++k) {
            w[2 * k] = rng.exponential();
            total += w[2 * k];
        }
        for (std::size_t k = 0; k < n_pairs; ++k) {
            const double wk = w[2 * k] * (1.0 - w0) / (2.0 * total);
            w[2 * k] = w[2 * k + 1] = wk;
            std::array<double, 2> t{};
            for (int a = 0; a < 2; ++a) {
                t[a] = rng.uniform() < 0.5 ? 0.0 : 1.0;
                alpha[2 * k][a] = std::abs(t[a] - noise * rng.uniform());
            }
            for (int b = 0; b < 2; ++b) {
                const int partner = swap_partners ? 1 - b : b;
                beta[2 * k][b] = std::abs((1.0 - t[partner]) - noise * rng.uniform());
            }
            for (int s = 0; s < 2; ++s) {
                alpha[2 * k + 1][s] = 1.0 - alpha[2 * k][s];
                beta[2 * k + 1][s] = 1.0 - beta[2 * k][s];
            }
        }
        if (odd) {
            w[card - 1] = w0;
            alpha[card - 1] = {0.5, 0.5};
            beta[card - 1] = {0.5, 0.5};
        }

        std::array<double, 4> q{};
        double qsum = 0.0;
        for (double& v : q) {
            v = 0.2 + rng.exponential();
            qsum += v;
        }

        std::vector<double> weights(EprbModel::atom_count(cards), 0.0);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int x = 0; x < 2; ++x)
                    for (int y = 0; y < 2; ++y)
                        for (std::size_t l = 0; l < card; ++l) {
                            const double pa = x == 0 ? alpha[l][a] : 1.0 - alpha[l][a];
                            const double pb = y == 0 ? beta[l][b] : 1.0 - beta[l][b];
                            GridPoint g{a, b, x, y, {l, l, l, l}};
                            weights[grid_index(cards, g)] = q[2 * a + b] / qsum * w[l] * pa * pb;
                        }
        EprbModel model(cards, weights);
        if (epsilon_profile(model).eps_global <= eps_max) return model;
    }
    throw GenerationFailed("no local model within eps_max = " + std::to_string(eps_max));
}

}  // namespace weakch
