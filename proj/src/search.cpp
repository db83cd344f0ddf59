#include "weakch/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "weakch/errors.hpp"
#include "weakch/rng.hpp"

namespace weakch {

double constraint_penalty(const EprbModel& m) {
    ResidualReport r = validate_loc(m);
    r.append(validate_no_conspiracy(m));
    r.append(validate_screening(m));
    return r.sum_sq();
}

namespace {

// Marginal tables of the atom weights; `sp` = 2a + b indexes the setting pair.
struct Tables {
    CauseCards cards{};
    // m[d][((sp * 2 + x) * 2 + y) * n_d + i]: mass with setting pair sp,
    // outcomes x, y and cause d in cell i
    std::array<std::vector<double>, 4> m;
    // j[2 dA + dB][(sp * nA + i) * nB + k]: setting pair sp with Alice's
    // cause dA in cell i and Bob's cause 2 + dB in cell k
    std::array<std::vector<double>, 4> j;

    double at(int d, int sp, int x, int y, std::size_t i) const {
        return m[d][((sp * 2 + x) * 2 + y) * cards[d] + i];
    }
};

Tables tabulate(const CauseCards& cards, std::span<const double> w) {
    Tables t;
    t.cards = cards;
    for (int d = 0; d < 4; ++d) t.m[d].assign(16 * cards[d], 0.0);
    for (int da = 0; da < 2; ++da)
        for (int db = 0; db < 2; ++db) t.j[2 * da + db].assign(4 * cards[da] * cards[2 + db], 0.0);

    double total = 0.0;
    for (double x : w) total += x;
    if (!(total > 0.0)) throw EmptySpace("weights sum to zero");

    std::size_t idx = 0;
    for (int sxy = 0; sxy < 16; ++sxy) {
        const int sp = sxy / 4;
        for (std::size_t c1 = 0; c1 < cards[0]; ++c1)
            for (std::size_t c2 = 0; c2 < cards[1]; ++c2)
                for (std::size_t c3 = 0; c3 < cards[2]; ++c3)
                    for (std::size_t c4 = 0; c4 < cards[3]; ++c4, ++idx) {
                        const double v = w[idx] / total;
                        if (v == 0.0) continue;
                        const std::array<std::size_t, 4> c{c1, c2, c3, c4};
                        for (int d = 0; d < 4; ++d) t.m[d][sxy * cards[d] + c[d]] += v;
                        for (int da = 0; da < 2; ++da)
                            for (int db = 0; db < 2; ++db)
                                t.j[2 * da + db][(sp * cards[da] + c[da]) * cards[2 + db] + c[2 + db]] += v;
                    }
    }
    return t;
}

double sq(double x) { return x * x; }

}  // namespace

ModelSummary summarize(const CauseCards& cards, std::span<const double> weights) {
    for (std::size_t n : cards)
        if (n < 1) throw std::invalid_argument("cause cardinalities must be at least 1");
    if (weights.size() != EprbModel::atom_count(cards)) throw std::invalid_argument("weight count mismatch");
    for (double x : weights)
        if (x < 0.0) throw NegativeWeight("negative atom weight");
    const Tables t = tabulate(cards, weights);

    // outcome tables per setting pair, from cause 1's marginals
    double tab[4][2][2] = {};
    for (int sp = 0; sp < 4; ++sp)
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                for (std::size_t i = 0; i < cards[0]; ++i) tab[sp][x][y] += t.at(0, sp, x, y, i);
    double pair_mass[4];
    for (int sp = 0; sp < 4; ++sp) pair_mass[sp] = tab[sp][0][0] + tab[sp][0][1] + tab[sp][1][0] + tab[sp][1][1];
    const double p_alice[2] = {pair_mass[0] + pair_mass[1], pair_mass[2] + pair_mass[3]};
    const double p_bob[2] = {pair_mass[0] + pair_mass[2], pair_mass[1] + pair_mass[3]};

    ModelSummary s;
    double pen = 0.0;

    // locality
    for (int d = 0; d < 4; ++d)
        for (std::size_t i = 0; i < cards[d]; ++i) {
            double cell[4][2][2];
            for (int sp = 0; sp < 4; ++sp)
                for (int x = 0; x < 2; ++x)
                    for (int y = 0; y < 2; ++y) cell[sp][x][y] = t.at(d, sp, x, y, i);
            const auto mass = [&](int sp) { return cell[sp][0][0] + cell[sp][0][1] + cell[sp][1][0] + cell[sp][1][1]; };
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const int sp = 2 * a + b;
                    const double mab = mass(sp);
                    if (mab <= 0.0) continue;
                    const double ma = mass(2 * a) + mass(2 * a + 1);
                    const double mb = mass(b) + mass(2 + b);
                    for (int o = 0; o < 2; ++o) {
                        const double a_ab = (cell[sp][o][0] + cell[sp][o][1]) / mab;
                        const double a_a = (cell[2 * a][o][0] + cell[2 * a][o][1] + cell[2 * a + 1][o][0] +
                                            cell[2 * a + 1][o][1]) / ma;
                        const double b_ab = (cell[sp][0][o] + cell[sp][1][o]) / mab;
                        const double b_b = (cell[b][0][o] + cell[b][1][o] + cell[2 + b][0][o] + cell[2 + b][1][o]) / mb;
                        pen += sq(a_ab - a_a) + sq(b_ab - b_b);
                    }
                }
        }

    // no-conspiracy
    const auto cause_pair_mass = [&](int sp, int d, std::size_t i) {
        return t.at(d, sp, 0, 0, i) + t.at(d, sp, 0, 1, i) + t.at(d, sp, 1, 0, i) + t.at(d, sp, 1, 1, i);
    };
    const auto cause_mass = [&](int d, std::size_t i) {
        double v = 0.0;
        for (int sp = 0; sp < 4; ++sp) v += cause_pair_mass(sp, d, i);
        return v;
    };
    for (int a = 0; a < 2; ++a)
        for (std::size_t i = 0; i < cards[a]; ++i)
            pen += sq(cause_pair_mass(2 * a, a, i) + cause_pair_mass(2 * a + 1, a, i) - p_alice[a] * cause_mass(a, i));
    for (int b = 0; b < 2; ++b)
        for (std::size_t k = 0; k < cards[2 + b]; ++k)
            pen += sq(cause_pair_mass(b, 2 + b, k) + cause_pair_mass(2 + b, 2 + b, k) -
                      p_bob[b] * cause_mass(2 + b, k));
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const int sp = 2 * a + b;
            const std::size_t na = cards[a], nb = cards[2 + b];
            for (std::size_t i = 0; i < na; ++i) pen += sq(cause_pair_mass(sp, a, i) - pair_mass[sp] * cause_mass(a, i));
            for (std::size_t k = 0; k < nb; ++k)
                pen += sq(cause_pair_mass(sp, 2 + b, k) - pair_mass[sp] * cause_mass(2 + b, k));
            const auto& jt = t.j[2 * a + b];
            for (std::size_t i = 0; i < na; ++i)
                for (std::size_t k = 0; k < nb; ++k) {
                    double joint = 0.0;
                    for (int q = 0; q < 4; ++q) joint += jt[(q * na + i) * nb + k];
                    pen += sq(jt[(sp * na + i) * nb + k] - pair_mass[sp] * joint);
                }
        }

    // epsilon profile and partner screening
    AnticorrelationTable anti;
    anti.plus_a_given_minus_b.assign(2, std::vector<double>(2, 0.0));
    anti.plus_b_given_minus_a = anti.plus_a_given_minus_b;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const auto& tb = tab[2 * a + b];
            const double minus_b = tb[0][1] + tb[1][1];
            const double minus_a = tb[1][0] + tb[1][1];
            anti.plus_a_given_minus_b[a][b] = minus_b > 0.0 ? tb[0][1] / minus_b : 0.0;
            anti.plus_b_given_minus_a[a][b] = minus_a > 0.0 ? tb[1][0] / minus_a : 0.0;
        }
    const EpsilonProfile prof = epsilon_profile(anti);
    s.eps_global = prof.eps_global;

    for (int d = 0; d < 4; ++d) {
        const bool alice = d < 2;
        const int a = alice ? d : static_cast<int>(prof.partner_of_b[d - 2]);
        const int b = alice ? static_cast<int>(prof.partner_of_a[d]) : d - 2;
        const int sp = 2 * a + b;
        for (std::size_t i = 0; i < cards[d]; ++i) {
            const double c00 = t.at(d, sp, 0, 0, i), c01 = t.at(d, sp, 0, 1, i);
            const double c10 = t.at(d, sp, 1, 0, i), c11 = t.at(d, sp, 1, 1, i);
            const double m = c00 + c01 + c10 + c11;
            if (m <= 0.0) continue;
            // "+" in direction d together with "-" in the partner
            const double joint = alice ? c01 : c10;
            const double plus = alice ? c00 + c01 : c00 + c10;
            const double minus = alice ? c01 + c11 : c10 + c11;
            pen += sq(joint / m - (plus / m) * (minus / m));
        }
    }
    s.penalty = pen;

    for (int sp = 0; sp < 4; ++sp)
        if (pair_mass[sp] <= 0.0) throw ZeroConditioner("setting pair without mass");
    ChTerms ch;
    ch.p13 = tab[0][0][0] / pair_mass[0];
    ch.p14 = tab[1][0][0] / pair_mass[1];
    ch.p23 = tab[2][0][0] / pair_mass[2];
    ch.p24 = tab[3][0][0] / pair_mass[3];
    ch.p1 = (tab[0][0][0] + tab[0][0][1] + tab[1][0][0] + tab[1][0][1]) / p_alice[0];
    ch.p4 = (tab[1][0][0] + tab[1][1][0] + tab[3][0][0] + tab[3][1][0]) / p_bob[1];
    s.ch_value = ch.value();

    const auto ct = [&](int a, int b) {
        return correction_terms(s.eps_global, SettingProbs{p_alice[a], p_bob[b], pair_mass[2 * a + b]});
    };
    s.bounds = weak_ch_bounds(ct(0, 0), ct(0, 1), ct(1, 1), ct(1, 0));
    return s;
}

void SearchConfig::validate() const {
    if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");
    for (std::size_t n : cards)
        if (n < 2) throw std::invalid_argument("cause cardinalities must be at least 2");
    if (!(step0 > 0.0)) throw std::invalid_argument("initial step must be positive");
    if (!(decay > 0.0 && decay <= 1.0)) throw std::invalid_argument("step decay must lie in (0, 1]");
    if (!(init_noise >= 0.0 && init_noise <= 1.0)) throw std::invalid_argument("init noise must lie in [0, 1]");
    if (!(penalty_weight >= 0.0)) throw std::invalid_argument("penalty weight must be non-negative");
    if (!(eps_lo >= 0.0 && eps_lo <= eps_hi && eps_hi <= 1.0)) {
        throw std::invalid_argument("epsilon band must satisfy 0 <= lo <= hi <= 1");
    }
}

namespace {

// Positive when the strict CH inequality is broken, otherwise minus the
// distance to its nearer edge.
double strict_margin(double ch) { return std::max(-1.0 - ch, ch); }

double objective(const ModelSummary& s, const SearchConfig& cfg) {
    const double band = std::max({0.0, cfg.eps_lo - s.eps_global, s.eps_global - cfg.eps_hi});
    const double weak = std::max({0.0, s.bounds.lower - s.ch_value, s.ch_value - s.bounds.upper});
    return strict_margin(s.ch_value) - cfg.penalty_weight * (s.penalty + band * band + weak * weak);
}

// Rescales each setting-pair block (a contiguous quarter of the atoms) to 1/4.
void pin_settings(std::vector<double>& w) {
    const std::size_t block = w.size() / 4;
    for (std::size_t sp = 0; sp < 4; ++sp) {
        const auto first = w.begin() + static_cast<std::ptrdiff_t>(sp * block);
        const auto last = first + static_cast<std::ptrdiff_t>(block);
        double sum = 0.0;
        for (auto it = first; it != last; ++it) sum += *it;
        if (sum > 0.0) {
            for (auto it = first; it != last; ++it) *it *= 0.25 / sum;
        } else {
            std::fill(first, last, 0.25 / static_cast<double>(block));
        }
    }
}

struct RestartOutcome {
    std::vector<double> weights;
    ModelSummary summary;
    double objective = 0.0;
    std::vector<TracePoint> trace;
};

RestartOutcome run_restart(const SearchConfig& cfg, std::size_t restart) {
    CounterRng rng(cfg.seed, restart);
    const std::size_t n = EprbModel::atom_count(cfg.cards);

    RestartOutcome out;
    out.weights.assign(n, 0.0);
    {
        // start from a local model inside the band, blended with a random point
        const std::size_t card = *std::min_element(cfg.cards.begin(), cfg.cards.end());
        const EprbModel local = random_local_model(rng(), card, cfg.eps_hi);
        const EprbModel grid(cfg.cards, std::vector<double>(n, 1.0));
        for (std::size_t i = 0; i < local.space().size(); ++i) {
            out.weights[grid.index(local.point(i))] = (1.0 - cfg.init_noise) * local.weights()[i];
        }
        std::vector<double> noise(n);
        double total = 0.0;
        for (double& x : noise) total += (x = rng.exponential());
        for (std::size_t i = 0; i < n; ++i) out.weights[i] += cfg.init_noise * noise[i] / total;
    }
    pin_settings(out.weights);
    out.summary = summarize(cfg.cards, out.weights);
    out.objective = objective(out.summary, cfg);
    out.trace.reserve(cfg.max_iters);

    std::vector<double> cand(n);
    double step = cfg.step0;
    for (std::size_t it = 0; it < cfg.max_iters; ++it, step *= cfg.decay) {
        cand = out.weights;
        const std::size_t moves = 1 + rng.below(4);
        for (std::size_t k = 0; k < moves; ++k) {
            const std::size_t i = rng.below(n);
            cand[i] = std::max(0.0, cand[i] + step * rng.normal());
        }
        pin_settings(cand);
        const ModelSummary s = summarize(cfg.cards, cand);
        const double obj = objective(s, cfg);
        // the penalty may never grow, so the incumbent's penalty trace is monotone
        if (obj > out.objective && s.penalty <= out.summary.penalty) {
            out.weights.swap(cand);
            out.summary = s;
            out.objective = obj;
        }
        out.trace.push_back({out.summary.penalty, out.objective});
    }
    return out;
}

}  // namespace

SearchResult search_counterexample(const SearchConfig& cfg) {
    cfg.validate();

    std::vector<RestartOutcome> runs(cfg.restarts);
    unsigned workers = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, cfg.restarts));
    if (workers <= 1) {
        for (std::size_t r = 0; r < cfg.restarts; ++r) runs[r] = run_restart(cfg, r);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned k = 0; k < workers; ++k) {
            pool.emplace_back([&] {
                for (std::size_t r = next++; r < cfg.restarts; r = next++) runs[r] = run_restart(cfg, r);
            });
        }
    }

    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].objective > runs[best].objective) best = r;
    RestartOutcome& win = runs[best];

    // Re-validate the incumbent with the assumption validators and the
    // inequality evaluators rather than trusting the search's own summary.
    EprbModel model(cfg.cards, win.weights);
    SearchResult res(std::move(model));
    res.restart = best;
    res.objective = win.objective;
    res.penalty = constraint_penalty(res.model);
    res.eps_global = epsilon_profile(res.model).eps_global;
    const ChTerms terms = ch_terms(res.model);
    res.ch_value = terms.value();
    res.weak_report = evaluate_weak_ch(terms, weak_ch_bounds(res.model, res.eps_global), res.eps_global);
    res.strict_violated = !ch_holds(res.ch_value);
    res.trace = std::move(win.trace);

    const auto& s = win.summary;
    const bool statuses_agree =
        res.strict_violated == !ch_holds(s.ch_value) &&
        res.weak_report.violated() == evaluate_weak_ch(s.ch_value, s.bounds, s.eps_global).violated();
    res.feasible = statuses_agree && res.penalty <= kFeasibilityTolerance && res.eps_global >= cfg.eps_lo &&
                   res.eps_global <= cfg.eps_hi && res.strict_violated && !res.weak_report.violated();
    return res;
}

}  // namespace weakch
