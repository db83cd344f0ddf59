#include "weakch/common_cause.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "weakch/inequalities.hpp"
#include "weakch/rng.hpp"

namespace weakch {

PairwiseCcModel::PairwiseCcModel(FiniteProbSpace space_, Event a_, Event b_, Partition c_)
    : space(std::move(space_)), a(std::move(a_)), b(std::move(b_)), c(std::move(c_)) {
    const std::size_t n = space.size();
    if (a.universe() != n || b.universe() != n) throw ForeignEvent("event does not belong to the model space");
    for (const auto& cell : c) {
        if (cell.universe() != n) throw ForeignEvent("cause cell does not belong to the model space");
    }
}

namespace {

struct CellStats {
    double mass = 0.0;
    double p_a = 0.0;  // p(A|C_i)
    double p_b = 0.0;  // p(B|C_i)
};

struct Prepared {
    double p_a = 0.0;
    double p_b = 0.0;
    double epsilon = 0.0;
    std::vector<CellStats> cells;  // mass 0 marks a null cell
    ScreeningReport screening;
};

Prepared prepare(const PairwiseCcModel& m) {
    Prepared p;
    p.screening = screening_residuals(m.space, m.a, m.b, m.c);
    const double max_res = p.screening.max_abs();
    if (max_res > kModelTolerance) {
        throw PreconditionViolated("screening-off residual " + std::to_string(max_res) + " exceeds 1e-9");
    }
    p.p_a = prob(m.space, m.a);
    p.p_b = prob(m.space, m.b);
    if (std::abs(p.p_a - 0.5) > kModelTolerance || std::abs(p.p_b - 0.5) > kModelTolerance) {
        throw PreconditionViolated("p(A) = " + std::to_string(p.p_a) + ", p(B) = " + std::to_string(p.p_b) +
                                   "; both must be 1/2 within 1e-9");
    }
    p.epsilon = std::clamp(1.0 - cond_prob(m.space, m.a, m.b), 0.0, 1.0);
    p.cells.resize(m.c.size());
    for (std::size_t i = 0; i < m.c.size(); ++i) {
        const double mass = prob(m.space, m.c[i]);
        if (mass <= 0.0) continue;
        p.cells[i] = {mass, prob(m.space, m.a & m.c[i]) / mass, prob(m.space, m.b & m.c[i]) / mass};
    }
    return p;
}

Prop1Partition classify(const Prepared& p, const Prop1Cutoffs& cut) {
    const double r = cut.membership * std::sqrt(p.epsilon);
    Prop1Partition part;
    for (std::size_t i = 0; i < p.cells.size(); ++i) {
        const auto& c = p.cells[i];
        // I3 is tested first so that the classes stay disjoint once r >= 1 - r.
        if (c.mass <= 0.0 || c.p_a <= r) {
            part.i3.push_back(i);
        } else if (c.p_a >= 1.0 - r) {
            part.i1.push_back(i);
        } else {
            part.i2.push_back(i);
        }
    }
    return part;
}

}  // namespace

bool Prop1Report::diagnostics_ok(double tol) const {
    const auto& d = diagnostics;
    return std::abs(d.sum_a_not_b - d.half_epsilon) <= tol && std::abs(d.sum_b_not_a - d.half_epsilon) <= tol &&
           d.i2_abs_diff <= 2.0 * d.half_epsilon + tol && d.i2_split_mass <= d.i2_split_bound + tol &&
           d.i2_weighted <= d.i2_weighted_bound + tol;
}

Prop1Partition prop1_partition(const PairwiseCcModel& m, const Prop1Cutoffs& cut) {
    return classify(prepare(m), cut);
}

Prop1Report prop1_check(const PairwiseCcModel& m, const Prop1Cutoffs& cut) {
    const Prepared p = prepare(m);
    Prop1Report rep;
    rep.epsilon = p.epsilon;
    rep.p_a = p.p_a;
    rep.p_b = p.p_b;
    rep.partition = classify(p, cut);
    rep.max_screening_residual = p.screening.max_abs();
    rep.null_cells = p.screening.skipped;

    const double eps = p.epsilon;
    const double root = std::sqrt(eps);
    for (std::size_t i : rep.partition.i1) rep.p_c += p.cells[i].mass;
    rep.lower_bound = rep.p_c - root;
    rep.upper_bound = rep.p_c + 4.0 * root - 2.0 * eps;
    rep.lower_ok = rep.lower_bound <= p.p_a + kModelTolerance;
    // strict "<" in the statement; equality is attained at eps = 0
    rep.upper_ok = p.p_a <= rep.upper_bound + kModelTolerance;

    auto& d = rep.diagnostics;
    d.half_epsilon = eps / 2.0;
    for (const auto& c : p.cells) {
        d.sum_a_not_b += c.p_a * (1.0 - c.p_b) * c.mass;
        d.sum_b_not_a += c.p_b * (1.0 - c.p_a) * c.mass;
    }
    const double split = cut.split * root;
    for (std::size_t i : rep.partition.i2) {
        const auto& c = p.cells[i];
        const double diff = std::abs(c.p_a - c.p_b);
        d.i2_abs_diff += diff * c.mass;
        if (diff >= split) d.i2_split_mass += c.mass;
        d.i2_weighted += c.p_a * c.mass;
    }

    const double r = cut.membership * root;
    if (eps == 0.0) {
        d.i2_split_bound = 0.0;
        d.i2_weighted_bound = 0.0;
    } else {
        d.i2_split_bound = root / cut.split;
        // p(1 - p - split) is concave in p, so its minimum over [r, 1 - r]
        // sits at an endpoint.
        const double g = std::min(r * (1.0 - r - split), (1.0 - r) * (r - split));
        d.i2_weighted_bound = g > 0.0 ? (1.0 - r) * (d.i2_split_bound + d.half_epsilon / g)
                                      : std::numeric_limits<double>::infinity();
    }
    return rep;
}

PairwiseCcModel random_screened_model(std::uint64_t seed, std::size_t n_cells, double eps_target) {
    if (!(eps_target >= 0.0 && eps_target < 0.5)) {
        throw GenerationFailed("epsilon target must lie in [0, 0.5)");
    }
    const std::size_t n_pairs = n_cells / 2;
    const bool odd = n_cells % 2 == 1;
    if (n_pairs == 0) {
        // A lone cell must carry p(A|C) = p(B|C) = 1/2, i.e. eps = 1/2.
        throw GenerationFailed("a single screening cell forces independence (eps = 1/2)");
    }

    struct Cell {
        double mass, p_a, p_b;
    };

    CounterRng rng(seed, 0x5C2EE7ULL);
    constexpr int kMaxDraws = 10000;
    for (int draw = 0; draw < kMaxDraws; ++draw) {
        // the self-mirrored cell adds w0/2 to eps; spend at most half the budget on it
        const double w0 = odd ? eps_target * rng.uniform() : 0.0;
        std::vector<double> w(n_pairs), x(n_pairs), y(n_pairs);
        std::vector<bool> flip(n_pairs);
        double total = 0.0;
        for (std::size_t k = 0; k < n_pairs; ++k) {
            w[k] = rng.exponential();
            total += w[k];
            x[k] = rng.uniform();
            y[k] = rng.uniform();
            flip[k] = rng.uniform() < 0.5;
        }
        for (double& wk : w) wk *= (1.0 - w0) / (2.0 * total);

        // Cells (1 - t x, 1 - t y) and their mirrors disagree on A/B with
        // probability t(x + y) - 2 t^2 x y; eps(t) is the mass-weighted sum.
        const auto eps_at = [&](double t) {
            double e = w0 / 2.0;
            for (std::size_t k = 0; k < n_pairs; ++k) {
                e += 2.0 * w[k] * (t * (x[k] + y[k]) - 2.0 * t * t * x[k] * y[k]);
            }
            return e;
        };
        if (eps_at(1.0) < eps_target) continue;
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
            const double mid = 0.5 * (lo + hi);
            (eps_at(mid) < eps_target ? lo : hi) = mid;
        }
        const double t = eps_target == 0.0 ? 0.0 : hi;

        std::vector<Cell> cells;
        cells.reserve(n_cells);
        for (std::size_t k = 0; k < n_pairs; ++k) {
            Cell c{w[k], 1.0 - t * x[k], 1.0 - t * y[k]};
            Cell mirror{w[k], 1.0 - c.p_a, 1.0 - c.p_b};
            if (flip[k]) std::swap(c, mirror);
            cells.push_back(c);
            cells.push_back(mirror);
        }
        if (odd) cells.push_back({w0, 0.5, 0.5});
        for (std::size_t i = cells.size(); i > 1; --i) std::swap(cells[i - 1], cells[rng.below(i)]);

        std::vector<std::string> labels;
        std::vector<double> weights;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const auto& c = cells[i];
            const std::string tag = "c" + std::to_string(i) + ":";
            labels.push_back(tag + "AB");
            weights.push_back(c.mass * c.p_a * c.p_b);
            labels.push_back(tag + "Ab");
            weights.push_back(c.mass * c.p_a * (1.0 - c.p_b));
            labels.push_back(tag + "aB");
            weights.push_back(c.mass * (1.0 - c.p_a) * c.p_b);
            labels.push_back(tag + "ab");
            weights.push_back(c.mass * (1.0 - c.p_a) * (1.0 - c.p_b));
        }
        FiniteProbSpace space = make_space(std::move(labels), weights);
        const std::size_t n = space.size();
        Event a = Event::none(n), b = Event::none(n);
        std::vector<Event> parts;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const std::size_t base = 4 * i;
            a.insert(base);
            a.insert(base + 1);
            b.insert(base);
            b.insert(base + 2);
            const std::size_t members[] = {base, base + 1, base + 2, base + 3};
            parts.emplace_back(n, members);
        }
        PairwiseCcModel model(std::move(space), std::move(a), std::move(b), Partition(n, std::move(parts)));

        const double pa = prob(model.space, model.a);
        const double pb = prob(model.space, model.b);
        const double eps = 1.0 - cond_prob(model.space, model.a, model.b);
        if (std::abs(pa - 0.5) <= kModelTolerance && std::abs(pb - 0.5) <= kModelTolerance &&
            std::abs(eps - eps_target) <= 1e-6) {
            return model;
        }
    }
    throw GenerationFailed("no screened model with eps = " + std::to_string(eps_target) + " after " +
                           std::to_string(kMaxDraws) + " draws");
}

ChOracleResult ch_atom_oracle(const std::array<double, 16>& atoms) {
    double total = 0.0;
    for (double p : atoms) {
        if (p < 0.0) throw UnnormalizedInput("negative atom probability");
        total += p;
    }
    if (std::abs(total - 1.0) > kModelTolerance) {
        throw UnnormalizedInput("atom probabilities sum to " + std::to_string(total));
    }

    const auto has = [](std::size_t i, int bit) { return ((i >> bit) & 1U) != 0; };
    constexpr int kA = 3, kA2 = 2, kB = 1, kB2 = 0;
    double p_ab = 0, p_ab2 = 0, p_a2b2 = 0, p_a2b = 0, p_a = 0, p_b2 = 0;
    for (std::size_t i = 0; i < 16; ++i) {
        const double w = atoms[i];
        if (has(i, kA) && has(i, kB)) p_ab += w;
        if (has(i, kA) && has(i, kB2)) p_ab2 += w;
        if (has(i, kA2) && has(i, kB2)) p_a2b2 += w;
        if (has(i, kA2) && has(i, kB)) p_a2b += w;
        if (has(i, kA)) p_a += w;
        if (has(i, kB2)) p_b2 += w;
    }

    // A A' B ~B', A A' ~B ~B', A ~A' ~B B', A ~A' ~B ~B',
    // ~A A' B B', ~A A' B ~B', ~A ~A' B B', ~A ~A' ~B B'
    constexpr std::array<std::size_t, 8> kNegative = {0b1110, 0b1100, 0b1001, 0b1000,
                                                      0b0111, 0b0110, 0b0011, 0b0001};
    ChOracleResult r;
    r.value = ch_expression(p_ab, p_ab2, p_a2b2, p_a2b, p_a, p_b2);
    for (std::size_t i : kNegative) r.identity_value -= atoms[i];
    r.in_bounds = r.value >= -1.0 - kInequalityTolerance && r.value <= kInequalityTolerance;
    return r;
}

}  // namespace weakch
