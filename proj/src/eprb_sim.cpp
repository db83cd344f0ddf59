#include "weakch/eprb_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "weakch/errors.hpp"
#include "weakch/rng.hpp"

namespace weakch {

void SimConfig::validate() const {
    if (n < 1) throw std::invalid_argument("number of runs must be at least 1");
    double sum = 0.0;
    for (double q : setting_probs) {
        if (!(q >= 0.0)) throw std::invalid_argument("setting probabilities must be non-negative");
        sum += q;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("setting probabilities must sum to 1");
}

SettingProbs SimConfig::pair_probs(int a, int b) const {
    const auto& q = setting_probs;
    return {q[2 * a] + q[2 * a + 1], q[b] + q[2 + b], q[2 * a + b]};
}

std::uint64_t CountsTable::pair_total(int a, int b) const {
    const auto& c = counts[a][b];
    return c[0][0] + c[0][1] + c[1][0] + c[1][1];
}

std::uint64_t CountsTable::total() const {
    std::uint64_t t = 0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) t += pair_total(a, b);
    return t;
}

namespace {

// cumulative distributions used by every shard
struct Sampler {
    std::array<double, 4> setting_cdf{};
    std::array<std::array<double, 4>, 4> outcome_cdf{};  // [pair][2x + y]
};

Sampler make_sampler(const SimConfig& cfg) {
    Sampler s;
    double acc = 0.0;
    for (int k = 0; k < 4; ++k) s.setting_cdf[k] = (acc += cfg.setting_probs[k]);
    s.setting_cdf[3] = 1.0;

    SettingTables tables;
    if (cfg.model) {
        const auto& m = *cfg.model;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                if (cfg.setting_probs[2 * a + b] > 0.0 && prob(m.space(), m.setting_pair(a, b)) <= 0.0) {
                    throw ZeroConditioner("model gives a sampled setting pair no mass");
                }
        tables = outcome_tables(m);
    } else {
        const DirectionConfig dirs{{cfg.theta[0], cfg.theta[1]}, {cfg.theta[2], cfg.theta[3]}};
        tables = singlet_tables(dirs);
    }
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            auto& cdf = s.outcome_cdf[2 * a + b];
            double c = 0.0;
            for (int xy = 0; xy < 4; ++xy) cdf[xy] = (c += tables[a][b][xy / 2][xy % 2]);
            if (c <= 0.0) continue;  // never sampled
            // renormalize so the last bucket closes at exactly one
            for (double& v : cdf) v /= c;
            cdf[3] = 1.0;
        }
    return s;
}

int pick(const std::array<double, 4>& cdf, double u) {
    int k = 0;
    while (k < 3 && !(u < cdf[k])) ++k;
    return k;
}

void run_shard(const Sampler& s, std::uint64_t seed, std::uint64_t shard, std::uint64_t runs, CountsTable& out) {
    CounterRng rng(seed, shard);
    for (std::uint64_t r = 0; r < runs; ++r) {
        const int sp = pick(s.setting_cdf, rng.uniform());
        const int xy = pick(s.outcome_cdf[sp], rng.uniform());
        ++out.counts[sp / 2][sp % 2][xy / 2][xy % 2];
    }
    out.n += runs;
}

void merge(CountsTable& into, const CountsTable& from) {
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y) into.counts[a][b][x][y] += from.counts[a][b][x][y];
    into.n += from.n;
}

double in_sigmas(double diff, double se) {
    if (se > 0.0) return diff / se;
    if (diff == 0.0) return 0.0;
    return std::copysign(std::numeric_limits<double>::infinity(), diff);
}

}  // namespace

CountsTable sample_runs(const SimConfig& cfg) {
    cfg.validate();
    const Sampler s = make_sampler(cfg);
    const std::uint64_t shards = (cfg.n + kShardSize - 1) / kShardSize;
    const auto runs_in = [&](std::uint64_t k) { return std::min(kShardSize, cfg.n - k * kShardSize); };

    std::vector<CountsTable> parts(shards);
    unsigned workers = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, shards));
    if (workers <= 1) {
        for (std::uint64_t k = 0; k < shards; ++k) run_shard(s, cfg.seed, k, runs_in(k), parts[k]);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::uint64_t k = next++; k < shards; k = next++) run_shard(s, cfg.seed, k, runs_in(k), parts[k]);
            });
        }
    }
    CountsTable total;
    for (const auto& p : parts) merge(total, p);
    return total;
}

double ProbEstimate::value() const {
    if (!defined()) throw UndefinedEstimate("estimate has no observations");
    return static_cast<double>(hits) / static_cast<double>(trials);
}

double ProbEstimate::se() const {
    const double p = value();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

Estimates estimate(const CountsTable& t) {
    Estimates e;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const std::uint64_t n = t.pair_total(a, b);
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y) e.joint[a][b][x][y] = {t.counts[a][b][x][y], n};
        }
    for (int s = 0; s < 2; ++s) {
        auto& al = e.alice_plus[s];
        auto& bo = e.bob_plus[s];
        for (int o = 0; o < 2; ++o) {
            al.hits += t.counts[s][o][0][0] + t.counts[s][o][0][1];
            al.trials += t.pair_total(s, o);
            bo.hits += t.counts[o][s][0][0] + t.counts[o][s][1][0];
            bo.trials += t.pair_total(o, s);
        }
    }
    return e;
}

ChTerms Estimates::ch_terms() const {
    ChTerms c;
    c.p13 = joint[0][0][0][0].value();
    c.p14 = joint[0][1][0][0].value();
    c.p24 = joint[1][1][0][0].value();
    c.p23 = joint[1][0][0][0].value();
    c.p1 = alice_plus[0].value();
    c.p4 = bob_plus[1].value();
    return c;
}

EmpiricalChReport test_inequality(const Estimates& est, double epsilon, double k_sigma,
                                  const std::array<SettingProbs, 4>& sp) {
    if (!(k_sigma >= 0.0)) throw std::invalid_argument("k_sigma must be non-negative");
    const ChTerms terms = est.ch_terms();
    const double se = std::sqrt(std::pow(est.joint[0][0][0][0].se(), 2) + std::pow(est.joint[0][1][0][0].se(), 2) +
                                std::pow(est.joint[1][1][0][0].se(), 2) + std::pow(est.joint[1][0][0][0].se(), 2) +
                                std::pow(est.alice_plus[0].se(), 2) + std::pow(est.bob_plus[1].se(), 2));
    // sp is indexed 2a + b; the bounds take the pairs in the order 13, 14, 24, 23
    const auto ct = [&](int k) { return correction_terms(epsilon, sp[k]); };
    const WeakBounds bounds = weak_ch_bounds(ct(0), ct(1), ct(3), ct(2));

    EmpiricalChReport r;
    r.report = evaluate_weak_ch(terms, bounds, epsilon);
    r.se = se;
    r.k_sigma = k_sigma;
    const double v = r.report.value;
    r.margin_lower = in_sigmas(v - bounds.lower, se);
    r.margin_upper = in_sigmas(bounds.upper - v, se);
    r.declared_lower = v < bounds.lower - k_sigma * se - kInequalityTolerance;
    r.declared_upper = v > bounds.upper + k_sigma * se + kInequalityTolerance;
    return r;
}

EmpiricalChReport test_inequality(const Estimates& est, double epsilon, double k_sigma) {
    const SettingProbs sym{};
    return test_inequality(est, epsilon, k_sigma, {sym, sym, sym, sym});
}

}  // namespace weakch
