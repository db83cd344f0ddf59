#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "weakch/rng.hpp"
#include "weakch/search.hpp"

namespace weakch {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// CH combination with theta1 = 0 and both marginals at 1/2.
double ch_closed(double t2, double t3, double t4) {
    const auto pp = [](double phi) {
        const double s = std::sin(phi / 2.0);
        return 0.5 * s * s;
    };
    return pp(-t3) + pp(-t4) + pp(t2 - t4) - pp(t2 - t3) - 1.0;
}

}  // namespace

AngleOptimum optimize_angles(std::uint64_t seed, std::size_t grid, std::size_t refine_iters, AngleMode mode) {
    if (grid < 8) throw std::invalid_argument("coarse grid size must be at least 8");
    const double sign = mode == AngleMode::minimize ? 1.0 : -1.0;
    const auto f = [&](const std::array<double, 3>& t) { return sign * ch_closed(t[0], t[1], t[2]); };

    CounterRng rng(seed, 0xA9C1EULL);
    const double h = kTwoPi / static_cast<double>(grid);
    std::array<double, 3> offset{};
    for (double& o : offset) o = h * rng.uniform();

    AngleOptimum out;
    std::array<double, 3> best{};
    double best_f = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid; ++i)
        for (std::size_t j = 0; j < grid; ++j)
            for (std::size_t k = 0; k < grid; ++k) {
                const std::array<double, 3> t{offset[0] + h * i, offset[1] + h * j, offset[2] + h * k};
                const double v = f(t);
                ++out.evaluations;
                if (v < best_f) {
                    best_f = v;
                    best = t;
                }
            }

    // compass search: take the best of the six axis moves, halve on failure
    double step = h / 2.0;
    for (std::size_t it = 0; it < refine_iters && step > 1e-12; ++it) {
        std::array<double, 3> cand_best = best;
        double cand_f = best_f;
        for (int c = 0; c < 3; ++c)
            for (double dir : {-1.0, 1.0}) {
                auto t = best;
                t[c] += dir * step;
                const double v = f(t);
                ++out.evaluations;
                if (v < cand_f) {
                    cand_f = v;
                    cand_best = t;
                }
            }
        if (cand_f < best_f) {
            best = cand_best;
            best_f = cand_f;
        } else {
            step /= 2.0;
        }
    }

    out.theta = {Angle(0.0), Angle(best[0]), Angle(best[1]), Angle(best[2])};
    out.value = ch_value(out.theta);
    if (out.value < kQuantumChMin - 1e-9 || out.value > kQuantumChMax + 1e-9) {
        throw std::logic_error("angle search left the Tsirelson interval");
    }
    return out;
}

}  // namespace weakch
