#include "weakch/prob_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace weakch {

namespace {

void require_same_universe(std::size_t a, std::size_t b) {
    if (a != b) {
        throw ForeignEvent("event over " + std::to_string(b) + " atoms used with a space of " +
                           std::to_string(a) + " atoms");
    }
}

}  // namespace

Event::Event(std::size_t universe, std::span<const std::size_t> members) : mask_(universe, 0) {
    for (std::size_t m : members) {
        insert(m);
    }
}

Event Event::none(std::size_t universe) {
    Event e;
    e.mask_.assign(universe, 0);
    return e;
}

Event Event::all(std::size_t universe) {
    Event e;
    e.mask_.assign(universe, 1);
    return e;
}

std::size_t Event::count() const {
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

std::vector<std::size_t> Event::members() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < mask_.size(); ++i) {
        if (mask_[i]) out.push_back(i);
    }
    return out;
}

void Event::insert(std::size_t atom) {
    if (atom >= mask_.size()) {
        throw ForeignEvent("atom " + std::to_string(atom) + " is not in a universe of " +
                           std::to_string(mask_.size()) + " atoms");
    }
    mask_[atom] = 1;
}

Event Event::complement() const {
    Event e = *this;
    for (auto& m : e.mask_) m = m ? 0 : 1;
    return e;
}

Event Event::operator&(const Event& other) const {
    require_same_universe(universe(), other.universe());
    Event e = *this;
    for (std::size_t i = 0; i < mask_.size(); ++i) e.mask_[i] = mask_[i] & other.mask_[i];
    return e;
}

Event Event::operator|(const Event& other) const {
    require_same_universe(universe(), other.universe());
    Event e = *this;
    for (std::size_t i = 0; i < mask_.size(); ++i) e.mask_[i] = mask_[i] | other.mask_[i];
    return e;
}

Event FiniteProbSpace::event(std::span<const std::string> labels) const {
    Event e = empty_event();
    for (const auto& l : labels) e.insert(index_of(l));
    return e;
}

std::size_t FiniteProbSpace::index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw ForeignEvent("unknown atom label '" + label + "'");
    return it->second;
}

FiniteProbSpace make_space(std::span<const double> weights) {
    std::vector<std::string> labels;
    labels.reserve(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) labels.push_back(std::to_string(i));
    return make_space(std::move(labels), weights);
}

FiniteProbSpace make_space(std::vector<std::string> labels, std::span<const double> weights) {
    if (weights.empty()) throw EmptySpace("a probability space needs at least one atom");
    if (labels.size() != weights.size()) {
        throw std::invalid_argument("label count does not match weight count");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
            throw NegativeWeight("weight of atom " + labels[i] + " is negative or not finite");
        }
        total += weights[i];
    }
    if (total <= 0.0) throw EmptySpace("total mass is zero");

    FiniteProbSpace s;
    s.weights_.reserve(weights.size());
    for (double w : weights) s.weights_.push_back(w / total);
    s.labels_ = std::move(labels);
    for (std::size_t i = 0; i < s.labels_.size(); ++i) {
        if (!s.index_.emplace(s.labels_[i], i).second) {
            throw std::invalid_argument("duplicate atom label '" + s.labels_[i] + "'");
        }
    }
    return s;
}

double prob(const FiniteProbSpace& space, const Event& e) {
    require_same_universe(space.size(), e.universe());
    const auto w = space.weights();
    double p = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (e.contains(i)) p += w[i];
    }
    return std::min(p, 1.0);
}

double cond_prob(const FiniteProbSpace& space, const Event& e, const Event& given) {
    const double pg = prob(space, given);
    if (pg <= 0.0) throw ZeroConditioner("conditioning event has probability zero");
    return prob(space, e & given) / pg;
}

Partition::Partition(std::size_t universe, std::vector<Event> cells) : cells_(std::move(cells)) {
    std::vector<int> cover(universe, 0);
    for (const auto& c : cells_) {
        require_same_universe(universe, c.universe());
        for (std::size_t i : c.members()) ++cover[i];
    }
    for (std::size_t i = 0; i < universe; ++i) {
        if (cover[i] == 0) throw InvalidPartition("atom " + std::to_string(i) + " is in no cell");
        if (cover[i] > 1) throw InvalidPartition("atom " + std::to_string(i) + " is in several cells");
    }
}

double ScreeningReport::max_abs() const {
    double m = 0.0;
    for (const auto& r : residuals) {
        if (r) m = std::max(m, std::abs(*r));
    }
    return m;
}

ScreeningReport screening_residuals(const FiniteProbSpace& space, const Event& a, const Event& b,
                                    const Partition& c) {
    ScreeningReport report;
    const Event ab = a & b;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double pc = prob(space, c[i]);
        if (pc <= 0.0) {
            report.residuals.emplace_back(std::nullopt);
            report.skipped.push_back(i);
            continue;
        }
        const double p_ab = prob(space, ab & c[i]) / pc;
        const double p_a = prob(space, a & c[i]) / pc;
        const double p_b = prob(space, b & c[i]) / pc;
        report.residuals.emplace_back(p_ab - p_a * p_b);
    }
    return report;
}

}  // namespace weakch
