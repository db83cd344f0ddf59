#pragma once

// Finite classical probability spaces: atoms with non-negative weights,
// events as atom subsets, partitions and (conditional) probabilities.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "weakch/errors.hpp"

namespace weakch {

/// Default absolute tolerance for equality checks on probabilities.
inline constexpr double kProbTolerance = 1e-12;

/// A subset of the atoms of one space. Knows the size of its universe so
/// that events of different spaces can't be mixed silently.
class Event {
public:
    Event() = default;
    Event(std::size_t universe, std::span<const std::size_t> members);

    static Event none(std::size_t universe);
    static Event all(std::size_t universe);

    std::size_t universe() const { return mask_.size(); }
    bool contains(std::size_t atom) const { return atom < mask_.size() && mask_[atom] != 0; }
    std::size_t count() const;
    bool empty() const { return count() == 0; }
    std::vector<std::size_t> members() const;

    void insert(std::size_t atom);

    Event complement() const;
    Event operator&(const Event& other) const;
    Event operator|(const Event& other) const;
    bool operator==(const Event& other) const = default;

private:
    std::vector<std::uint8_t> mask_;
};

class FiniteProbSpace {
public:
    std::size_t size() const { return weights_.size(); }
    std::span<const double> weights() const { return weights_; }
    double weight(std::size_t atom) const { return weights_.at(atom); }
    const std::vector<std::string>& labels() const { return labels_; }

    Event full() const { return Event::all(size()); }
    Event empty_event() const { return Event::none(size()); }

    /// Resolves atom labels. Throws ForeignEvent for unknown labels.
    Event event(std::span<const std::string> labels) const;
    std::size_t index_of(const std::string& label) const;

private:
    friend FiniteProbSpace make_space(std::vector<std::string>, std::span<const double>);

    std::vector<double> weights_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Normalizes `weights` to total mass 1. Atoms are labelled "0".."n-1".
/// Throws EmptySpace (no atoms / zero mass) or NegativeWeight.
FiniteProbSpace make_space(std::span<const double> weights);
FiniteProbSpace make_space(std::vector<std::string> labels, std::span<const double> weights);

double prob(const FiniteProbSpace& space, const Event& e);

/// p(e | given). Throws ZeroConditioner when p(given) == 0.
double cond_prob(const FiniteProbSpace& space, const Event& e, const Event& given);

/// Pairwise disjoint cells covering every atom of the space.
class Partition {
public:
    Partition() = default;
    /// Throws InvalidPartition if cells overlap or leave atoms uncovered,
    /// ForeignEvent if a cell belongs to another universe.
    Partition(std::size_t universe, std::vector<Event> cells);

    std::size_t size() const { return cells_.size(); }
    const Event& operator[](std::size_t i) const { return cells_[i]; }
    const std::vector<Event>& cells() const { return cells_; }
    auto begin() const { return cells_.begin(); }
    auto end() const { return cells_.end(); }

private:
    std::vector<Event> cells_;
};

/// Screening-off residuals p(AB|C_i) - p(A|C_i) p(B|C_i), one entry per cell.
/// Cells of zero mass have no residual and are listed in `skipped`.
struct ScreeningReport {
    std::vector<std::optional<double>> residuals;
    std::vector<std::size_t> skipped;

    double max_abs() const;
};

ScreeningReport screening_residuals(const FiniteProbSpace& space, const Event& a, const Event& b,
                                    const Partition& c);

}  // namespace weakch
