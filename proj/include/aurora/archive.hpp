#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include <aurora/common.hpp>

namespace aurora {

/// Curiosity bookkeeping for the score-proportionate selector.
struct CuriosityParams {
    double reward = 1.0;
    double penalty = -0.5;
    double floor = 0.0;
    double offset = 1.0;
};

/// Draws indices with probability proportional to fixed non-negative weights.
class ParentSampler {
public:
    explicit ParentSampler(std::vector<double> weights);

    std::size_t operator()(Rng& rng) const;
    std::size_t size() const { return _cumulative.size(); }
    double probability(std::size_t i) const;

private:
    std::vector<double> _cumulative;
};

/// Selection weight of one entry: curiosity - floor + offset.
double selection_weight(const Individual& ind, const CuriosityParams& params);

/// Curiosity-proportional parent choice over an entry list.
std::size_t select_parent(std::span<const Individual> entries, const CuriosityParams& params, Rng& rng);

/// Applies reward/penalty for one offspring outcome, clamped at the floor.
void update_curiosity(Individual& parent, AddOutcome outcome, const CuriosityParams& params);

/// Common surface of the unstructured archive and the CVT grid so the QD
/// loop can drive either one.
class Container {
public:
    virtual ~Container() = default;

    virtual std::size_t size() const = 0;
    virtual std::span<const Individual> entries() const = 0;
    virtual AddResult try_add(Individual candidate) = 0;

    /// Inserts candidates in order. Overridden where per-candidate work can be batched.
    virtual std::vector<AddResult> try_add_all(std::vector<Individual> candidates);

    virtual ParentSampler sampler(const CuriosityParams& params) const = 0;

    /// Applies the curiosity update to the entry at `index` if it still holds `parent_id`.
    virtual void reward_parent(std::size_t index, std::uint64_t parent_id, AddOutcome outcome,
                               const CuriosityParams& params) = 0;

    /// Distance threshold, if the container has one.
    virtual std::optional<double> l() const { return std::nullopt; }

    bool empty() const { return size() == 0; }
};

struct Neighbor {
    std::size_t index = 0;
    double distance = 0.0;
};

/// Unstructured archive: a candidate is stored if it lies at least `l` away
/// from every entry, otherwise it competes with its nearest neighbour and
/// replaces it only on strictly higher fitness. A replacement that would
/// land closer than l to a second entry is rejected so the spacing holds.
class Archive final : public Container {
public:
    explicit Archive(double l, bool spatial_index = false);

    std::size_t size() const override { return _entries.size(); }
    std::span<const Individual> entries() const override { return _entries; }
    std::optional<double> l() const override { return _l; }
    double threshold() const { return _l; }
    bool uses_spatial_index() const { return _grid_enabled; }
    std::size_t descriptor_dim() const { return _dim; }

    AddResult try_add(Individual candidate) override;
    ParentSampler sampler(const CuriosityParams& params) const override;
    void reward_parent(std::size_t index, std::uint64_t parent_id, AddOutcome outcome,
                       const CuriosityParams& params) override;

    /// Nearest entry to `descriptor`; nullopt when empty.
    std::optional<Neighbor> nearest(std::span<const double> descriptor) const;

    /// Moves the entries out, leaving the archive empty.
    std::vector<Individual> release();

private:
    using CellKey = std::uint64_t;

    std::optional<Neighbor> nearest_linear(std::span<const double> d) const;
    std::optional<Neighbor> nearest_within_l(std::span<const double> d) const;
    /// True when no entry other than `skip` lies closer than l to `d`.
    bool clear_of_others(std::span<const double> d, std::size_t skip) const;
    CellKey cell_of(std::span<const double> d) const;
    void grid_insert(std::size_t index);
    void grid_erase(std::size_t index);

    double _l;
    bool _grid_requested;
    bool _grid_enabled = false;
    std::size_t _dim = 0;
    std::vector<Individual> _entries;
    std::unordered_map<CellKey, std::vector<std::size_t>> _grid;
};

/// Distance threshold that keeps the expected capacity of a descriptor box
/// at `target_capacity`: (volume / target)^(1/d) over the non-degenerate
/// axes. Returns `l_min` when every axis is degenerate.
double l_from_bounds(const Bounds& box, std::size_t target_capacity, double l_min);

/// `l_from_bounds` applied to the bounding box of the archive's descriptors.
double recompute_l(std::span<const Individual> entries, std::size_t target_capacity, double l_min);

/// Re-inserts `entries` (descriptors already refreshed) in their stored order
/// into a fresh archive with threshold `l`. Curiosity travels with survivors.
Archive rebuild_archive(std::vector<Individual> entries, double l, bool spatial_index);

} // namespace aurora
