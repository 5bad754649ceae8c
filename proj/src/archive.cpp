#include <aurora/archive.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace aurora {

namespace {
    double squared_distance(std::span<const double> a, std::span<const double> b)
    {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[i];
            s += d * d;
        }
        return s;
    }

    // Grid coordinates beyond this magnitude fall back to the linear scan.
    constexpr double kMaxCell = 1 << 30;
} // namespace

ParentSampler::ParentSampler(std::vector<double> weights)
{
    if (weights.empty())
        throw ContractViolation("ParentSampler: no entries to select from");
    _cumulative.resize(weights.size());
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0.0) || !std::isfinite(weights[i]))
            throw ContractViolation("ParentSampler: weights must be finite and non-negative");
        total += weights[i];
        _cumulative[i] = total;
    }
    if (!(total > 0.0))
        throw ContractViolation("ParentSampler: total weight must be positive");
}

std::size_t ParentSampler::operator()(Rng& rng) const
{
    std::uniform_real_distribution<double> u(0.0, _cumulative.back());
    const double r = u(rng);
    auto it = std::upper_bound(_cumulative.begin(), _cumulative.end(), r);
    if (it == _cumulative.end())
        --it;
    return static_cast<std::size_t>(it - _cumulative.begin());
}

double ParentSampler::probability(std::size_t i) const
{
    const double prev = i == 0 ? 0.0 : _cumulative[i - 1];
    return (_cumulative[i] - prev) / _cumulative.back();
}

double selection_weight(const Individual& ind, const CuriosityParams& params)
{
    return std::max(ind.curiosity, params.floor) - params.floor + params.offset;
}

std::size_t select_parent(std::span<const Individual> entries, const CuriosityParams& params, Rng& rng)
{
    if (entries.empty())
        throw ContractViolation("select_parent: archive is empty");
    std::vector<double> w;
    w.reserve(entries.size());
    for (const auto& e : entries)
        w.push_back(selection_weight(e, params));
    return ParentSampler(std::move(w))(rng);
}

void update_curiosity(Individual& parent, AddOutcome outcome, const CuriosityParams& params)
{
    const double delta = outcome == AddOutcome::rejected ? params.penalty : params.reward;
    parent.curiosity = std::max(params.floor, parent.curiosity + delta);
}

std::vector<AddResult> Container::try_add_all(std::vector<Individual> candidates)
{
    std::vector<AddResult> results;
    results.reserve(candidates.size());
    for (auto& c : candidates)
        results.push_back(try_add(std::move(c)));
    return results;
}

Archive::Archive(double l, bool spatial_index) : _l(l), _grid_requested(spatial_index)
{
    if (!(l > 0.0) || !std::isfinite(l))
        throw ContractViolation("Archive: l must be positive and finite");
}

std::optional<Neighbor> Archive::nearest_linear(std::span<const double> d) const
{
    if (_entries.empty())
        return std::nullopt;
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < _entries.size(); ++i) {
        const double d2 = squared_distance(d, _entries[i].descriptor);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return Neighbor{best, std::sqrt(best_d2)};
}

Archive::CellKey Archive::cell_of(std::span<const double> d) const
{
    const auto cx = static_cast<std::int64_t>(std::floor(d[0] / _l));
    const auto cy = static_cast<std::int64_t>(std::floor(d[1] / _l));
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) | static_cast<std::uint32_t>(cy);
}

std::optional<Neighbor> Archive::nearest_within_l(std::span<const double> d) const
{
    if (!_grid_enabled)
        return nearest_linear(d);

    // Anything closer than l sits at most one cell away; two cells absorbs
    // rounding in floor(x / l) at cell borders.
    const auto cx = static_cast<std::int64_t>(std::floor(d[0] / _l));
    const auto cy = static_cast<std::int64_t>(std::floor(d[1] / _l));
    std::optional<Neighbor> best;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::int64_t dx = -2; dx <= 2; ++dx) {
        for (std::int64_t dy = -2; dy <= 2; ++dy) {
            const CellKey key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx + dx)) << 32)
                | static_cast<std::uint32_t>(cy + dy);
            auto it = _grid.find(key);
            if (it == _grid.end())
                continue;
            for (std::size_t idx : it->second) {
                const double d2 = squared_distance(d, _entries[idx].descriptor);
                if (d2 < best_d2 || (d2 == best_d2 && best && idx < best->index)) {
                    best_d2 = d2;
                    best = Neighbor{idx, 0.0};
                }
            }
        }
    }
    if (best)
        best->distance = std::sqrt(best_d2);
    return best;
}

bool Archive::clear_of_others(std::span<const double> d, std::size_t skip) const
{
    const double l2 = _l * _l;
    auto clear = [&](std::size_t idx) { return idx == skip || squared_distance(d, _entries[idx].descriptor) >= l2; };
    if (!_grid_enabled) {
        for (std::size_t i = 0; i < _entries.size(); ++i)
            if (!clear(i))
                return false;
        return true;
    }
    const auto cx = static_cast<std::int64_t>(std::floor(d[0] / _l));
    const auto cy = static_cast<std::int64_t>(std::floor(d[1] / _l));
    for (std::int64_t dx = -2; dx <= 2; ++dx)
        for (std::int64_t dy = -2; dy <= 2; ++dy) {
            const CellKey key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx + dx)) << 32)
                | static_cast<std::uint32_t>(cy + dy);
            auto it = _grid.find(key);
            if (it == _grid.end())
                continue;
            for (std::size_t idx : it->second)
                if (!clear(idx))
                    return false;
        }
    return true;
}

std::optional<Neighbor> Archive::nearest(std::span<const double> descriptor) const
{
    if (!_entries.empty() && descriptor.size() != _dim)
        throw ContractViolation("Archive::nearest: descriptor dimensionality mismatch");
    return nearest_linear(descriptor);
}

void Archive::grid_insert(std::size_t index)
{
    const auto& d = _entries[index].descriptor;
    if (std::abs(d[0] / _l) > kMaxCell || std::abs(d[1] / _l) > kMaxCell) {
        _grid_enabled = false;
        _grid.clear();
        return;
    }
    _grid[cell_of(d)].push_back(index);
}

void Archive::grid_erase(std::size_t index)
{
    auto it = _grid.find(cell_of(_entries[index].descriptor));
    if (it == _grid.end())
        return;
    auto& v = it->second;
    v.erase(std::remove(v.begin(), v.end(), index), v.end());
}

AddResult Archive::try_add(Individual candidate)
{
    if (candidate.descriptor.empty())
        throw ContractViolation("Archive::try_add: empty descriptor");
    if (_entries.empty() && _dim == 0) {
        _dim = candidate.descriptor.size();
        _grid_enabled = _grid_requested && _dim == 2;
    }
    else if (candidate.descriptor.size() != _dim) {
        throw ContractViolation("Archive::try_add: descriptor dimensionality mismatch");
    }

    const auto nn = nearest_within_l(candidate.descriptor);
    if (!nn || nn->distance >= _l) {
        _entries.push_back(std::move(candidate));
        const std::size_t idx = _entries.size() - 1;
        if (_grid_enabled)
            grid_insert(idx);
        return {AddOutcome::added, idx, std::nullopt};
    }

    Individual& incumbent = _entries[nn->index];
    if (candidate.fitness > incumbent.fitness && clear_of_others(candidate.descriptor, nn->index)) {
        if (_grid_enabled)
            grid_erase(nn->index);
        Individual old = std::move(incumbent);
        incumbent = std::move(candidate);
        if (_grid_enabled)
            grid_insert(nn->index);
        return {AddOutcome::replaced, nn->index, std::move(old)};
    }
    return {AddOutcome::rejected, nn->index, std::nullopt};
}

ParentSampler Archive::sampler(const CuriosityParams& params) const
{
    std::vector<double> w;
    w.reserve(_entries.size());
    for (const auto& e : _entries)
        w.push_back(selection_weight(e, params));
    return ParentSampler(std::move(w));
}

void Archive::reward_parent(std::size_t index, std::uint64_t parent_id, AddOutcome outcome,
                            const CuriosityParams& params)
{
    if (index < _entries.size() && _entries[index].id == parent_id)
        update_curiosity(_entries[index], outcome, params);
}

std::vector<Individual> Archive::release()
{
    _grid.clear();
    _grid_enabled = false;
    _dim = 0;
    return std::exchange(_entries, {});
}

double l_from_bounds(const Bounds& box, std::size_t target_capacity, double l_min)
{
    if (target_capacity == 0)
        throw ContractViolation("l_from_bounds: target capacity must be positive");
    double log_volume = 0.0;
    std::size_t axes = 0;
    for (const auto& iv : box) {
        const double w = iv.width();
        if (w > 0.0 && std::isfinite(w)) {
            log_volume += std::log(w);
            ++axes;
        }
    }
    if (axes == 0)
        return l_min;
    double l;
    if (axes == 2) {
        double area = 1.0;
        for (const auto& iv : box)
            if (iv.width() > 0.0)
                area *= iv.width();
        l = std::sqrt(area / static_cast<double>(target_capacity));
    }
    else {
        l = std::exp((log_volume - std::log(static_cast<double>(target_capacity))) / static_cast<double>(axes));
    }
    return std::max(l, l_min);
}

double recompute_l(std::span<const Individual> entries, std::size_t target_capacity, double l_min)
{
    if (entries.empty())
        return l_min;
    std::vector<Vector> d;
    d.reserve(entries.size());
    for (const auto& e : entries)
        d.push_back(e.descriptor);
    return l_from_bounds(bounding_box(d), target_capacity, l_min);
}

Archive rebuild_archive(std::vector<Individual> entries, double l, bool spatial_index)
{
    Archive archive(l, spatial_index);
    for (auto& e : entries)
        archive.try_add(std::move(e));
    return archive;
}

} // namespace aurora
