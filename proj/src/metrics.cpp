#include <aurora/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace aurora::metrics {

Histogram2D::Histogram2D(std::size_t bins, Interval x, Interval y) : _bins(bins), _x(x), _y(y), _counts(bins * bins, 0.0)
{
    if (bins == 0)
        throw ContractViolation("Histogram2D: need at least one bin");
    if (!(x.width() > 0.0) || !(y.width() > 0.0))
        throw ContractViolation("Histogram2D: bounds must have positive width");
}

std::size_t Histogram2D::bin_of(double v, const Interval& axis) const
{
    const double f = std::floor((v - axis.lower) / axis.width() * static_cast<double>(_bins));
    if (!(f > 0.0))
        return 0;
    return std::min(static_cast<std::size_t>(f), _bins - 1);
}

void Histogram2D::add(double x, double y)
{
    _counts[bin_of(x, _x) * _bins + bin_of(y, _y)] += 1.0;
    _total += 1.0;
}

void Histogram2D::add(std::span<const Vector> points)
{
    for (const auto& p : points) {
        if (p.size() != 2)
            throw ContractViolation("Histogram2D: points must be 2-D");
        add(p[0], p[1]);
    }
}

std::vector<double> Histogram2D::smoothed(double epsilon) const
{
    if (!(_total > 0.0))
        throw ContractViolation("Histogram2D: empty histogram");
    std::vector<double> p(_counts.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = _counts[i] / _total + epsilon;
        sum += p[i];
    }
    for (double& v : p)
        v /= sum;
    return p;
}

double kl_divergence(std::span<const double> e, std::span<const double> a)
{
    if (e.size() != a.size())
        throw ContractViolation("kl_divergence: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i)
        if (e[i] > 0.0)
            s += e[i] * std::log(e[i] / a[i]);
    return std::max(s, 0.0);
}

double klc(std::span<const Vector> reference, std::span<const Vector> compared, const Bounds& bounds, std::size_t bins,
           double epsilon)
{
    if (reference.empty() || compared.empty())
        throw ContractViolation("klc: both point sets must be non-empty");
    if (bounds.size() != 2)
        throw ContractViolation("klc: bounds must be 2-D");
    Histogram2D he(bins, bounds[0], bounds[1]);
    Histogram2D ha(bins, bounds[0], bounds[1]);
    he.add(reference);
    ha.add(compared);
    const auto e = he.smoothed(epsilon);
    const auto a = ha.smoothed(epsilon);
    return kl_divergence(e, a);
}

namespace {
    struct Grid {
        Interval x, y;
        std::size_t bins;

        double coord(double v, const Interval& axis) const
        {
            return (v - axis.lower) / axis.width() * static_cast<double>(bins);
        }
        std::size_t index(double g) const
        {
            const double f = std::floor(g);
            if (!(f > 0.0))
                return 0;
            return std::min(static_cast<std::size_t>(f), bins - 1);
        }
        std::size_t cell(double gx, double gy) const { return index(gx) * bins + index(gy); }
    };

    // Parameters in (0, 1) at which the segment a -> b crosses an integer
    // grid line along one axis.
    void crossings(double a, double b, std::vector<double>& ts)
    {
        if (a == b)
            return;
        const double lo = std::min(a, b), hi = std::max(a, b);
        for (double k = std::floor(lo) + 1.0; k <= hi; k += 1.0) {
            const double t = (k - a) / (b - a);
            if (t > 0.0 && t < 1.0)
                ts.push_back(t);
        }
    }

    // Cells holding at least one point of the closed segment; exact up to
    // the rounding of the crossing parameters.
    void rasterize(const Grid& g, double ax, double ay, double bx, double by, std::set<std::size_t>& out)
    {
        std::vector<double> ts{0.0, 1.0};
        crossings(ax, bx, ts);
        crossings(ay, by, ts);
        std::sort(ts.begin(), ts.end());
        auto at = [&](double t) {
            out.insert(g.cell(ax + t * (bx - ax), ay + t * (by - ay)));
        };
        for (std::size_t i = 0; i < ts.size(); ++i) {
            at(ts[i]);
            if (i + 1 < ts.size() && ts[i + 1] > ts[i])
                at(0.5 * (ts[i] + ts[i + 1]));
        }
    }

    std::set<std::size_t> traversed(const tasks::Trajectory& traj, const Grid& g)
    {
        std::set<std::size_t> cells;
        const auto& p = traj.points;
        for (std::size_t i = 0; i + 1 < p.size(); ++i)
            rasterize(g, g.coord(p[i].x, g.x), g.coord(p[i].y, g.y), g.coord(p[i + 1].x, g.x), g.coord(p[i + 1].y, g.y),
                      cells);
        return cells;
    }

    Grid make_grid(const Bounds& arena, std::size_t bins)
    {
        if (arena.size() != 2 || !(arena[0].width() > 0.0) || !(arena[1].width() > 0.0))
            throw ContractViolation("diversity: arena must be a 2-D box of positive size");
        if (bins == 0)
            throw ContractViolation("diversity: need at least one bin");
        return {arena[0], arena[1], bins};
    }
} // namespace

std::vector<std::size_t> traversed_bins(const tasks::Trajectory& traj, const Bounds& arena, std::size_t bins)
{
    const auto cells = traversed(traj, make_grid(arena, bins));
    return {cells.begin(), cells.end()};
}

double diversity(std::span<const tasks::Trajectory> trajectories, const Bounds& arena, std::size_t bins)
{
    const Grid g = make_grid(arena, bins);
    std::map<std::size_t, std::set<std::size_t>> groups;
    for (const auto& traj : trajectories) {
        const auto& end = traj.back();
        auto& group = groups[g.cell(g.coord(end.x, g.x), g.coord(end.y, g.y))];
        group.merge(traversed(traj, g));
    }
    double total = 0.0;
    for (const auto& [cell, visited] : groups)
        total += static_cast<double>(visited.size());
    return total / static_cast<double>(bins * bins);
}

double reconstruction_rmse(const LatentModel& model, const Dataset& data)
{
    if (data.rows() == 0)
        throw ContractViolation("reconstruction_rmse: empty dataset");
    const Dataset r = model.reconstruct_all(data);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < data.rows(); ++i)
        sum += std::sqrt((data.row(i) - r.row(i)).squaredNorm() / static_cast<double>(data.cols()));
    return sum / static_cast<double>(data.rows());
}

std::optional<double> reconstruction_rmse(const DescriptorExtractor& extractor, const Dataset& data)
{
    const LatentModel* m = extractor.model();
    if (!m)
        return std::nullopt;
    return reconstruction_rmse(*m, data);
}

double nearest_rank(std::vector<double> values, double p)
{
    if (values.empty())
        throw ContractViolation("nearest_rank: no values");
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    auto rank = static_cast<std::size_t>(std::ceil(p * n));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

Quartiles quartiles(const std::vector<double>& values)
{
    return {nearest_rank(values, 0.25), nearest_rank(values, 0.5), nearest_rank(values, 0.75)};
}

} // namespace aurora::metrics
