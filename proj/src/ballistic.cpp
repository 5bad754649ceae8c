#include <aurora/tasks/ballistic.hpp>

#include <cmath>

namespace aurora::tasks {

void BallisticConfig::validate() const
{
    if (!(gravity > 0.0))
        throw ContractViolation("ballistic: gravity must be positive");
    if (!(restitution > 0.0 && restitution < 1.0))
        throw ContractViolation("ballistic: restitution must lie in (0, 1)");
    if (!(duration > 0.0))
        throw ContractViolation("ballistic: duration must be positive");
    if (!(force_max > 0.0))
        throw ContractViolation("ballistic: force_max must be positive");
    if (!(angle_min < angle_max))
        throw ContractViolation("ballistic: empty angle range");
    if (prior_resolution < 2)
        throw ContractViolation("ballistic: prior_resolution must be at least 2");
}

namespace {
    Bounds make_bounds(const BallisticConfig& cfg)
    {
        return {{cfg.angle_min, cfg.angle_max}, {0.0, cfg.force_max}};
    }

    void check_genotype(const Genotype& g, const BallisticConfig& cfg)
    {
        if (!g.within(make_bounds(cfg)))
            throw ContractViolation("ballistic: genotype (alpha, F) outside bounds");
    }

    // Height at time t of a sequence of arcs whose launch speed shrinks by
    // `e` at every bounce.
    double height_at(double t, double vy, double g, double e)
    {
        double start = 0.0;
        double v = vy;
        while (v > 0.0) {
            const double flight = 2.0 * v / g;
            if (t < start + flight) {
                const double tau = t - start;
                return v * tau - 0.5 * g * tau * tau;
            }
            if (flight < 1e-15)
                break;
            start += flight;
            v *= e;
        }
        return 0.0;
    }
} // namespace

Trajectory ballistic_simulate(const Genotype& g, const BallisticConfig& cfg)
{
    check_genotype(g, cfg);
    const double alpha = g[0];
    const double force = g[1];
    const double vx = force * std::cos(alpha);
    const double vy = force * std::sin(alpha);

    Trajectory traj;
    const double dt = cfg.duration / static_cast<double>(kTrajectorySteps - 1);
    for (std::size_t k = 0; k < kTrajectorySteps; ++k) {
        const double t = static_cast<double>(k) * dt;
        traj.points[k] = {vx * t, height_at(t, vy, cfg.gravity, cfg.restitution)};
    }
    return traj;
}

Apex ballistic_ground_truth(const Genotype& g, const BallisticConfig& cfg)
{
    check_genotype(g, cfg);
    const double vx = g[1] * std::cos(g[0]);
    const double vy = g[1] * std::sin(g[0]);
    return {vx * vy / cfg.gravity, vy * vy / (2.0 * cfg.gravity)};
}

Apex sampled_apex(const Trajectory& traj)
{
    std::size_t best = 0;
    for (std::size_t k = 1; k < traj.points.size(); ++k)
        if (traj.points[k].y > traj.points[best].y)
            best = k;
    return {traj.points[best].x, traj.points[best].y};
}

BallisticTask::BallisticTask(BallisticConfig cfg) : _cfg(cfg), _bounds(make_bounds(cfg))
{
    _cfg.validate();
}

Trajectory BallisticTask::simulate(const Genotype& g) const { return ballistic_simulate(g, _cfg); }

Vector BallisticTask::ground_truth(const Genotype& g, const Trajectory&) const
{
    const Apex a = ballistic_ground_truth(g, _cfg);
    return {a.x, a.y};
}

Bounds BallisticTask::ground_truth_bounds() const
{
    // X = F^2 sin(2a) / 2g and Y = F^2 sin^2(a) / 2g both peak at F_max^2 / 2g.
    const double reach = _cfg.force_max * _cfg.force_max / (2.0 * _cfg.gravity);
    return {{0.0, reach}, {0.0, reach}};
}

Bounds BallisticTask::sensory_bounds() const
{
    const Interval x{0.0, _cfg.force_max * _cfg.duration};
    const Interval y{0.0, _cfg.force_max * _cfg.force_max / (2.0 * _cfg.gravity)};
    Bounds b;
    b.reserve(kSensoryDim);
    for (std::size_t t = 0; t < kTrajectorySteps; ++t) {
        b.push_back(x);
        b.push_back(y);
    }
    return b;
}

std::vector<Genotype> BallisticTask::prior_samples() const
{
    const std::size_t n = _cfg.prior_resolution;
    std::vector<Genotype> out;
    out.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double alpha = _cfg.angle_min + (_cfg.angle_max - _cfg.angle_min) * static_cast<double>(i) / static_cast<double>(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            const double force = _cfg.force_max * static_cast<double>(j) / static_cast<double>(n - 1);
            out.push_back(Genotype{{alpha, force}});
        }
    }
    return out;
}

} // namespace aurora::tasks
