#include <aurora/tasks/airhockey.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace aurora::tasks {

void ArenaConfig::validate() const
{
    if (!(arena_size > 0.0))
        throw ContractViolation("airhockey: arena_size must be positive");
    if (!(puck_radius > 0.0) || 2.0 * puck_radius >= arena_size)
        throw ContractViolation("airhockey: puck radius does not fit the arena");
    if (!(puck_start.x > puck_radius && puck_start.x < arena_size - puck_radius && puck_start.y > puck_radius
            && puck_start.y < arena_size - puck_radius))
        throw ContractViolation("airhockey: puck start must lie strictly inside the arena");
    if (reach() < std::hypot(puck_start.x - base.x, puck_start.y - base.y))
        throw ContractViolation("airhockey: puck start is out of the arm's reach");
    if (!(friction >= 0.0))
        throw ContractViolation("airhockey: friction must be non-negative");
    if (!(wall_restitution >= 0.0 && wall_restitution <= 1.0))
        throw ContractViolation("airhockey: wall restitution must lie in [0, 1]");
    if (motion_steps == 0 || !(step_dt > 0.0))
        throw ContractViolation("airhockey: motion window must be non-empty");
    if (episode_duration < static_cast<double>(motion_steps) * step_dt)
        throw ContractViolation("airhockey: episode shorter than the motion window");
    if (!(joint_bounds.lower <= joint_bounds.upper))
        throw ContractViolation("airhockey: empty joint range");
}

double ArenaConfig::reach() const
{
    double s = 0.0;
    for (double l : links)
        s += l;
    return s;
}

std::array<Point2, kArmJoints + 1> forward_kinematics(const JointAngles& joints, const ArenaConfig& cfg)
{
    std::array<Point2, kArmJoints + 1> pts;
    pts[0] = cfg.base;
    double angle = cfg.base_angle;
    for (std::size_t i = 0; i < kArmJoints; ++i) {
        angle += joints[i];
        pts[i + 1] = {pts[i].x + cfg.links[i] * std::cos(angle), pts[i].y + cfg.links[i] * std::sin(angle)};
    }
    return pts;
}

namespace {
    // Time to cover `dist` along a straight line from speed s under
    // deceleration mu, or +inf when the puck stops first.
    double time_to_cover(double dist, double s, double mu)
    {
        if (dist <= 0.0)
            return 0.0;
        const double disc = s * s - 2.0 * mu * dist;
        if (disc < 0.0)
            return std::numeric_limits<double>::infinity();
        return 2.0 * dist / (s + std::sqrt(disc));
    }

    void clamp_into_arena(PuckState& puck, const ArenaConfig& cfg)
    {
        const double lo = cfg.puck_radius;
        const double hi = cfg.arena_size - cfg.puck_radius;
        if (puck.position.x < lo) {
            puck.position.x = lo;
            if (puck.velocity.x < 0.0)
                puck.velocity.x = -cfg.wall_restitution * puck.velocity.x;
        }
        else if (puck.position.x > hi) {
            puck.position.x = hi;
            if (puck.velocity.x > 0.0)
                puck.velocity.x = -cfg.wall_restitution * puck.velocity.x;
        }
        if (puck.position.y < lo) {
            puck.position.y = lo;
            if (puck.velocity.y < 0.0)
                puck.velocity.y = -cfg.wall_restitution * puck.velocity.y;
        }
        else if (puck.position.y > hi) {
            puck.position.y = hi;
            if (puck.velocity.y > 0.0)
                puck.velocity.y = -cfg.wall_restitution * puck.velocity.y;
        }
    }
} // namespace

void advance_puck(PuckState& puck, double dt, const ArenaConfig& cfg, double clock, std::vector<WallEvent>* events)
{
    const double lo = cfg.puck_radius;
    const double hi = cfg.arena_size - cfg.puck_radius;
    const double mu = cfg.friction;

    double remaining = dt;
    for (int guard = 0; guard < 10000 && remaining > 0.0; ++guard) {
        const double s = std::hypot(puck.velocity.x, puck.velocity.y);
        if (s == 0.0)
            return;
        const double ux = puck.velocity.x / s;
        const double uy = puck.velocity.y / s;
        const double t_stop = mu > 0.0 ? s / mu : std::numeric_limits<double>::infinity();

        double tx = std::numeric_limits<double>::infinity();
        double ty = std::numeric_limits<double>::infinity();
        if (ux > 0.0)
            tx = time_to_cover((hi - puck.position.x) / ux, s, mu);
        else if (ux < 0.0)
            tx = time_to_cover((lo - puck.position.x) / ux, s, mu);
        if (uy > 0.0)
            ty = time_to_cover((hi - puck.position.y) / uy, s, mu);
        else if (uy < 0.0)
            ty = time_to_cover((lo - puck.position.y) / uy, s, mu);

        const double t_hit = std::min(tx, ty);
        const double h = std::min({remaining, t_stop, t_hit});
        const double travelled = s * h - 0.5 * mu * h * h;
        puck.position.x += ux * travelled;
        puck.position.y += uy * travelled;
        const double s_new = h == t_stop ? 0.0 : std::max(0.0, s - mu * h);
        puck.velocity = {ux * s_new, uy * s_new};
        clock += h;
        remaining -= h;

        if (h == t_hit && s_new > 0.0) {
            // Corner contacts resolve the x wall first, then the y wall.
            if (tx == t_hit) {
                const Point2 before = puck.velocity;
                puck.position.x = ux > 0.0 ? hi : lo;
                puck.velocity.x = -cfg.wall_restitution * puck.velocity.x;
                if (events)
                    events->push_back({clock, 0, before, puck.velocity});
            }
            if (ty == t_hit) {
                const Point2 before = puck.velocity;
                puck.position.y = uy > 0.0 ? hi : lo;
                puck.velocity.y = -cfg.wall_restitution * puck.velocity.y;
                if (events)
                    events->push_back({clock, 1, before, puck.velocity});
            }
        }
        puck.position.x = std::clamp(puck.position.x, lo, hi);
        puck.position.y = std::clamp(puck.position.y, lo, hi);
        if (h == t_stop)
            return;
    }
}

AirHockeyResult airhockey_run(const Genotype& g, const ArenaConfig& cfg)
{
    Bounds bounds(2 * kArmJoints, cfg.joint_bounds);
    if (!g.within(bounds))
        throw ContractViolation("airhockey: genotype outside joint bounds");

    JointAngles q0, q1;
    for (std::size_t i = 0; i < kArmJoints; ++i) {
        q0[i] = g[i];
        q1[i] = g[kArmJoints + i];
    }
    const double motion_time = static_cast<double>(cfg.motion_steps) * cfg.step_dt;
    auto effector_at = [&](std::size_t step) {
        const double a = std::min(1.0, static_cast<double>(step) / static_cast<double>(cfg.motion_steps));
        JointAngles q;
        for (std::size_t i = 0; i < kArmJoints; ++i)
            q[i] = q0[i] + (q1[i] - q0[i]) * a;
        return forward_kinematics(q, cfg).back();
    };

    AirHockeyResult out;
    PuckState puck{cfg.puck_start, {0.0, 0.0}};
    const double sample_dt = cfg.episode_duration / static_cast<double>(kTrajectorySteps - 1);
    const auto total_steps = static_cast<std::size_t>(std::ceil(cfg.episode_duration / cfg.step_dt - 1e-9));

    out.trajectory.points[0] = puck.position;
    std::size_t next_sample = 1;
    double clock = 0.0;
    Point2 effector_prev = effector_at(0);

    for (std::size_t step = 1; step <= total_steps; ++step) {
        const double t1 = std::min(cfg.episode_duration, static_cast<double>(step) * cfg.step_dt);
        while (next_sample < kTrajectorySteps) {
            const double ts = next_sample + 1 == kTrajectorySteps ? cfg.episode_duration
                                                                  : static_cast<double>(next_sample) * sample_dt;
            if (ts > t1)
                break;
            advance_puck(puck, ts - clock, cfg, clock, &out.wall_events);
            clock = ts;
            out.trajectory.points[next_sample++] = puck.position;
        }
        advance_puck(puck, t1 - clock, cfg, clock, &out.wall_events);
        clock = t1;

        if (step <= cfg.motion_steps && t1 <= motion_time + 1e-12) {
            const Point2 effector = effector_at(step);
            const double dx = puck.position.x - effector.x;
            const double dy = puck.position.y - effector.y;
            const double dist = std::hypot(dx, dy);
            if (dist < cfg.puck_radius) {
                const Point2 v_eff{(effector.x - effector_prev.x) / cfg.step_dt, (effector.y - effector_prev.y) / cfg.step_dt};
                double nx, ny;
                if (dist > 0.0) {
                    nx = dx / dist;
                    ny = dy / dist;
                }
                else {
                    const double sv = std::hypot(v_eff.x, v_eff.y);
                    nx = sv > 0.0 ? v_eff.x / sv : 0.0;
                    ny = sv > 0.0 ? v_eff.y / sv : 1.0;
                }
                puck.position = {effector.x + nx * cfg.puck_radius, effector.y + ny * cfg.puck_radius};
                puck.velocity = v_eff;
                clamp_into_arena(puck, cfg);
                ++out.contact_steps;
            }
            effector_prev = effector;
        }
    }
    while (next_sample < kTrajectorySteps)
        out.trajectory.points[next_sample++] = puck.position;
    return out;
}

Trajectory airhockey_simulate(const Genotype& g, const ArenaConfig& cfg) { return airhockey_run(g, cfg).trajectory; }

AirHockeyTask::AirHockeyTask(ArenaConfig cfg) : _cfg(cfg), _bounds(2 * kArmJoints, cfg.joint_bounds)
{
    _cfg.validate();
}

Trajectory AirHockeyTask::simulate(const Genotype& g) const { return airhockey_simulate(g, _cfg); }

Vector AirHockeyTask::ground_truth(const Genotype&, const Trajectory& traj) const
{
    return {traj.back().x, traj.back().y};
}

Bounds AirHockeyTask::ground_truth_bounds() const
{
    const Interval axis{_cfg.puck_radius, _cfg.arena_size - _cfg.puck_radius};
    return {axis, axis};
}

Bounds AirHockeyTask::sensory_bounds() const
{
    return Bounds(kSensoryDim, Interval{_cfg.puck_radius, _cfg.arena_size - _cfg.puck_radius});
}

} // namespace aurora::tasks
