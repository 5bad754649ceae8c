#include <aurora/tasks/trajectory.hpp>

#include <cstdio>
#include <ostream>

namespace aurora::tasks {

Vector sensory_vector(const Trajectory& traj)
{
    Vector v(kSensoryDim);
    for (std::size_t t = 0; t < kTrajectorySteps; ++t) {
        v[2 * t] = traj.points[t].x;
        v[2 * t + 1] = traj.points[t].y;
    }
    return v;
}

Trajectory unflatten(std::span<const double> sensory)
{
    if (sensory.size() != kSensoryDim)
        throw ContractViolation("unflatten: sensory vector must have 100 values");
    Trajectory traj;
    for (std::size_t t = 0; t < kTrajectorySteps; ++t)
        traj.points[t] = {sensory[2 * t], sensory[2 * t + 1]};
    return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj)
{
    os << "x,y\n";
    char buf[64];
    for (const auto& p : traj.points) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", p.x, p.y);
        os << buf;
    }
}

} // namespace aurora::tasks
