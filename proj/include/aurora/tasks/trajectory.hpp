#pragma once

#include <array>
#include <iosfwd>
#include <span>

#include <aurora/common.hpp>

namespace aurora::tasks {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2&) const = default;
};

/// 50 planar positions sampled at uniform intervals over an episode.
struct Trajectory {
    std::array<Point2, kTrajectorySteps> points{};

    const Point2& back() const { return points.back(); }
    bool operator==(const Trajectory&) const = default;
};

/// Row-major flattening (x0, y0, x1, y1, ...), always 100 values.
Vector sensory_vector(const Trajectory& traj);

/// Inverse of `sensory_vector`.
Trajectory unflatten(std::span<const double> sensory);

/// CSV with header `x,y` and 50 rows.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

} // namespace aurora::tasks
