#pragma once

#include <array>
#include <numbers>

#include <aurora/tasks/task.hpp>

namespace aurora::tasks {

inline constexpr std::size_t kArmJoints = 4;

struct ArenaConfig {
    /// Side of the square arena [0, size]^2.
    double arena_size = 1.0;
    Point2 base{0.5, -0.05};
    /// Orientation of the arm frame's x axis in the world.
    double base_angle = std::numbers::pi / 2.0;
    std::array<double, kArmJoints> links{0.2, 0.2, 0.2, 0.2};
    Interval joint_bounds{-std::numbers::pi / 2.0, std::numbers::pi / 2.0};
    double puck_radius = 0.03;
    Point2 puck_start{0.5, 0.35};
    /// Constant deceleration opposing the puck velocity (m/s^2).
    double friction = 0.25;
    double wall_restitution = 0.9;
    std::size_t motion_steps = 250;
    double step_dt = 0.004;
    double episode_duration = 2.0;

    void validate() const;
    double reach() const;
};

using JointAngles = std::array<double, kArmJoints>;

/// Base followed by the four joint/effector positions, in the world frame.
std::array<Point2, kArmJoints + 1> forward_kinematics(const JointAngles& joints, const ArenaConfig& cfg);

struct PuckState {
    Point2 position;
    Point2 velocity;
};

struct WallEvent {
    double time = 0.0;
    /// 0 for a vertical wall (x reflected), 1 for a horizontal wall (y reflected).
    int axis = 0;
    Point2 velocity_before;
    Point2 velocity_after;
};

/// Exact constant-deceleration coasting for `dt` seconds with wall
/// reflections. `clock` is the absolute time at entry, used for the event log.
void advance_puck(PuckState& puck, double dt, const ArenaConfig& cfg, double clock = 0.0,
                  std::vector<WallEvent>* events = nullptr);

struct AirHockeyResult {
    Trajectory trajectory;
    std::vector<WallEvent> wall_events;
    std::size_t contact_steps = 0;
};

/// Genotype = 4 initial joint angles followed by 4 final joint angles.
AirHockeyResult airhockey_run(const Genotype& g, const ArenaConfig& cfg);
Trajectory airhockey_simulate(const Genotype& g, const ArenaConfig& cfg);

class AirHockeyTask final : public Task {
public:
    explicit AirHockeyTask(ArenaConfig cfg = {});

    std::string_view name() const override { return "airhockey"; }
    const Bounds& genotype_bounds() const override { return _bounds; }
    Trajectory simulate(const Genotype& g) const override;
    /// Final puck position.
    Vector ground_truth(const Genotype& g, const Trajectory& traj) const override;
    Bounds ground_truth_bounds() const override;
    Bounds sensory_bounds() const override;

    const ArenaConfig& config() const { return _cfg; }

private:
    ArenaConfig _cfg;
    Bounds _bounds;
};

} // namespace aurora::tasks
