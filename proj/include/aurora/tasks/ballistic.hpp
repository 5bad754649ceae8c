#pragma once

#include <numbers>

#include <aurora/tasks/task.hpp>

namespace aurora::tasks {

struct BallisticConfig {
    double gravity = 9.81;
    /// Fraction of vertical speed kept at each ground bounce.
    double restitution = 0.75;
    double duration = 5.0;
    double force_max = 10.0;
    double angle_min = 0.05;
    double angle_max = std::numbers::pi / 2.0;
    /// Values per dimension of the prior action grid.
    std::size_t prior_resolution = 100;

    void validate() const;
};

struct Apex {
    double x = 0.0;
    double y = 0.0;
};

/// Point mass launched from the origin with speed F at angle alpha; exact
/// piecewise-parabolic flight with vertical restitution at ground contact.
Trajectory ballistic_simulate(const Genotype& g, const BallisticConfig& cfg);

/// Apex of the first arc from the launch parameters.
Apex ballistic_ground_truth(const Genotype& g, const BallisticConfig& cfg);

/// Highest sampled point of a trajectory (first one on ties).
Apex sampled_apex(const Trajectory& traj);

class BallisticTask final : public Task {
public:
    explicit BallisticTask(BallisticConfig cfg = {});

    std::string_view name() const override { return "ballistic"; }
    const Bounds& genotype_bounds() const override { return _bounds; }
    Trajectory simulate(const Genotype& g) const override;
    Vector ground_truth(const Genotype& g, const Trajectory& traj) const override;
    Bounds ground_truth_bounds() const override;
    Bounds sensory_bounds() const override;
    std::vector<Genotype> prior_samples() const override;

    const BallisticConfig& config() const { return _cfg; }

private:
    BallisticConfig _cfg;
    Bounds _bounds;
};

} // namespace aurora::tasks
