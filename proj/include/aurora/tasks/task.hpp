#pragma once

#include <string_view>
#include <vector>

#include <aurora/common.hpp>
#include <aurora/tasks/trajectory.hpp>

namespace aurora::tasks {

/// A simulated environment turning controller parameters into a trajectory.
/// Implementations are stateless and safe to call from many threads.
class Task {
public:
    virtual ~Task() = default;

    virtual std::string_view name() const = 0;
    virtual const Bounds& genotype_bounds() const = 0;
    virtual Trajectory simulate(const Genotype& g) const = 0;

    virtual bool has_ground_truth() const { return true; }
    /// Hand-coded behavioural descriptor.
    virtual Vector ground_truth(const Genotype& g, const Trajectory& traj) const = 0;
    virtual Bounds ground_truth_bounds() const = 0;

    /// Box containing every reachable sensory vector (100 intervals).
    virtual Bounds sensory_bounds() const = 0;

    /// Action samples available as prior knowledge (pre-training data,
    /// CVT centroids). Empty when the task offers none.
    virtual std::vector<Genotype> prior_samples() const { return {}; }
};

} // namespace aurora::tasks
