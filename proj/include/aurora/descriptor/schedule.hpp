#pragma once

#include <cstddef>
#include <vector>

namespace aurora {

/// Batch counts after which an incremental latent model is refitted.
class UpdateSchedule {
public:
    UpdateSchedule();
    explicit UpdateSchedule(std::vector<std::size_t> batches);

    /// Update after batch counts 0, 50, 150, 350, ... i.e. gaps doubling from 50.
    static UpdateSchedule exponential(std::size_t first_gap, std::size_t horizon);

    bool due(std::size_t batch_index) const;
    const std::vector<std::size_t>& batches() const { return _batches; }

private:
    std::vector<std::size_t> _batches;
};

inline bool update_due(const UpdateSchedule& schedule, std::size_t batch_index) { return schedule.due(batch_index); }

} // namespace aurora
