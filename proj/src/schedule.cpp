#include <aurora/descriptor/schedule.hpp>

#include <algorithm>

#include <aurora/common.hpp>

namespace aurora {

UpdateSchedule::UpdateSchedule() : _batches{0, 50, 150, 350, 750, 1550, 3150} {}

UpdateSchedule::UpdateSchedule(std::vector<std::size_t> batches) : _batches(std::move(batches))
{
    for (std::size_t i = 1; i < _batches.size(); ++i)
        if (_batches[i] <= _batches[i - 1])
            throw ContractViolation("UpdateSchedule: batch counts must be strictly increasing");
}

UpdateSchedule UpdateSchedule::exponential(std::size_t first_gap, std::size_t horizon)
{
    if (first_gap == 0)
        throw ContractViolation("UpdateSchedule: first gap must be positive");
    std::vector<std::size_t> b{0};
    std::size_t gap = first_gap;
    while (b.back() + gap < horizon) {
        b.push_back(b.back() + gap);
        gap *= 2;
    }
    return UpdateSchedule(std::move(b));
}

bool UpdateSchedule::due(std::size_t batch_index) const
{
    return std::binary_search(_batches.begin(), _batches.end(), batch_index);
}

} // namespace aurora
