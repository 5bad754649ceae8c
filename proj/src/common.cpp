#include <aurora/common.hpp>

#include <algorithm>

namespace aurora {

bool Genotype::within(const Bounds& bounds) const
{
    if (values.size() != bounds.size())
        return false;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!bounds[i].contains(values[i]))
            return false;
    return true;
}

const char* to_string(AddOutcome outcome)
{
    switch (outcome) {
    case AddOutcome::added:
        return "added";
    case AddOutcome::replaced:
        return "replaced";
    case AddOutcome::rejected:
        return "rejected";
    }
    return "?";
}

Bounds bounding_box(std::span<const Vector> points)
{
    if (points.empty())
        return {};
    Bounds box(points.front().size());
    for (std::size_t j = 0; j < box.size(); ++j)
        box[j] = {points.front()[j], points.front()[j]};
    for (const auto& p : points) {
        if (p.size() != box.size())
            throw ContractViolation("bounding_box: points of different dimensionality");
        for (std::size_t j = 0; j < box.size(); ++j) {
            box[j].lower = std::min(box[j].lower, p[j]);
            box[j].upper = std::max(box[j].upper, p[j]);
        }
    }
    return box;
}

} // namespace aurora
