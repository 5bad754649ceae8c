#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace aurora {

using Rng = std::mt19937_64;
using Vector = std::vector<double>;

/// One flattened trajectory per row: (x0, y0, x1, y1, ...).
using Dataset = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::size_t kTrajectorySteps = 50;
inline constexpr std::size_t kSensoryDim = 2 * kTrajectorySteps;

/// Raised when a caller breaks an operation's precondition (dimension
/// mismatch, out-of-bounds genotype, empty input where one is required).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Interval {
    double lower = 0.0;
    double upper = 0.0;

    double width() const { return upper - lower; }
    bool contains(double v) const { return v >= lower && v <= upper; }
};

using Bounds = std::vector<Interval>;

/// Controller parameters. Each component lives inside the task's bounds.
struct Genotype {
    Vector values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    bool within(const Bounds& bounds) const;
    bool operator==(const Genotype&) const = default;
};

struct Individual {
    std::uint64_t id = 0;
    Genotype genotype;
    Vector sensory;
    Vector descriptor;
    double fitness = 0.0;
    double curiosity = 0.0;
};

enum class AddOutcome { added, replaced, rejected };

struct AddResult {
    AddOutcome outcome = AddOutcome::rejected;
    /// Slot holding the candidate (added/replaced) or the incumbent that beat it.
    std::size_t index = 0;
    std::optional<Individual> displaced;
};

const char* to_string(AddOutcome outcome);

/// Axis-aligned bounding box of a set of equally sized vectors.
Bounds bounding_box(std::span<const Vector> points);

} // namespace aurora
