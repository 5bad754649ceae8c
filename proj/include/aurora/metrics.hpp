#pragma once

#include <optional>
#include <span>
#include <vector>

#include <aurora/archive.hpp>
#include <aurora/common.hpp>
#include <aurora/descriptor/extractor.hpp>
#include <aurora/descriptor/latent_model.hpp>
#include <aurora/tasks/trajectory.hpp>

namespace aurora::metrics {

/// Square 2-D histogram over a box. Points outside the box fall into the
/// edge bins; every bin is half-open except the last one on each axis.
class Histogram2D {
public:
    Histogram2D(std::size_t bins, Interval x, Interval y);

    void add(double x, double y);
    void add(std::span<const Vector> points);

    std::size_t bins() const { return _bins; }
    std::size_t bin_of(double v, const Interval& axis) const;
    double count(std::size_t ix, std::size_t iy) const { return _counts[ix * _bins + iy]; }
    double total() const { return _total; }
    const std::vector<double>& counts() const { return _counts; }

    /// Frequencies with `epsilon` added to every bin, renormalised to sum 1.
    std::vector<double> smoothed(double epsilon) const;

private:
    std::size_t _bins;
    Interval _x, _y;
    std::vector<double> _counts;
    double _total = 0.0;
};

inline constexpr std::size_t kKlcBins = 30;
inline constexpr double kKlcEpsilon = 1e-6;

/// Kullback-Leibler coverage D_KL(E || A) between the histograms of a
/// reference set E and a compared set A over `bounds` (2 intervals).
double klc(std::span<const Vector> reference, std::span<const Vector> compared, const Bounds& bounds,
           std::size_t bins = kKlcBins, double epsilon = kKlcEpsilon);

/// D_KL(E || A) over two already-smoothed distributions.
double kl_divergence(std::span<const double> e, std::span<const double> a);

inline constexpr std::size_t kDiversityBins = 10;

/// Grid cells (ix * bins + iy) visited by the polyline through a
/// trajectory's samples, including the segments between samples.
std::vector<std::size_t> traversed_bins(const tasks::Trajectory& traj, const Bounds& arena,
                                        std::size_t bins = kDiversityBins);

/// Trajectories are grouped by the cell of their final position; each group
/// scores the number of distinct cells its members traverse. Returns the
/// sum of group scores divided by the cell count, in [0, cell count].
double diversity(std::span<const tasks::Trajectory> trajectories, const Bounds& arena,
                 std::size_t bins = kDiversityBins);

/// Mean over rows of the per-row RMS reconstruction residual, original units.
double reconstruction_rmse(const LatentModel& model, const Dataset& data);

/// Same, or nullopt for extractors without a reconstruction.
std::optional<double> reconstruction_rmse(const DescriptorExtractor& extractor, const Dataset& data);

inline std::size_t repertoire_size(const Container& c) { return c.size(); }

struct Quartiles {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

/// Nearest-rank percentile: the ceil(p * n)-th smallest value (1-based).
double nearest_rank(std::vector<double> values, double p);
Quartiles quartiles(const std::vector<double>& values);

} // namespace aurora::metrics
