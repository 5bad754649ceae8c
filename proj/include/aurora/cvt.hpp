#pragma once

#include <memory>
#include <vector>

#include <aurora/archive.hpp>
#include <aurora/common.hpp>
#include <aurora/tasks/task.hpp>

namespace aurora::cvt {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// k centroids, one per row.
struct CentroidSet {
    Matrix centroids;
    std::uint64_t seed = 0;

    std::size_t k() const { return static_cast<std::size_t>(centroids.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(centroids.cols()); }
};

/// Exact nearest centroid (lowest index on ties) by linear scan.
std::size_t nearest_centroid(const Matrix& centroids, std::span<const double> point);

/// Exact nearest centroid for each row of `points`. Screens candidates with
/// the expanded form |c|^2 - 2 c.x in one matrix product, then re-checks
/// every near-tie with the direct squared distance, so the result always
/// equals `nearest_centroid`.
std::vector<std::size_t> nearest_centroids(const Matrix& centroids, const Eigen::VectorXd& squared_norms, const Matrix& points);

struct KMeansOptions {
    std::size_t max_iterations = 100;
};

struct KMeansResult {
    Matrix centroids;
    std::vector<std::size_t> assignment;
    /// Within-cluster sum of squares after seeding and after each Lloyd step.
    std::vector<double> inertia_history;
    std::size_t iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding. With fewer points than
/// centroids the seeds are drawn with replacement; empty clusters are
/// re-seeded at the point farthest from its centroid.
KMeansResult kmeans(const Matrix& points, std::size_t k, Rng& rng, KMeansOptions opts = {});

/// Simulates `samples` and clusters their sensory vectors into `k` centroids.
CentroidSet build_prior_centroids(const tasks::Task& task, const std::vector<Genotype>& samples, std::size_t k,
                                  std::uint64_t seed, KMeansOptions opts = {});

/// `k` uniform draws inside `bounds`, optionally refined by Lloyd iterations
/// over a second uniform cloud of `refine_points` samples.
CentroidSet build_blind_centroids(const Bounds& bounds, std::size_t k, std::uint64_t seed, std::size_t refine_points = 0,
                                  KMeansOptions opts = {});

/// CSV: a header line `k,dim,seed` with its values, then one centroid per line.
void save_centroids_csv(const CentroidSet& set, const std::string& path);
CentroidSet load_centroids_csv(const std::string& path);

/// MAP-Elites grid over the Voronoi cells of a centroid set.
class CvtGrid final : public Container {
public:
    explicit CvtGrid(std::shared_ptr<const CentroidSet> centroids, bool curiosity_selection = false);

    std::size_t size() const override { return _entries.size(); }
    std::span<const Individual> entries() const override { return _entries; }
    AddResult try_add(Individual candidate) override;
    std::vector<AddResult> try_add_all(std::vector<Individual> candidates) override;
    ParentSampler sampler(const CuriosityParams& params) const override;
    void reward_parent(std::size_t index, std::uint64_t parent_id, AddOutcome outcome,
                       const CuriosityParams& params) override;

    std::size_t cell_count() const { return _cell_entry.size(); }
    double coverage() const { return static_cast<double>(_entries.size()) / static_cast<double>(_cell_entry.size()); }
    /// Cell index of each stored entry.
    const std::vector<std::size_t>& entry_cells() const { return _entry_cell; }
    const CentroidSet& centroids() const { return *_centroids; }

private:
    AddResult place(Individual candidate, std::size_t cell);

    std::shared_ptr<const CentroidSet> _centroids;
    Eigen::VectorXd _squared_norms;
    bool _curiosity_selection;
    std::vector<Individual> _entries;
    std::vector<std::size_t> _entry_cell;
    std::vector<std::int64_t> _cell_entry;
};

} // namespace aurora::cvt
