#pragma once

#include <filesystem>
#include <future>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <aurora/config.hpp>
#include <aurora/cvt.hpp>
#include <aurora/metrics.hpp>
#include <aurora/qd.hpp>

namespace aurora {

std::shared_ptr<const tasks::Task> make_task(const RunConfig& cfg);

/// Ground-truth descriptors of a dense ballistic repertoire: a
/// `resolution` x `resolution` genotype grid inserted in row order into an
/// archive over the hand-coded descriptor space. Used as the KLC reference.
std::vector<Vector> ballistic_reference_repertoire(const tasks::BallisticConfig& cfg, std::size_t resolution,
                                                   std::size_t target_capacity, double l_min);

/// Seed-independent inputs shared by the runs of a suite (centroid sets,
/// KLC reference). Each one is built once, even under concurrent requests.
class Resources {
public:
    std::shared_ptr<const cvt::CentroidSet> centroids(const RunConfig& cfg, Variant v);
    std::shared_ptr<const std::vector<Vector>> klc_reference(const RunConfig& cfg);

private:
    template <class T, class F>
    std::shared_ptr<const T> cached(std::map<std::string, std::shared_future<std::shared_ptr<const T>>>& slot,
                                    const std::string& key, F&& build);

    std::mutex _mutex;
    std::map<std::string, std::shared_future<std::shared_ptr<const cvt::CentroidSet>>> _centroids;
    std::map<std::string, std::shared_future<std::shared_ptr<const std::vector<Vector>>>> _references;
};

/// Builds the extractor (fitting pre-trained models) and, for CVT variants,
/// fetches the centroid set.
struct VariantSetup {
    std::shared_ptr<const tasks::Task> task;
    std::shared_ptr<DescriptorExtractor> extractor;
    std::shared_ptr<const cvt::CentroidSet> centroids;
};
VariantSetup setup_variant(const RunConfig& cfg, Resources& resources, Rng& rng);

struct MetricRow {
    BatchRecord batch;
    std::optional<double> klc;
    std::optional<double> diversity;
    std::optional<double> rmse;
};

struct RunSummary {
    std::string task;
    std::string variant;
    std::uint64_t seed = 0;
    std::size_t batches = 0;
    std::uint64_t evaluations = 0;
    std::size_t final_size = 0;
    std::optional<double> final_klc;
    std::optional<double> final_diversity;
    std::optional<double> final_rmse;
    std::size_t model_updates = 0;
    double seconds = 0.0;
};

struct RunRecord {
    RunConfig config;
    std::vector<MetricRow> rows;
    RunSummary summary;
};

/// Metrics of the current archive: KLC against `reference` (ballistic),
/// diversity (air hockey), reconstruction RMSE (latent extractors).
MetricRow measure(const RunState& state, const RunConfig& cfg, const std::vector<Vector>* reference);

/// Runs one configuration end to end. With `out` set, writes config.ini,
/// metrics.csv, archive snapshots, model.json and summary.json there.
RunRecord run_experiment(const RunConfig& cfg, Resources& resources, const std::optional<std::filesystem::path>& out,
                         std::ostream* progress = nullptr);

struct VariantStats {
    std::string variant;
    std::size_t runs = 0;
    metrics::Quartiles size;
    std::optional<metrics::Quartiles> klc;
    std::optional<metrics::Quartiles> diversity;
    std::optional<metrics::Quartiles> rmse;
};

struct SuiteResult {
    std::vector<RunSummary> runs;
    std::vector<std::string> failures;
    std::vector<VariantStats> table;
};

/// Replication i of every variant uses seed base + i. Failed runs are
/// reported in `failures` without stopping the others.
SuiteResult run_suite(const RunConfig& base, std::size_t replications, std::size_t parallel, Resources& resources,
                      const std::optional<std::filesystem::path>& out_root, std::ostream* progress = nullptr);

/// Per-variant median and quartiles of final metrics (nearest rank).
std::vector<VariantStats> summarize(const std::vector<RunSummary>& runs);

/// For every run group under `runs_dir` (directories holding `seed_*` runs)
/// writes plot_<metric>_<group>.csv with columns batch, median, q1, q3, n,
/// and a scatter.csv per run from its final archive. Returns written paths.
std::vector<std::filesystem::path> export_plot_data(const std::filesystem::path& runs_dir, const std::string& metric);

} // namespace aurora
