#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <aurora/descriptor/autoencoder.hpp>
#include <aurora/qd.hpp>
#include <aurora/tasks/airhockey.hpp>
#include <aurora/tasks/ballistic.hpp>

namespace aurora {

enum class Variant { hand_coded, genotype, pca_pre, pca_inc, ae_pre, ae_inc, cvt_prior, cvt_blind };

const char* to_string(Variant v);
Variant parse_variant(const std::string& name);
/// Variants that need the task's prior action samples.
bool needs_prior(Variant v);

struct CvtSettings {
    std::size_t prior_k = 10000;
    std::size_t blind_k = 100000;
    /// Uniform points for optional Lloyd refinement of the blind centroids; 0 = off.
    std::size_t blind_refine = 0;
    std::size_t max_iterations = 100;
    std::uint64_t centroid_seed = 20190101;
    /// Directory where centroid sets are cached between runs; empty = no cache.
    std::string cache_dir;
};

struct MetricSettings {
    /// Metrics are computed every `interval` batches, at model updates and at the end.
    std::size_t interval = 1;
    /// Genotype grid resolution of the dense ground-truth reference repertoire.
    std::size_t klc_reference_resolution = 400;
    std::size_t klc_bins = 30;
    double klc_epsilon = 1e-6;
    std::size_t diversity_bins = 10;
    /// Write an archive snapshot at every model update.
    bool snapshots = true;
};

struct RunConfig {
    std::string task = "ballistic";
    Variant variant = Variant::ae_inc;
    std::size_t batches = 5000;
    std::uint64_t seed = 1;
    EngineParams engine;
    tasks::BallisticConfig ballistic;
    tasks::ArenaConfig airhockey;
    AeTrainConfig ae;
    CvtSettings cvt;
    MetricSettings metrics;
    /// Variants run by `suite`; empty means just `variant`.
    std::vector<Variant> suite_variants;

    void validate() const;
};

/// Sectioned `key = value` text; unknown sections or keys are errors.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);
/// Writes every setting, in a form `parse_config` reads back unchanged.
void write_config(std::ostream& os, const RunConfig& cfg);

} // namespace aurora
