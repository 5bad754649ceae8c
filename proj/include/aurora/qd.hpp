#pragma once

#include <memory>
#include <vector>

#include <aurora/archive.hpp>
#include <aurora/cvt.hpp>
#include <aurora/descriptor/extractor.hpp>
#include <aurora/descriptor/schedule.hpp>
#include <aurora/tasks/task.hpp>

namespace aurora {

struct EngineParams {
    std::size_t batch_size = 200;
    std::size_t n_init = 200;
    double sigma_fraction = 0.05;
    CuriosityParams curiosity;
    std::size_t target_capacity = 10000;
    double l_min = 1e-6;
    UpdateSchedule schedule;
    bool spatial_index = true;
    /// Worker threads for evaluation; results do not depend on it.
    std::size_t threads = 1;

    void validate() const;
};

struct BatchRecord {
    std::size_t batch = 0;
    std::size_t archive_size = 0;
    /// NaN for containers without a threshold.
    double l = 0.0;
    std::size_t added = 0;
    std::size_t replaced = 0;
    std::size_t rejected = 0;
    std::uint64_t evaluations = 0;
    /// True when the descriptor model was refitted after this batch.
    bool model_updated = false;
};

struct RunState {
    std::size_t batch_index = 0;
    std::uint64_t seed = 0;
    Rng rng;
    std::shared_ptr<const tasks::Task> task;
    std::shared_ptr<DescriptorExtractor> extractor;
    std::unique_ptr<Container> container;
    EngineParams params;
    std::vector<BatchRecord> log;
    std::uint64_t next_id = 0;
    /// Offspring evaluated by `run_batch`; the n_init random controllers are not counted.
    std::uint64_t evaluations = 0;
    std::size_t model_updates = 0;
};

/// Genotype -> evaluated individual without a descriptor.
Individual evaluate(const tasks::Task& task, const Genotype& g, std::uint64_t id);

/// Samples and evaluates `params.n_init` random controllers and stores them.
/// A trainable extractor is fitted on their sensory data first (the update
/// at batch 0). When `centroids` is given the container is a CVT grid and
/// the extractor must produce sensory descriptors; otherwise it is an
/// unstructured archive.
RunState initialize(std::shared_ptr<const tasks::Task> task, std::shared_ptr<DescriptorExtractor> extractor,
                    const EngineParams& params, std::uint64_t seed,
                    std::shared_ptr<const cvt::CentroidSet> centroids = nullptr);

/// One batch of select -> mutate -> evaluate -> add -> reward parent.
void run_batch(RunState& state);

/// Refits the extractor on the archive's sensory data, re-describes every
/// entry, recomputes l and re-inserts the entries in stored order. Returns
/// false, changing nothing, when the archive is too small to fit on.
bool refit_and_rebuild(RunState& state);

/// `run_batch` followed by a model update when one is due.
void step(RunState& state);

} // namespace aurora
