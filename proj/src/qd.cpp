#include <aurora/qd.hpp>

#include <cmath>
#include <limits>
#include <thread>

#include <aurora/tasks/trajectory.hpp>
#include <aurora/variation.hpp>

namespace aurora {

void EngineParams::validate() const
{
    if (n_init < 2)
        throw ContractViolation("engine: n_init must be at least 2");
    if (!(sigma_fraction >= 0.0))
        throw ContractViolation("engine: sigma_fraction must be non-negative");
    if (target_capacity == 0)
        throw ContractViolation("engine: target_capacity must be positive");
    if (!(l_min > 0.0))
        throw ContractViolation("engine: l_min must be positive");
    if (!(curiosity.offset > 0.0))
        throw ContractViolation("engine: curiosity offset must be positive");
}

Individual evaluate(const tasks::Task& task, const Genotype& g, std::uint64_t id)
{
    Individual ind;
    ind.id = id;
    ind.genotype = g;
    ind.sensory = tasks::sensory_vector(task.simulate(g));
    return ind;
}

namespace {
    template <class F>
    void parallel_for(std::size_t n, std::size_t threads, F&& f)
    {
        threads = std::min(threads, n);
        if (threads <= 1) {
            for (std::size_t i = 0; i < n; ++i)
                f(i);
            return;
        }
        std::vector<std::exception_ptr> errors(threads);
        {
            std::vector<std::jthread> pool;
            for (std::size_t t = 0; t < threads; ++t)
                pool.emplace_back([&, t] {
                    try {
                        for (std::size_t i = t; i < n; i += threads)
                            f(i);
                    }
                    catch (...) {
                        errors[t] = std::current_exception();
                    }
                });
        }
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    std::vector<Individual> evaluate_all(const RunState& s, const std::vector<Genotype>& genotypes, std::uint64_t first_id)
    {
        std::vector<Individual> out(genotypes.size());
        parallel_for(genotypes.size(), s.params.threads, [&](std::size_t i) {
            out[i] = evaluate(*s.task, genotypes[i], first_id + i);
            out[i].descriptor = s.extractor->describe(out[i].genotype, out[i].sensory);
        });
        return out;
    }

    Dataset sensory_matrix(std::span<const Individual> entries)
    {
        Dataset d(static_cast<Eigen::Index>(entries.size()), static_cast<Eigen::Index>(kSensoryDim));
        for (std::size_t i = 0; i < entries.size(); ++i)
            for (std::size_t j = 0; j < kSensoryDim; ++j)
                d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = entries[i].sensory[j];
        return d;
    }

    void describe_all(std::vector<Individual>& entries, const DescriptorExtractor& extractor, std::size_t threads)
    {
        if (const LatentModel* m = extractor.model()) {
            const Eigen::MatrixXd z = m->project_all(sensory_matrix(entries));
            for (std::size_t i = 0; i < entries.size(); ++i)
                entries[i].descriptor = {z(static_cast<Eigen::Index>(i), 0), z(static_cast<Eigen::Index>(i), 1)};
            return;
        }
        parallel_for(entries.size(), threads,
                     [&](std::size_t i) { entries[i].descriptor = extractor.describe(entries[i].genotype, entries[i].sensory); });
    }

    double threshold_of(const Container& c)
    {
        const auto l = c.l();
        return l ? *l : std::numeric_limits<double>::quiet_NaN();
    }
} // namespace

RunState initialize(std::shared_ptr<const tasks::Task> task, std::shared_ptr<DescriptorExtractor> extractor,
                    const EngineParams& params, std::uint64_t seed, std::shared_ptr<const cvt::CentroidSet> centroids)
{
    if (!task || !extractor)
        throw ContractViolation("initialize: task and extractor are required");
    params.validate();

    RunState s;
    s.seed = seed;
    s.rng.seed(seed);
    s.task = std::move(task);
    s.extractor = std::move(extractor);
    s.params = params;

    std::vector<Individual> init(params.n_init);
    std::vector<Genotype> genotypes;
    genotypes.reserve(params.n_init);
    for (std::size_t i = 0; i < params.n_init; ++i)
        genotypes.push_back(random_genotype(s.task->genotype_bounds(), s.rng));
    parallel_for(genotypes.size(), params.threads,
                 [&](std::size_t i) { init[i] = evaluate(*s.task, genotypes[i], i); });
    s.next_id = params.n_init;

    if (s.extractor->trainable()) {
        s.extractor->fit(sensory_matrix(init), s.rng);
        ++s.model_updates;
    }
    describe_all(init, *s.extractor, params.threads);

    if (centroids) {
        if (centroids->dim() != s.extractor->dim())
            throw ContractViolation("initialize: centroid dimensionality does not match the extractor");
        s.container = std::make_unique<cvt::CvtGrid>(std::move(centroids));
    }
    else {
        const double l = s.extractor->trainable() ? recompute_l(init, params.target_capacity, params.l_min)
                                                  : l_from_bounds(s.extractor->descriptor_bounds(), params.target_capacity,
                                                                  params.l_min);
        s.container = std::make_unique<Archive>(l, params.spatial_index);
    }
    s.container->try_add_all(std::move(init));
    return s;
}

void run_batch(RunState& s)
{
    BatchRecord rec;
    rec.batch = s.batch_index + 1;
    const std::size_t n = s.params.batch_size;
    if (n > 0) {
        if (s.container->empty())
            throw ContractViolation("run_batch: container is empty");
        const ParentSampler pick = s.container->sampler(s.params.curiosity);
        std::vector<std::size_t> parents(n);
        std::vector<std::uint64_t> parent_ids(n);
        std::vector<Genotype> children;
        children.reserve(n);
        const auto entries = s.container->entries();
        for (std::size_t i = 0; i < n; ++i) {
            parents[i] = pick(s.rng);
            parent_ids[i] = entries[parents[i]].id;
            children.push_back(mutate(entries[parents[i]].genotype, s.task->genotype_bounds(), s.params.sigma_fraction, s.rng));
        }
        auto offspring = evaluate_all(s, children, s.next_id);
        s.next_id += n;
        s.evaluations += n;

        const auto results = s.container->try_add_all(std::move(offspring));
        for (std::size_t i = 0; i < n; ++i) {
            switch (results[i].outcome) {
            case AddOutcome::added:
                ++rec.added;
                break;
            case AddOutcome::replaced:
                ++rec.replaced;
                break;
            case AddOutcome::rejected:
                ++rec.rejected;
                break;
            }
            s.container->reward_parent(parents[i], parent_ids[i], results[i].outcome, s.params.curiosity);
        }
    }
    ++s.batch_index;
    rec.archive_size = s.container->size();
    rec.l = threshold_of(*s.container);
    rec.evaluations = s.evaluations;
    s.log.push_back(rec);
}

bool refit_and_rebuild(RunState& s)
{
    auto* archive = dynamic_cast<Archive*>(s.container.get());
    if (!archive)
        throw std::logic_error("refit_and_rebuild: only unstructured archives are rebuilt");
    // Too few distinct behaviours to fit on: keep the current model.
    if (archive->size() < s.extractor->min_fit_rows())
        return false;
    std::vector<Individual> entries = archive->release();
    s.extractor->fit(sensory_matrix(entries), s.rng);
    describe_all(entries, *s.extractor, s.params.threads);
    const double l = recompute_l(entries, s.params.target_capacity, s.params.l_min);
    s.container = std::make_unique<Archive>(rebuild_archive(std::move(entries), l, s.params.spatial_index));
    ++s.model_updates;
    return true;
}

void step(RunState& s)
{
    run_batch(s);
    if (s.extractor->trainable() && s.params.schedule.due(s.batch_index) && refit_and_rebuild(s)) {
        auto& rec = s.log.back();
        rec.model_updated = true;
        rec.archive_size = s.container->size();
        rec.l = threshold_of(*s.container);
    }
}

} // namespace aurora
