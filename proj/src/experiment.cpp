#include <aurora/experiment.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <aurora/io.hpp>
#include <aurora/tasks/airhockey.hpp>
#include <aurora/tasks/ballistic.hpp>

namespace fs = std::filesystem;

namespace aurora {

std::shared_ptr<const tasks::Task> make_task(const RunConfig& cfg)
{
    if (cfg.task == "ballistic")
        return std::make_shared<tasks::BallisticTask>(cfg.ballistic);
    if (cfg.task == "airhockey")
        return std::make_shared<tasks::AirHockeyTask>(cfg.airhockey);
    throw std::invalid_argument("unknown task '" + cfg.task + "'");
}

std::vector<Vector> ballistic_reference_repertoire(const tasks::BallisticConfig& cfg, std::size_t resolution,
                                                   std::size_t target_capacity, double l_min)
{
    if (resolution < 2)
        throw ContractViolation("reference repertoire: resolution must be at least 2");
    const tasks::BallisticTask task(cfg);
    Archive archive(l_from_bounds(task.ground_truth_bounds(), target_capacity, l_min), true);
    const double n = static_cast<double>(resolution - 1);
    for (std::size_t i = 0; i < resolution; ++i) {
        const double alpha = cfg.angle_min + (cfg.angle_max - cfg.angle_min) * static_cast<double>(i) / n;
        for (std::size_t j = 0; j < resolution; ++j) {
            Individual ind;
            ind.genotype = Genotype{{alpha, cfg.force_max * static_cast<double>(j) / n}};
            const auto apex = tasks::ballistic_ground_truth(ind.genotype, cfg);
            ind.descriptor = {apex.x, apex.y};
            archive.try_add(std::move(ind));
        }
    }
    std::vector<Vector> out;
    out.reserve(archive.size());
    for (const auto& e : archive.entries())
        out.push_back(e.descriptor);
    return out;
}

template <class T, class F>
std::shared_ptr<const T> Resources::cached(std::map<std::string, std::shared_future<std::shared_ptr<const T>>>& slot,
                                           const std::string& key, F&& build)
{
    std::promise<std::shared_ptr<const T>> promise;
    std::shared_future<std::shared_ptr<const T>> future;
    bool owner = false;
    {
        std::lock_guard lock(_mutex);
        auto it = slot.find(key);
        if (it == slot.end()) {
            future = promise.get_future().share();
            slot.emplace(key, future);
            owner = true;
        }
        else {
            future = it->second;
        }
    }
    if (owner) {
        try {
            promise.set_value(build());
        }
        catch (...) {
            promise.set_exception(std::current_exception());
        }
    }
    return future.get();
}

namespace {
    std::string task_key(const RunConfig& cfg)
    {
        RunConfig c;
        c.task = cfg.task;
        c.ballistic = cfg.ballistic;
        c.airhockey = cfg.airhockey;
        std::ostringstream os;
        write_config(os, c);
        std::string all = os.str();
        // Only the task sections matter.
        const auto from = all.find(cfg.task == "ballistic" ? "[ballistic]" : "[airhockey]");
        const auto to = all.find("\n[", from + 1);
        return cfg.task + all.substr(from, to - from);
    }
} // namespace

std::shared_ptr<const cvt::CentroidSet> Resources::centroids(const RunConfig& cfg, Variant v)
{
    if (v != Variant::cvt_prior && v != Variant::cvt_blind)
        throw ContractViolation("Resources::centroids: not a CVT variant");
    std::ostringstream key;
    key << to_string(v) << '|' << task_key(cfg) << '|' << cfg.cvt.centroid_seed << '|' << cfg.cvt.max_iterations << '|'
        << (v == Variant::cvt_prior ? cfg.cvt.prior_k : cfg.cvt.blind_k) << '|' << cfg.cvt.blind_refine;
    return cached(_centroids, key.str(), [&]() -> std::shared_ptr<const cvt::CentroidSet> {
        fs::path cache_file;
        if (!cfg.cvt.cache_dir.empty()) {
            const auto h = std::hash<std::string>{}(key.str());
            cache_file = fs::path(cfg.cvt.cache_dir) / (std::string(to_string(v)) + "_" + std::to_string(h) + ".csv");
            if (fs::exists(cache_file))
                return std::make_shared<cvt::CentroidSet>(cvt::load_centroids_csv(cache_file.string()));
        }
        const auto task = make_task(cfg);
        const cvt::KMeansOptions opts{cfg.cvt.max_iterations};
        auto set = v == Variant::cvt_prior
            ? cvt::build_prior_centroids(*task, task->prior_samples(), cfg.cvt.prior_k, cfg.cvt.centroid_seed, opts)
            : cvt::build_blind_centroids(task->sensory_bounds(), cfg.cvt.blind_k, cfg.cvt.centroid_seed,
                                         cfg.cvt.blind_refine, opts);
        if (!cache_file.empty()) {
            fs::create_directories(cache_file.parent_path());
            cvt::save_centroids_csv(set, cache_file.string());
        }
        return std::make_shared<cvt::CentroidSet>(std::move(set));
    });
}

std::shared_ptr<const std::vector<Vector>> Resources::klc_reference(const RunConfig& cfg)
{
    if (cfg.task != "ballistic")
        return nullptr;
    std::ostringstream key;
    key << task_key(cfg) << '|' << cfg.metrics.klc_reference_resolution << '|' << cfg.engine.target_capacity << '|'
        << cfg.engine.l_min;
    return cached(_references, key.str(), [&]() -> std::shared_ptr<const std::vector<Vector>> {
        return std::make_shared<std::vector<Vector>>(ballistic_reference_repertoire(
            cfg.ballistic, cfg.metrics.klc_reference_resolution, cfg.engine.target_capacity, cfg.engine.l_min));
    });
}

namespace {
    Dataset prior_dataset(const tasks::Task& task)
    {
        const auto samples = task.prior_samples();
        if (samples.empty())
            throw std::invalid_argument(std::string("task ") + std::string(task.name()) + " offers no prior samples");
        Dataset d(static_cast<Eigen::Index>(samples.size()), static_cast<Eigen::Index>(kSensoryDim));
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const Vector s = tasks::sensory_vector(task.simulate(samples[i]));
            for (std::size_t j = 0; j < kSensoryDim; ++j)
                d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s[j];
        }
        return d;
    }

    Dataset sensory_matrix(std::span<const Individual> entries)
    {
        Dataset d(static_cast<Eigen::Index>(entries.size()), static_cast<Eigen::Index>(kSensoryDim));
        for (std::size_t i = 0; i < entries.size(); ++i)
            for (std::size_t j = 0; j < kSensoryDim; ++j)
                d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = entries[i].sensory[j];
        return d;
    }

    std::vector<Vector> ground_truth_of(const tasks::Task& task, std::span<const Individual> entries)
    {
        std::vector<Vector> gt;
        gt.reserve(entries.size());
        for (const auto& e : entries)
            gt.push_back(task.ground_truth(e.genotype, tasks::unflatten(e.sensory)));
        return gt;
    }

    std::string cell(const std::optional<double>& v) { return v ? io::format_double(*v) : std::string(); }

    io::CsvTable metrics_table(const std::vector<MetricRow>& rows)
    {
        io::CsvTable t;
        t.header = {"batch", "archive_size", "l", "added", "replaced", "rejected", "evaluations", "model_updated",
                    "klc", "diversity", "rmse"};
        for (const auto& r : rows) {
            const auto& b = r.batch;
            t.rows.push_back({std::to_string(b.batch), std::to_string(b.archive_size),
                              std::isnan(b.l) ? std::string() : io::format_double(b.l), std::to_string(b.added),
                              std::to_string(b.replaced), std::to_string(b.rejected), std::to_string(b.evaluations),
                              b.model_updated ? "1" : "0", cell(r.klc), cell(r.diversity), cell(r.rmse)});
        }
        return t;
    }

    nlohmann::json optional_json(const std::optional<double>& v)
    {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    }

    nlohmann::json summary_json(const RunSummary& s)
    {
        return {{"task", s.task},
                {"variant", s.variant},
                {"seed", s.seed},
                {"batches", s.batches},
                {"evaluations", s.evaluations},
                {"final_size", s.final_size},
                {"final_klc", optional_json(s.final_klc)},
                {"final_diversity", optional_json(s.final_diversity)},
                {"final_rmse", optional_json(s.final_rmse)},
                {"model_updates", s.model_updates},
                {"seconds", s.seconds}};
    }

    void write_snapshot(const fs::path& path, const RunState& s, const RunConfig& cfg)
    {
        const auto entries = s.container->entries();
        io::ArchiveHeader h{s.batch_index, s.container->l(), s.seed, to_string(cfg.variant), cfg.task};
        io::write_json(path, io::archive_to_json(h, entries, ground_truth_of(*s.task, entries)));
    }
} // namespace

VariantSetup setup_variant(const RunConfig& cfg, Resources& resources, Rng& rng)
{
    VariantSetup v;
    v.task = make_task(cfg);
    switch (cfg.variant) {
    case Variant::hand_coded:
        v.extractor = std::make_shared<HandCodedExtractor>(v.task);
        break;
    case Variant::genotype:
        v.extractor = std::make_shared<GenotypeExtractor>(v.task->genotype_bounds());
        break;
    case Variant::pca_inc:
        v.extractor = std::make_shared<LatentExtractor>(ExtractorKind::pca, LatentMode::incremental, cfg.ae);
        break;
    case Variant::ae_inc:
        v.extractor = std::make_shared<LatentExtractor>(ExtractorKind::autoencoder, LatentMode::incremental, cfg.ae);
        break;
    case Variant::pca_pre:
    case Variant::ae_pre: {
        const auto kind = cfg.variant == Variant::pca_pre ? ExtractorKind::pca : ExtractorKind::autoencoder;
        auto ex = std::make_shared<LatentExtractor>(kind, LatentMode::pretrained, cfg.ae);
        ex->fit(prior_dataset(*v.task), rng);
        v.extractor = std::move(ex);
        break;
    }
    case Variant::cvt_prior:
    case Variant::cvt_blind:
        v.extractor = std::make_shared<SensoryExtractor>(v.task->sensory_bounds());
        v.centroids = resources.centroids(cfg, cfg.variant);
        break;
    }
    return v;
}

MetricRow measure(const RunState& s, const RunConfig& cfg, const std::vector<Vector>* reference)
{
    MetricRow row;
    if (!s.log.empty())
        row.batch = s.log.back();
    else {
        row.batch.archive_size = s.container->size();
        row.batch.l = s.container->l() ? *s.container->l() : std::nan("");
        row.batch.evaluations = s.evaluations;
    }
    const auto entries = s.container->entries();
    if (entries.empty())
        return row;
    if (reference && s.task->has_ground_truth())
        row.klc = metrics::klc(*reference, ground_truth_of(*s.task, entries), s.task->ground_truth_bounds(),
                               cfg.metrics.klc_bins, cfg.metrics.klc_epsilon);
    if (cfg.task == "airhockey") {
        std::vector<tasks::Trajectory> traj;
        traj.reserve(entries.size());
        for (const auto& e : entries)
            traj.push_back(tasks::unflatten(e.sensory));
        row.diversity = metrics::diversity(traj, s.task->ground_truth_bounds(), cfg.metrics.diversity_bins);
    }
    row.rmse = metrics::reconstruction_rmse(*s.extractor, sensory_matrix(entries));
    return row;
}

RunRecord run_experiment(const RunConfig& cfg, Resources& resources, const std::optional<fs::path>& out,
                         std::ostream* progress)
{
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    if (out)
        fs::create_directories(*out);

    // Pre-training draws from its own stream so the run stream is the same
    // for every variant.
    Rng setup_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    VariantSetup setup = setup_variant(cfg, resources, setup_rng);
    const auto reference = resources.klc_reference(cfg);

    RunRecord rec;
    rec.config = cfg;
    RunState state = initialize(setup.task, setup.extractor, cfg.engine, cfg.seed, setup.centroids);
    rec.rows.reserve(cfg.batches + 1);
    rec.rows.push_back(measure(state, cfg, reference.get()));
    if (out && cfg.metrics.snapshots && state.model_updates > 0)
        write_snapshot(*out / "archive_b0.json", state, cfg);

    for (std::size_t b = 0; b < cfg.batches; ++b) {
        step(state);
        const auto& last = state.log.back();
        const bool final = b + 1 == cfg.batches;
        if (last.batch % cfg.metrics.interval == 0 || last.model_updated || final) {
            rec.rows.push_back(measure(state, cfg, reference.get()));
        }
        else {
            MetricRow r;
            r.batch = last;
            rec.rows.push_back(r);
        }
        if (out && cfg.metrics.snapshots && last.model_updated)
            write_snapshot(*out / ("archive_b" + std::to_string(last.batch) + ".json"), state, cfg);
        if (progress && (last.batch % 100 == 0 || final)) {
            *progress << cfg.task << '/' << to_string(cfg.variant) << " seed " << cfg.seed << ": batch " << last.batch
                      << '/' << cfg.batches << ", size " << last.archive_size << '\n';
        }
    }

    const MetricRow& fin = rec.rows.back();
    RunSummary& sum = rec.summary;
    sum.task = cfg.task;
    sum.variant = to_string(cfg.variant);
    sum.seed = cfg.seed;
    sum.batches = cfg.batches;
    sum.evaluations = state.evaluations;
    sum.final_size = state.container->size();
    sum.final_klc = fin.klc;
    sum.final_diversity = fin.diversity;
    sum.final_rmse = fin.rmse;
    sum.model_updates = state.model_updates;
    sum.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (out) {
        std::ofstream cfg_os(*out / "config.ini");
        write_config(cfg_os, cfg);
        io::write_csv(*out / "metrics.csv", metrics_table(rec.rows));
        write_snapshot(*out / "archive_final.json", state, cfg);
        if (const LatentModel* m = state.extractor->model())
            io::write_json(*out / "model.json", m->to_json());
        io::write_json(*out / "summary.json", summary_json(sum));
    }
    return rec;
}

std::vector<VariantStats> summarize(const std::vector<RunSummary>& runs)
{
    std::map<std::string, std::vector<const RunSummary*>> groups;
    std::vector<std::string> order;
    for (const auto& r : runs) {
        const std::string key = r.task + "/" + r.variant;
        if (!groups.count(key))
            order.push_back(key);
        groups[key].push_back(&r);
    }
    auto collect = [](const std::vector<const RunSummary*>& g, auto get) -> std::optional<metrics::Quartiles> {
        std::vector<double> v;
        for (const auto* r : g)
            if (const auto x = get(*r))
                v.push_back(*x);
        if (v.empty())
            return std::nullopt;
        return metrics::quartiles(v);
    };
    std::vector<VariantStats> out;
    for (const auto& key : order) {
        const auto& g = groups[key];
        VariantStats s;
        s.variant = key;
        s.runs = g.size();
        s.size = *collect(g, [](const RunSummary& r) { return std::optional<double>(static_cast<double>(r.final_size)); });
        s.klc = collect(g, [](const RunSummary& r) { return r.final_klc; });
        s.diversity = collect(g, [](const RunSummary& r) { return r.final_diversity; });
        s.rmse = collect(g, [](const RunSummary& r) { return r.final_rmse; });
        out.push_back(s);
    }
    return out;
}

namespace {
    void write_suite_summary(const fs::path& path, const std::vector<VariantStats>& table)
    {
        io::CsvTable t;
        t.header = {"variant", "runs"};
        for (const char* m : {"size", "klc", "diversity", "rmse"})
            for (const char* q : {"median", "q1", "q3"})
                t.header.push_back(std::string(m) + "_" + q);
        auto add = [](std::vector<std::string>& row, const std::optional<metrics::Quartiles>& q) {
            row.push_back(q ? io::format_double(q->median) : "");
            row.push_back(q ? io::format_double(q->q1) : "");
            row.push_back(q ? io::format_double(q->q3) : "");
        };
        for (const auto& s : table) {
            std::vector<std::string> row{s.variant, std::to_string(s.runs)};
            add(row, s.size);
            add(row, s.klc);
            add(row, s.diversity);
            add(row, s.rmse);
            t.rows.push_back(std::move(row));
        }
        io::write_csv(path, t);
    }
} // namespace

SuiteResult run_suite(const RunConfig& base, std::size_t replications, std::size_t parallel, Resources& resources,
                      const std::optional<fs::path>& out_root, std::ostream* progress)
{
    std::vector<RunConfig> jobs;
    const std::vector<Variant> variants = base.suite_variants.empty() ? std::vector<Variant>{base.variant}
                                                                      : base.suite_variants;
    for (Variant v : variants) {
        for (std::size_t i = 0; i < replications; ++i) {
            RunConfig c = base;
            c.variant = v;
            c.seed = base.seed + i;
            jobs.push_back(c);
        }
    }

    std::vector<std::optional<RunSummary>> results(jobs.size());
    std::vector<std::string> errors(jobs.size());
    std::mutex log_mutex;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const auto& c = jobs[i];
            std::optional<fs::path> dir;
            if (out_root)
                dir = *out_root / (c.task + "_" + to_string(c.variant)) / ("seed_" + std::to_string(c.seed));
            try {
                results[i] = run_experiment(c, resources, dir).summary;
                if (progress) {
                    std::lock_guard lock(log_mutex);
                    *progress << "done " << c.task << '/' << to_string(c.variant) << " seed " << c.seed << " ("
                              << io::format_double(results[i]->seconds) << " s)\n";
                }
            }
            catch (const std::exception& e) {
                errors[i] = c.task + "/" + to_string(c.variant) + " seed " + std::to_string(c.seed) + ": " + e.what();
                if (progress) {
                    std::lock_guard lock(log_mutex);
                    *progress << "FAILED " << errors[i] << '\n';
                }
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const std::size_t n = std::max<std::size_t>(1, std::min(parallel, jobs.size()));
        for (std::size_t t = 0; t < n; ++t)
            pool.emplace_back(worker);
    }

    SuiteResult out;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (results[i])
            out.runs.push_back(*results[i]);
        else
            out.failures.push_back(errors[i]);
    }
    out.table = summarize(out.runs);
    if (out_root) {
        fs::create_directories(*out_root);
        write_suite_summary(*out_root / "suite_summary.csv", out.table);
    }
    return out;
}

std::vector<fs::path> export_plot_data(const fs::path& runs_dir, const std::string& metric)
{
    static const std::map<std::string, std::string> columns{
        {"klc", "klc"}, {"diversity", "diversity"}, {"size", "archive_size"}, {"rmse", "rmse"}};
    const auto col_it = columns.find(metric);
    if (col_it == columns.end())
        throw std::invalid_argument("export: metric must be one of klc, diversity, size, rmse");
    if (!fs::is_directory(runs_dir))
        throw std::runtime_error("export: " + runs_dir.string() + " is not a directory");

    // group directory -> run directories
    std::map<fs::path, std::vector<fs::path>> groups;
    for (const auto& entry : fs::recursive_directory_iterator(runs_dir)) {
        if (entry.is_regular_file() && entry.path().filename() == "metrics.csv") {
            const fs::path run = entry.path().parent_path();
            groups[run.parent_path()].push_back(run);
        }
    }

    std::vector<fs::path> written;
    for (auto& [group, runs] : groups) {
        std::sort(runs.begin(), runs.end());
        std::map<long long, std::vector<double>> by_batch;
        for (const auto& run : runs) {
            const io::CsvTable t = io::read_csv(run / "metrics.csv");
            const std::size_t bc = t.column("batch");
            const std::size_t mc = t.column(col_it->second);
            for (std::size_t r = 0; r < t.rows.size(); ++r)
                if (const auto v = t.number(r, mc))
                    by_batch[static_cast<long long>(*t.number(r, bc))].push_back(*v);

            if (fs::exists(run / "archive_final.json")) {
                const auto snap = io::archive_from_json(io::read_json(run / "archive_final.json"));
                io::CsvTable sc;
                sc.header = {"descriptor_x", "descriptor_y", "gt_x", "gt_y"};
                for (std::size_t i = 0; i < snap.entries.size(); ++i) {
                    const auto& d = snap.entries[i].descriptor;
                    const bool two = d.size() == 2;
                    const bool gt = !snap.ground_truth.empty() && snap.ground_truth[i].size() == 2;
                    sc.rows.push_back({two ? io::format_double(d[0]) : "", two ? io::format_double(d[1]) : "",
                                       gt ? io::format_double(snap.ground_truth[i][0]) : "",
                                       gt ? io::format_double(snap.ground_truth[i][1]) : ""});
                }
                io::write_csv(run / "scatter.csv", sc);
                written.push_back(run / "scatter.csv");
            }
        }
        io::CsvTable plot;
        plot.header = {"batch", "median", "q1", "q3", "n"};
        for (const auto& [batch, values] : by_batch) {
            const auto q = metrics::quartiles(values);
            plot.rows.push_back({std::to_string(batch), io::format_double(q.median), io::format_double(q.q1),
                                 io::format_double(q.q3), std::to_string(values.size())});
        }
        const std::string name = group == runs_dir ? std::string("runs") : group.filename().string();
        const fs::path path = runs_dir / ("plot_" + metric + "_" + name + ".csv");
        io::write_csv(path, plot);
        written.push_back(path);
    }
    return written;
}

} // namespace aurora
