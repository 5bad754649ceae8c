#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include <aurora/experiment.hpp>
#include <aurora/io.hpp>

namespace fs = std::filesystem;

namespace {

std::optional<std::string> env(const char* name)
{
    const char* v = std::getenv(name);
    if (!v || !*v)
        return std::nullopt;
    return std::string(v);
}

std::string opt(const std::optional<double>& v) { return v ? aurora::io::format_double(*v) : "n/a"; }

void print_table(const std::vector<aurora::VariantStats>& table)
{
    auto q = [](const std::optional<aurora::metrics::Quartiles>& s) {
        return s ? aurora::io::format_double(s->median) + " [" + aurora::io::format_double(s->q1) + ", "
                + aurora::io::format_double(s->q3) + "]"
                 : std::string("n/a");
    };
    for (const auto& s : table) {
        std::cout << s.variant << " (" << s.runs << " runs): size " << q(s.size) << ", klc " << q(s.klc)
                  << ", diversity " << q(s.diversity) << ", rmse " << q(s.rmse) << '\n';
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"AURORA quality-diversity experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::size_t replications = 1;
    std::size_t parallel = 0;
    std::string runs_dir;
    std::string metric;
    bool quiet = false;

    auto* run = app.add_subcommand("run", "Run one configuration");
    run->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--out", out_dir, "Output directory (default $AURORA_OUT_DIR or runs/<task>_<variant>/seed_<seed>)");
    run->add_flag("--quiet", quiet, "No progress output");

    auto* suite = app.add_subcommand("suite", "Run replications of every configured variant");
    suite->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    suite->add_option("--replications", replications, "Replications per variant")->required()->check(CLI::PositiveNumber);
    suite->add_option("--parallel", parallel, "Concurrent runs (default $AURORA_PARALLEL or 1)");
    suite->add_option("--out", out_dir, "Output root (default $AURORA_OUT_DIR or runs)");
    suite->add_flag("--quiet", quiet, "No progress output");

    auto* exp = app.add_subcommand("export", "Write plot-ready CSV files from finished runs");
    exp->add_option("--runs", runs_dir, "Directory holding runs")->required()->check(CLI::ExistingDirectory);
    exp->add_option("--metric", metric, "Metric to aggregate")
        ->required()
        ->check(CLI::IsMember({"klc", "diversity", "size", "rmse"}));

    CLI11_PARSE(app, argc, argv);

    try {
        std::ostream* progress = quiet ? nullptr : &std::cerr;
        if (out_dir.empty())
            out_dir = env("AURORA_OUT_DIR").value_or("");
        if (parallel == 0) {
            const auto p = env("AURORA_PARALLEL");
            parallel = p ? static_cast<std::size_t>(std::stoul(*p)) : 1;
            if (parallel == 0)
                throw std::invalid_argument("AURORA_PARALLEL must be positive");
        }

        if (*run) {
            aurora::RunConfig cfg = aurora::load_config(config_path);
            if (seed)
                cfg.seed = *seed;
            const fs::path out = out_dir.empty()
                ? fs::path("runs") / (cfg.task + "_" + aurora::to_string(cfg.variant)) / ("seed_" + std::to_string(cfg.seed))
                : fs::path(out_dir);
            aurora::Resources resources;
            const auto rec = aurora::run_experiment(cfg, resources, out, progress);
            const auto& s = rec.summary;
            std::cout << s.task << '/' << s.variant << " seed " << s.seed << ": size " << s.final_size << ", klc "
                      << opt(s.final_klc) << ", diversity " << opt(s.final_diversity) << ", rmse " << opt(s.final_rmse)
                      << ", " << aurora::io::format_double(s.seconds) << " s -> " << out.string() << '\n';
            return 0;
        }
        if (*suite) {
            aurora::RunConfig cfg = aurora::load_config(config_path);
            const fs::path out = out_dir.empty() ? fs::path("runs") : fs::path(out_dir);
            aurora::Resources resources;
            const auto res = aurora::run_suite(cfg, replications, parallel, resources, out, progress);
            print_table(res.table);
            for (const auto& f : res.failures)
                std::cerr << "failed: " << f << '\n';
            std::cout << "summary: " << (out / "suite_summary.csv").string() << '\n';
            return res.failures.empty() ? 0 : 1;
        }
        if (*exp) {
            for (const auto& p : aurora::export_plot_data(runs_dir, metric))
                std::cout << p.string() << '\n';
            return 0;
        }
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
