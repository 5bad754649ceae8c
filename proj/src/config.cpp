#include <aurora/config.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace aurora {

namespace {
    constexpr std::pair<Variant, const char*> kVariantNames[] = {
        {Variant::hand_coded, "hand_coded"}, {Variant::genotype, "genotype"}, {Variant::pca_pre, "pca_pre"},
        {Variant::pca_inc, "pca_inc"},       {Variant::ae_pre, "ae_pre"},     {Variant::ae_inc, "ae_inc"},
        {Variant::cvt_prior, "cvt_prior"},   {Variant::cvt_blind, "cvt_blind"},
    };

    std::string format_double(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

    std::vector<std::string> split_list(const std::string& s)
    {
        std::vector<std::string> parts;
        boost::split(parts, s, boost::is_any_of(","));
        std::vector<std::string> out;
        for (auto& p : parts) {
            boost::trim(p);
            if (!p.empty())
                out.push_back(p);
        }
        return out;
    }

    // Text conversion for every value type that appears in a config file.
    template <class T>
    struct Codec;

    template <>
    struct Codec<double> {
        static double read(const std::string& s)
        {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size())
                throw std::invalid_argument("trailing characters");
            return v;
        }
        static std::string write(double v) { return format_double(v); }
    };

    template <>
    struct Codec<std::uint64_t> {
        static std::uint64_t read(const std::string& s)
        {
            if (s.empty() || s[0] == '-')
                throw std::invalid_argument("expected a non-negative integer");
            std::size_t pos = 0;
            const auto v = std::stoull(s, &pos);
            if (pos != s.size())
                throw std::invalid_argument("trailing characters");
            return v;
        }
        static std::string write(std::uint64_t v) { return std::to_string(v); }
    };

    template <>
    struct Codec<bool> {
        static bool read(const std::string& s)
        {
            const std::string l = boost::to_lower_copy(s);
            if (l == "true" || l == "1" || l == "yes" || l == "on")
                return true;
            if (l == "false" || l == "0" || l == "no" || l == "off")
                return false;
            throw std::invalid_argument("expected a boolean");
        }
        static std::string write(bool v) { return v ? "true" : "false"; }
    };

    template <>
    struct Codec<std::string> {
        static std::string read(const std::string& s) { return s; }
        static std::string write(const std::string& v) { return v; }
    };

    template <>
    struct Codec<Variant> {
        static Variant read(const std::string& s) { return parse_variant(s); }
        static std::string write(Variant v) { return to_string(v); }
    };

    template <>
    struct Codec<std::vector<Variant>> {
        static std::vector<Variant> read(const std::string& s)
        {
            std::vector<Variant> out;
            for (const auto& p : split_list(s))
                out.push_back(parse_variant(p));
            return out;
        }
        static std::string write(const std::vector<Variant>& v)
        {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i)
                s += (i ? "," : "") + std::string(to_string(v[i]));
            return s;
        }
    };

    template <>
    struct Codec<UpdateSchedule> {
        static UpdateSchedule read(const std::string& s)
        {
            std::vector<std::size_t> b;
            for (const auto& p : split_list(s))
                b.push_back(Codec<std::uint64_t>::read(p));
            return UpdateSchedule(std::move(b));
        }
        static std::string write(const UpdateSchedule& v)
        {
            std::string s;
            for (std::size_t i = 0; i < v.batches().size(); ++i)
                s += (i ? "," : "") + std::to_string(v.batches()[i]);
            return s;
        }
    };

    template <>
    struct Codec<std::array<double, tasks::kArmJoints>> {
        static std::array<double, tasks::kArmJoints> read(const std::string& s)
        {
            const auto parts = split_list(s);
            if (parts.size() != tasks::kArmJoints)
                throw std::invalid_argument("expected 4 comma-separated values");
            std::array<double, tasks::kArmJoints> out{};
            for (std::size_t i = 0; i < out.size(); ++i)
                out[i] = Codec<double>::read(parts[i]);
            return out;
        }
        static std::string write(const std::array<double, tasks::kArmJoints>& v)
        {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i)
                s += (i ? "," : "") + format_double(v[i]);
            return s;
        }
    };

    // Every setting, in file order. `f(section, key, field)`.
    template <class F>
    void visit(RunConfig& c, F&& f)
    {
        auto sz = [&](const char* sec, const char* key, std::size_t& v) {
            std::uint64_t t = v;
            f(sec, key, t);
            v = static_cast<std::size_t>(t);
        };

        f("run", "task", c.task);
        f("run", "variant", c.variant);
        sz("run", "batches", c.batches);
        f("run", "seed", c.seed);
        sz("run", "batch_size", c.engine.batch_size);
        sz("run", "n_init", c.engine.n_init);
        f("run", "sigma_fraction", c.engine.sigma_fraction);
        sz("run", "target_capacity", c.engine.target_capacity);
        f("run", "l_min", c.engine.l_min);
        f("run", "schedule", c.engine.schedule);
        f("run", "spatial_index", c.engine.spatial_index);
        sz("run", "threads", c.engine.threads);

        f("curiosity", "reward", c.engine.curiosity.reward);
        f("curiosity", "penalty", c.engine.curiosity.penalty);
        f("curiosity", "floor", c.engine.curiosity.floor);
        f("curiosity", "offset", c.engine.curiosity.offset);

        f("ballistic", "gravity", c.ballistic.gravity);
        f("ballistic", "restitution", c.ballistic.restitution);
        f("ballistic", "duration", c.ballistic.duration);
        f("ballistic", "force_max", c.ballistic.force_max);
        f("ballistic", "angle_min", c.ballistic.angle_min);
        f("ballistic", "angle_max", c.ballistic.angle_max);
        sz("ballistic", "prior_resolution", c.ballistic.prior_resolution);

        auto& a = c.airhockey;
        f("airhockey", "arena_size", a.arena_size);
        f("airhockey", "base_x", a.base.x);
        f("airhockey", "base_y", a.base.y);
        f("airhockey", "base_angle", a.base_angle);
        f("airhockey", "links", a.links);
        f("airhockey", "joint_min", a.joint_bounds.lower);
        f("airhockey", "joint_max", a.joint_bounds.upper);
        f("airhockey", "puck_radius", a.puck_radius);
        f("airhockey", "puck_x", a.puck_start.x);
        f("airhockey", "puck_y", a.puck_start.y);
        f("airhockey", "friction", a.friction);
        f("airhockey", "wall_restitution", a.wall_restitution);
        sz("airhockey", "motion_steps", a.motion_steps);
        f("airhockey", "step_dt", a.step_dt);
        f("airhockey", "episode_duration", a.episode_duration);

        f("autoencoder", "learning_rate", c.ae.learning_rate);
        f("autoencoder", "beta1", c.ae.beta1);
        f("autoencoder", "beta2", c.ae.beta2);
        f("autoencoder", "adam_epsilon", c.ae.adam_epsilon);
        sz("autoencoder", "batch_size", c.ae.batch_size);
        sz("autoencoder", "max_epochs", c.ae.max_epochs);
        sz("autoencoder", "window", c.ae.window);
        sz("autoencoder", "repeats", c.ae.repeats);
        f("autoencoder", "validation_fraction", c.ae.validation_fraction);
        f("autoencoder", "std_floor", c.ae.std_floor);
        sz("autoencoder", "curve_interval", c.ae.curve_interval);
        f("autoencoder", "warm_start", c.ae.warm_start);

        sz("cvt", "prior_k", c.cvt.prior_k);
        sz("cvt", "blind_k", c.cvt.blind_k);
        sz("cvt", "blind_refine", c.cvt.blind_refine);
        sz("cvt", "max_iterations", c.cvt.max_iterations);
        f("cvt", "centroid_seed", c.cvt.centroid_seed);
        f("cvt", "cache_dir", c.cvt.cache_dir);

        sz("metrics", "interval", c.metrics.interval);
        sz("metrics", "klc_reference_resolution", c.metrics.klc_reference_resolution);
        sz("metrics", "klc_bins", c.metrics.klc_bins);
        f("metrics", "klc_epsilon", c.metrics.klc_epsilon);
        sz("metrics", "diversity_bins", c.metrics.diversity_bins);
        f("metrics", "snapshots", c.metrics.snapshots);

        f("suite", "variants", c.suite_variants);
    }
} // namespace

const char* to_string(Variant v)
{
    for (const auto& [k, name] : kVariantNames)
        if (k == v)
            return name;
    return "?";
}

Variant parse_variant(const std::string& name)
{
    for (const auto& [k, n] : kVariantNames)
        if (name == n)
            return k;
    throw std::invalid_argument("unknown variant '" + name + "'");
}

bool needs_prior(Variant v) { return v == Variant::pca_pre || v == Variant::ae_pre || v == Variant::cvt_prior; }

void RunConfig::validate() const
{
    if (task != "ballistic" && task != "airhockey")
        throw std::invalid_argument("config: task must be ballistic or airhockey, got '" + task + "'");
    if (batches < 1)
        throw std::invalid_argument("config: batches must be at least 1");
    engine.validate();
    if (task == "ballistic")
        ballistic.validate();
    else
        airhockey.validate();
    std::vector<Variant> all = suite_variants;
    all.push_back(variant);
    for (Variant v : all)
        if (needs_prior(v) && task != "ballistic")
            throw std::invalid_argument(std::string("config: variant ") + to_string(v) + " needs prior samples, which only the ballistic task provides");
    if (ae.repeats == 0 || ae.batch_size == 0 || !(ae.validation_fraction > 0.0 && ae.validation_fraction < 1.0))
        throw std::invalid_argument("config: invalid autoencoder settings");
    if (cvt.prior_k == 0 || cvt.blind_k == 0)
        throw std::invalid_argument("config: centroid counts must be positive");
    if (metrics.interval == 0 || metrics.klc_bins == 0 || metrics.diversity_bins == 0 || metrics.klc_reference_resolution < 2)
        throw std::invalid_argument("config: invalid metric settings");
}

RunConfig parse_config(std::istream& is)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    }
    catch (const pt::ini_parser_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }

    RunConfig cfg;
    std::set<std::string> known;
    visit(cfg, [&](const char* sec, const char* key, auto& field) {
        const std::string path = std::string(sec) + "." + key;
        known.insert(path);
        const auto node = tree.get_child_optional(pt::ptree::path_type(path, '.'));
        if (!node)
            return;
        std::string text = node->data();
        boost::trim(text);
        using T = std::remove_reference_t<decltype(field)>;
        try {
            field = Codec<T>::read(text);
        }
        catch (const std::exception& e) {
            throw std::invalid_argument("config: bad value for " + path + " ('" + text + "'): " + e.what());
        }
    });
    for (const auto& [sec, body] : tree) {
        if (body.empty())
            throw std::invalid_argument("config: key '" + sec + "' outside any section");
        for (const auto& [key, value] : body)
            if (!known.count(sec + "." + key))
                throw std::invalid_argument("config: unknown setting " + sec + "." + key);
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open config file " + path);
    return parse_config(is);
}

void write_config(std::ostream& os, const RunConfig& cfg)
{
    RunConfig copy = cfg;
    std::string section;
    visit(copy, [&](const char* sec, const char* key, auto& field) {
        using T = std::remove_reference_t<decltype(field)>;
        if (section != sec) {
            os << (section.empty() ? "" : "\n") << '[' << sec << "]\n";
            section = sec;
        }
        os << key << " = " << Codec<T>::write(field) << '\n';
    });
}

} // namespace aurora
