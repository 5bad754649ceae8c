#include <aurora/io.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace aurora::io {

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nlohmann::json archive_to_json(const ArchiveHeader& header, std::span<const Individual> entries,
                               const std::vector<Vector>& ground_truth)
{
    if (!ground_truth.empty() && ground_truth.size() != entries.size())
        throw ContractViolation("archive_to_json: one ground-truth descriptor per entry expected");
    nlohmann::json j;
    j["batch_index"] = header.batch_index;
    j["l"] = header.l ? nlohmann::json(*header.l) : nlohmann::json(nullptr);
    j["seed"] = header.seed;
    j["variant_name"] = header.variant;
    j["task"] = header.task;
    auto& arr = j["entries"] = nlohmann::json::array();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        nlohmann::json o;
        o["id"] = e.id;
        o["genotype"] = e.genotype.values;
        o["descriptor"] = e.descriptor;
        o["sensory"] = e.sensory;
        o["fitness"] = e.fitness;
        o["curiosity"] = e.curiosity;
        if (!ground_truth.empty())
            o["ground_truth"] = ground_truth[i];
        arr.push_back(std::move(o));
    }
    return j;
}

ArchiveSnapshot archive_from_json(const nlohmann::json& j)
{
    ArchiveSnapshot s;
    s.header.batch_index = j.at("batch_index").get<std::size_t>();
    if (!j.at("l").is_null())
        s.header.l = j.at("l").get<double>();
    s.header.seed = j.at("seed").get<std::uint64_t>();
    s.header.variant = j.at("variant_name").get<std::string>();
    s.header.task = j.value("task", std::string());
    for (const auto& o : j.at("entries")) {
        Individual e;
        e.id = o.value("id", std::uint64_t{0});
        e.genotype.values = o.at("genotype").get<Vector>();
        e.descriptor = o.at("descriptor").get<Vector>();
        e.sensory = o.at("sensory").get<Vector>();
        e.fitness = o.at("fitness").get<double>();
        e.curiosity = o.at("curiosity").get<double>();
        if (o.contains("ground_truth"))
            s.ground_truth.push_back(o.at("ground_truth").get<Vector>());
        s.entries.push_back(std::move(e));
    }
    if (!s.ground_truth.empty() && s.ground_truth.size() != s.entries.size())
        throw std::runtime_error("archive snapshot: ground truth missing for some entries");
    return s;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write " + path.string());
    os << j.dump() << '\n';
    if (!os)
        throw std::runtime_error("write failed for " + path.string());
}

nlohmann::json read_json(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot read " + path.string());
    try {
        return nlohmann::json::parse(is);
    }
    catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

std::size_t CsvTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            return i;
    throw std::out_of_range("csv: no column '" + name + "'");
}

std::optional<double> CsvTable::number(std::size_t row, std::size_t col) const
{
    const std::string& cell = rows.at(row).at(col);
    if (cell.empty())
        return std::nullopt;
    return std::stod(cell);
}

void write_csv(const std::filesystem::path& path, const CsvTable& table)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write " + path.string());
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            os << (i ? "," : "") << cells[i];
        os << '\n';
    };
    line(table.header);
    for (const auto& r : table.rows) {
        if (r.size() != table.header.size())
            throw std::logic_error("csv: row width differs from header");
        line(r);
    }
    if (!os)
        throw std::runtime_error("write failed for " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot read " + path.string());
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        if (!line.empty() && line.back() == ',')
            cells.emplace_back();
        return cells;
    };
    CsvTable t;
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error(path.string() + ": empty csv");
    t.header = split(line);
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        auto cells = split(line);
        if (cells.size() != t.header.size())
            throw std::runtime_error(path.string() + ": ragged row");
        t.rows.push_back(std::move(cells));
    }
    return t;
}

} // namespace aurora::io
