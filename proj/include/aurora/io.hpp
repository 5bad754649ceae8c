#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <aurora/common.hpp>
#include <aurora/qd.hpp>

namespace aurora::io {

/// printf("%.17g"), which round-trips every double.
std::string format_double(double v);

struct ArchiveHeader {
    std::size_t batch_index = 0;
    /// Absent for containers without a threshold.
    std::optional<double> l;
    std::uint64_t seed = 0;
    std::string variant;
    std::string task;
};

/// Entries carry genotype, descriptor, sensory, fitness, curiosity and,
/// when `ground_truth` is non-empty, the ground-truth descriptor per entry.
nlohmann::json archive_to_json(const ArchiveHeader& header, std::span<const Individual> entries,
                               const std::vector<Vector>& ground_truth = {});

struct ArchiveSnapshot {
    ArchiveHeader header;
    std::vector<Individual> entries;
    std::vector<Vector> ground_truth;
};

ArchiveSnapshot archive_from_json(const nlohmann::json& j);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// Header row plus string cells; blank cells stand for "not computed".
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
    /// Cell as a number; nullopt when blank.
    std::optional<double> number(std::size_t row, std::size_t col) const;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

} // namespace aurora::io
