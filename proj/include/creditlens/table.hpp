#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace creditlens {

// Flat string table with a header row. All analytic outputs go through this
// so CSV/JSONL serialization stays in one place and round-trips exactly.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    bool operator==(const Table&) const = default;
};

enum class TableFormat { Csv, Jsonl };

void write_table(const Table& table, const std::filesystem::path& out, TableFormat format);
Table read_table(const std::filesystem::path& in, TableFormat format);

std::string format_double(double v);

}  // namespace creditlens
