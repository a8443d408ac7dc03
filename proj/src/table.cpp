#include "creditlens/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "creditlens/errors.hpp"

namespace creditlens {

namespace {

bool needs_quoting(const std::string& field) {
    return field.find_first_of(",\"\n\r") != std::string::npos;
}

std::string csv_escape(const std::string& field) {
    if (!needs_quoting(field)) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

// Full-stream CSV parser: quoted fields may contain commas, quotes, and
// newlines, so records are delimited by unquoted newlines only.
std::vector<std::vector<std::string>> parse_csv(const std::string& text,
                                                const std::string& source) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    bool field_started = false;
    int lineno = 1;
    auto end_field = [&] {
        fields.push_back(std::move(cur));
        cur.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(fields));
        fields.clear();
    };
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '\n') ++lineno;
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            end_record();
        } else {
            cur += c;
            field_started = true;
        }
    }
    if (quoted)
        throw DataError(source + ": unterminated quote at line " + std::to_string(lineno));
    if (field_started || !fields.empty()) end_record();
    return records;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    // shortest representation that round-trips
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

void write_table(const Table& table, const std::filesystem::path& out, TableFormat format) {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw DataError("cannot open for writing: " + out.string());
    if (format == TableFormat::Csv) {
        for (size_t i = 0; i < table.header.size(); ++i) {
            if (i) os << ',';
            os << csv_escape(table.header[i]);
        }
        os << '\n';
        for (const auto& row : table.rows) {
            for (size_t i = 0; i < row.size(); ++i) {
                if (i) os << ',';
                os << csv_escape(row[i]);
            }
            os << '\n';
        }
    } else {
        for (const auto& row : table.rows) {
            nlohmann::ordered_json obj;
            for (size_t i = 0; i < table.header.size() && i < row.size(); ++i)
                obj[table.header[i]] = row[i];
            os << obj.dump() << '\n';
        }
    }
    if (!os) throw DataError("write failed: " + out.string());
}

Table read_table(const std::filesystem::path& in, TableFormat format) {
    std::ifstream is(in, std::ios::binary);
    if (!is) throw DataError("cannot open: " + in.string());
    Table table;
    std::string line;
    int lineno = 0;
    if (format == TableFormat::Csv) {
        std::ostringstream buf;
        buf << is.rdbuf();
        auto records = parse_csv(buf.str(), in.string());
        if (records.empty()) throw DataError("empty CSV (missing header): " + in.string());
        table.header = std::move(records.front());
        table.rows.assign(std::make_move_iterator(records.begin() + 1),
                          std::make_move_iterator(records.end()));
    } else {
        while (std::getline(is, line)) {
            ++lineno;
            if (line.empty()) continue;
            nlohmann::ordered_json obj;
            try {
                obj = nlohmann::ordered_json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                throw DataError(in.string() + ":" + std::to_string(lineno) + ": " + e.what());
            }
            if (table.header.empty())
                for (auto& [k, v] : obj.items()) table.header.push_back(k);
            std::vector<std::string> row;
            for (const auto& h : table.header) row.push_back(obj.value(h, std::string{}));
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

}  // namespace creditlens
