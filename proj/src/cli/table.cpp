#include "cli/table.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "padland/errors.hpp"

namespace padland::cli {

namespace {

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const Cell& c) {
    struct {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(",\"\n") == std::string::npos) {
                return s;
            }
            std::string q = "\"";
            for (char ch : s) {
                q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            }
            return q + "\"";
        }
    } visit;
    return std::visit(visit, c);
}

nlohmann::ordered_json json_value(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        // JSON has no encoding for non-finite numbers.
        return std::isfinite(*d) ? nlohmann::ordered_json(*d) : nlohmann::ordered_json(nullptr);
    }
    if (const auto* i = std::get_if<std::int64_t>(&c)) {
        return *i;
    }
    if (const auto* s = std::get_if<std::string>(&c)) {
        return *s;
    }
    return nullptr;
}

} // namespace

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw Error("table row has " + std::to_string(row.size()) + " cells for " +
                    std::to_string(columns.size()) + " columns");
    }
    rows.push_back(std::move(row));
}

Cell optional_cell(const std::optional<double>& v) { return v ? Cell(*v) : Cell(); }

std::string to_csv(const Table& table) {
    std::ostringstream out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? "," : "") << table.columns[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << csv_field(row[i]);
        }
        out << '\n';
    }
    return out.str();
}

std::string to_json(const Table& table) {
    nlohmann::ordered_json doc;
    doc["metadata"] = table.metadata;
    auto cols = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& row : table.rows) {
            arr.push_back(json_value(row[i]));
        }
        cols[table.columns[i]] = std::move(arr);
    }
    doc["columns"] = std::move(cols);
    return doc.dump(2) + "\n";
}

void write_atomically(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw ConfigError("cannot open output file " + path);
        }
        f << content;
        f.flush();
        if (!f) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw ConfigError("cannot write output file " + path);
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw ConfigError("cannot move output into place at " + path);
    }
}

} // namespace padland::cli
