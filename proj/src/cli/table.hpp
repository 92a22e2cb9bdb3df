#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace padland::cli {

/// Missing values print as an empty CSV field and as JSON null.
using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

/// Long-format result table with a metadata record.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    nlohmann::ordered_json metadata = nlohmann::ordered_json::object();

    void add_row(std::vector<Cell> row);
};

Cell optional_cell(const std::optional<double>& v);

/// Header row, then one line per row; doubles with 17 significant digits.
std::string to_csv(const Table& table);
/// {"metadata": ..., "columns": {name: [values...]}} with columns in table order.
std::string to_json(const Table& table);

/// Writes through a temporary file in the same directory and renames it into place.
void write_atomically(const std::string& path, const std::string& content);

} // namespace padland::cli
