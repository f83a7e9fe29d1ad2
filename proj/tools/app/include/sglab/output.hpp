#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace sglab {

using Cell = std::variant<std::string, std::int64_t, double>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

/// Shortest round-trip decimal form, stable across platforms with IEEE doubles.
std::string format_double(double v);

void write_csv(const Table& t, std::ostream& out);
/// Array of row objects.
void write_json(const Table& t, std::ostream& out);
void write_table(const Table& t, const std::string& format, std::ostream& out);

/// JSON with doubles printed through format_double.
std::string dump_report(const nlohmann::ordered_json& j);

}  // namespace sglab
