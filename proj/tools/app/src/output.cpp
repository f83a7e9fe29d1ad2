#include "sglab/output.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace sglab {

std::string format_double(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_cell(const Cell& c)
{
    if (const auto* s = std::get_if<std::string>(&c)) {
        if (s->find_first_of(",\"\n") == std::string::npos) {
            return *s;
        }
        std::string q = "\"";
        for (char ch : *s) {
            q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        }
        return q + "\"";
    }
    if (const auto* i = std::get_if<std::int64_t>(&c)) {
        return std::to_string(*i);
    }
    return format_double(std::get<double>(c));
}

}  // namespace

void write_csv(const Table& t, std::ostream& out)
{
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        out << (i ? "," : "") << t.columns[i];
    }
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << csv_cell(row[i]);
        }
        out << '\n';
    }
}

void write_json(const Table& t, std::ostream& out)
{
    out << "[";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        out << (r ? ",\n " : "\n ") << "{";
        for (std::size_t i = 0; i < t.columns.size(); ++i) {
            out << (i ? ", " : "") << nlohmann::json(t.columns[i]).dump() << ": ";
            const Cell& c = t.rows[r][i];
            if (const auto* s = std::get_if<std::string>(&c)) {
                out << nlohmann::json(*s).dump();
            } else if (const auto* n = std::get_if<std::int64_t>(&c)) {
                out << *n;
            } else {
                const double d = std::get<double>(c);
                out << (std::isfinite(d) ? format_double(d) : "null");
            }
        }
        out << "}";
    }
    out << "\n]\n";
}

void write_table(const Table& t, const std::string& format, std::ostream& out)
{
    if (format == "json") {
        write_json(t, out);
    } else {
        write_csv(t, out);
    }
}

namespace {

void dump_value(const nlohmann::ordered_json& j, std::ostream& out, int indent)
{
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    if (j.is_object()) {
        if (j.empty()) {
            out << "{}";
            return;
        }
        out << "{\n";
        bool first = true;
        for (const auto& [k, v] : j.items()) {
            out << (first ? "" : ",\n") << inner << nlohmann::json(k).dump() << ": ";
            dump_value(v, out, indent + 1);
            first = false;
        }
        out << "\n" << pad << "}";
    } else if (j.is_array()) {
        if (j.empty()) {
            out << "[]";
            return;
        }
        out << "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            out << (i ? ",\n" : "") << inner;
            dump_value(j[i], out, indent + 1);
        }
        out << "\n" << pad << "]";
    } else if (j.is_number_float()) {
        const double d = j.get<double>();
        out << (std::isfinite(d) ? format_double(d) : "null");
    } else {
        out << j.dump();
    }
}

}  // namespace

std::string dump_report(const nlohmann::ordered_json& j)
{
    std::ostringstream s;
    dump_value(j, s, 0);
    s << '\n';
    return s.str();
}

}  // namespace sglab
