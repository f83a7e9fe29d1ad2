#include "sglab/schema.hpp"

namespace sglab {

using nlohmann::json;

namespace {

bool has_type(const json& v, const std::string& type)
{
    if (type == "object") {
        return v.is_object();
    }
    if (type == "array") {
        return v.is_array();
    }
    if (type == "string") {
        return v.is_string();
    }
    if (type == "boolean") {
        return v.is_boolean();
    }
    if (type == "integer") {
        return v.is_number_integer() || (v.is_number_float() && v.get<double>() == static_cast<double>(static_cast<long long>(v.get<double>())));
    }
    if (type == "number") {
        return v.is_number();
    }
    if (type == "null") {
        return v.is_null();
    }
    return false;
}

void check(const json& schema, const json& v, const std::string& path, std::vector<std::string>& errors)
{
    const std::string where = path.empty() ? "/" : path;
    if (schema.contains("type")) {
        const std::string type = schema.at("type").get<std::string>();
        if (!has_type(v, type)) {
            errors.push_back(where + ": expected " + type);
            return;
        }
    }
    if (schema.contains("enum")) {
        bool found = false;
        for (const auto& e : schema.at("enum")) {
            found = found || e == v;
        }
        if (!found) {
            errors.push_back(where + ": must be one of " + schema.at("enum").dump());
        }
    }
    if (v.is_number()) {
        const double x = v.get<double>();
        if (schema.contains("minimum") && x < schema.at("minimum").get<double>()) {
            errors.push_back(where + ": must be >= " + schema.at("minimum").dump());
        }
        if (schema.contains("maximum") && x > schema.at("maximum").get<double>()) {
            errors.push_back(where + ": must be <= " + schema.at("maximum").dump());
        }
        if (schema.contains("exclusiveMinimum") && x <= schema.at("exclusiveMinimum").get<double>()) {
            errors.push_back(where + ": must be > " + schema.at("exclusiveMinimum").dump());
        }
    }
    if (v.is_array()) {
        if (schema.contains("minItems") && v.size() < schema.at("minItems").get<std::size_t>()) {
            errors.push_back(where + ": needs at least " + schema.at("minItems").dump() + " items");
        }
        if (schema.contains("maxItems") && v.size() > schema.at("maxItems").get<std::size_t>()) {
            errors.push_back(where + ": allows at most " + schema.at("maxItems").dump() + " items");
        }
        if (schema.contains("items")) {
            for (std::size_t i = 0; i < v.size(); ++i) {
                check(schema.at("items"), v[i], path + "/" + std::to_string(i), errors);
            }
        }
    }
    if (v.is_object()) {
        if (schema.contains("required")) {
            std::vector<std::string> missing;
            for (const auto& r : schema.at("required")) {
                if (!v.contains(r.get<std::string>())) {
                    missing.push_back(r.get<std::string>());
                }
            }
            if (!missing.empty()) {
                std::string list;
                for (const auto& m : missing) {
                    list += (list.empty() ? "" : ", ") + m;
                }
                errors.push_back(where + ": missing required field(s): " + list);
            }
        }
        const json props = schema.value("properties", json::object());
        const bool closed = schema.contains("additionalProperties") && schema.at("additionalProperties") == false;
        for (const auto& [key, value] : v.items()) {
            if (props.contains(key)) {
                check(props.at(key), value, path + "/" + key, errors);
            } else if (closed) {
                errors.push_back(path + "/" + key + ": unknown field");
            }
        }
    }
}

}  // namespace

std::vector<std::string> validate(const json& schema, const json& doc)
{
    std::vector<std::string> errors;
    check(schema, doc, "", errors);
    return errors;
}

}  // namespace sglab
