#include "misuseforge/catalog.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "misuseforge/error.hpp"

namespace misuseforge {

namespace {

using nlohmann::json;

const json& require(const json& entry, const char* field, std::size_t index)
{
    if (!entry.contains(field)) {
        throw Error(ErrorKind::Schema, "catalog entry " + std::to_string(index) + " is missing field '" + field + "'");
    }
    return entry.at(field);
}

std::string require_string(const json& entry, const char* field, std::size_t index)
{
    const auto& value = require(entry, field, index);
    if (!value.is_string() || value.get<std::string>().empty()) {
        throw Error(ErrorKind::Schema,
                    "catalog entry " + std::to_string(index) + " field '" + field + "' must be a non-empty string");
    }
    return value.get<std::string>();
}

}  // namespace

std::string ApiBinding::simple_class() const
{
    auto dot = class_name.rfind('.');
    return dot == std::string::npos ? class_name : class_name.substr(dot + 1);
}

Catalog::Catalog(std::vector<ApiBinding> entries) : m_entries(std::move(entries))
{
    std::set<std::string> bindings;
    std::set<std::tuple<std::string, std::string, std::size_t>> keys;
    for (std::size_t i = 0; i < m_entries.size(); ++i) {
        const auto& e = m_entries[i];
        if (!bindings.insert(e.binding).second) {
            throw Error(ErrorKind::Schema, "catalog entry " + std::to_string(i) + " repeats binding " + e.binding);
        }
        if (!keys.emplace(e.simple_class(), e.method, e.params.size()).second) {
            throw Error(ErrorKind::Schema, "catalog entry " + std::to_string(i) + " is ambiguous with an earlier entry: " +
                                               e.binding);
        }
    }
}

Catalog Catalog::parse(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Schema, std::string("catalog is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("apis") || !doc.at("apis").is_array()) {
        throw Error(ErrorKind::Schema, "catalog must be an object with an 'apis' array");
    }
    std::vector<ApiBinding> entries;
    const auto& apis = doc.at("apis");
    for (std::size_t i = 0; i < apis.size(); ++i) {
        const auto& entry = apis[i];
        if (!entry.is_object()) {
            throw Error(ErrorKind::Schema, "catalog entry " + std::to_string(i) + " must be an object");
        }
        for (const auto& [key, _] : entry.items()) {
            static const std::set<std::string> known{"class", "method", "params", "binding", "overridable", "random"};
            if (!known.count(key)) {
                throw Error(ErrorKind::Schema, "catalog entry " + std::to_string(i) + " has unknown field '" + key + "'");
            }
        }
        ApiBinding api;
        api.class_name = require_string(entry, "class", i);
        api.method = require_string(entry, "method", i);
        api.binding = require_string(entry, "binding", i);
        const auto& params = require(entry, "params", i);
        if (!params.is_array()) {
            throw Error(ErrorKind::Schema, "catalog entry " + std::to_string(i) + " field 'params' must be an array");
        }
        for (const auto& p : params) {
            if (!p.is_string()) {
                throw Error(ErrorKind::Schema, "catalog entry " + std::to_string(i) + " field 'params' must hold strings");
            }
            api.params.push_back(p.get<std::string>());
        }
        const auto& overridable = require(entry, "overridable", i);
        if (!overridable.is_boolean()) {
            throw Error(ErrorKind::Schema, "catalog entry " + std::to_string(i) + " field 'overridable' must be boolean");
        }
        api.overridable = overridable.get<bool>();
        if (entry.contains("random")) {
            if (!entry.at("random").is_boolean()) {
                throw Error(ErrorKind::Schema, "catalog entry " + std::to_string(i) + " field 'random' must be boolean");
            }
            api.random = entry.at("random").get<bool>();
        }
        entries.push_back(std::move(api));
    }
    return Catalog(std::move(entries));
}

Catalog Catalog::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot read catalog " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

const ApiBinding* Catalog::find(std::string_view simple_class, std::string_view method, std::size_t arity) const
{
    for (const auto& e : m_entries) {
        if (e.params.size() == arity && e.method == method && e.simple_class() == simple_class) {
            return &e;
        }
    }
    return nullptr;
}

const ApiBinding* Catalog::by_binding(std::string_view binding) const
{
    for (const auto& e : m_entries) {
        if (e.binding == binding) {
            return &e;
        }
    }
    return nullptr;
}

std::filesystem::path resolve_catalog_path(const std::string& flag_value)
{
    if (!flag_value.empty()) {
        return flag_value;
    }
    if (const char* env = std::getenv("MISUSEFORGE_CATALOG"); env != nullptr && *env != '\0') {
        return env;
    }
    return MISUSEFORGE_DEFAULT_CATALOG;
}

}  // namespace misuseforge
