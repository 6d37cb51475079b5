#include "misuseforge/pattern.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "misuseforge/error.hpp"

namespace misuseforge {

namespace {

using json = nlohmann::ordered_json;

constexpr int kPatternVersion = 1;

template <typename Enum, std::size_t N>
Enum parse_enum(const json& value, const std::pair<Enum, const char*> (&table)[N], const std::string& where)
{
    if (value.is_string()) {
        for (const auto& [e, name] : table) {
            if (value.get<std::string>() == name) {
                return e;
            }
        }
    }
    throw Error(ErrorKind::Schema, "invalid value for '" + where + "': " + value.dump());
}

const std::pair<ApiForm, const char*> kForms[] = {
    {ApiForm::Invocation, "invocation"}, {ApiForm::Override, "override"}, {ApiForm::DeletedCall, "deletedCall"}};
const std::pair<EdlKind, const char*> kEdlKinds[] = {{EdlKind::ConstantPlaceholder, "constantPlaceholder"},
                                                     {EdlKind::OptionSet, "optionSet"},
                                                     {EdlKind::ValueRange, "valueRange"}};
const std::pair<RangeDimension, const char*> kDimensions[] = {{RangeDimension::ArgValue, "argValue"},
                                                              {RangeDimension::ArrayLength, "arrayLength"}};
const std::pair<FixMode, const char*> kFixModes[] = {{FixMode::ExpressionReplacement, "expressionReplacement"},
                                                     {FixMode::SnippetReplacement, "snippetReplacement"},
                                                     {FixMode::None, "none"}};

// Strict object reader: every field must be consumed, unknown ones are reported by name.
class Fields {
public:
    Fields(const json& obj, std::string where) : m_obj(obj), m_where(std::move(where))
    {
        if (!obj.is_object()) {
            throw Error(ErrorKind::Schema, m_where + " must be an object");
        }
        for (const auto& [key, _] : obj.items()) {
            m_unused.insert(key);
        }
    }

    const json& get(const std::string& key)
    {
        if (!m_obj.contains(key)) {
            throw Error(ErrorKind::Schema, m_where + " is missing field '" + key + "'");
        }
        m_unused.erase(key);
        return m_obj.at(key);
    }

    const json* optional(const std::string& key)
    {
        if (!m_obj.contains(key)) {
            return nullptr;
        }
        m_unused.erase(key);
        return &m_obj.at(key);
    }

    std::string string(const std::string& key)
    {
        const auto& v = get(key);
        if (!v.is_string()) {
            throw Error(ErrorKind::Schema, m_where + " field '" + key + "' must be a string");
        }
        return v.get<std::string>();
    }

    long long integer(const std::string& key)
    {
        const auto& v = get(key);
        if (!v.is_number_integer()) {
            throw Error(ErrorKind::Schema, m_where + " field '" + key + "' must be an integer");
        }
        return v.get<long long>();
    }

    int index(const std::string& key)
    {
        const auto& v = get(key);
        if (v.is_null()) {
            return -1;
        }
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw Error(ErrorKind::Schema, m_where + " field '" + key + "' must be a non-negative integer or null");
        }
        return v.get<int>();
    }

    std::vector<std::string> strings(const std::string& key)
    {
        const auto& v = get(key);
        std::vector<std::string> out;
        if (!v.is_array()) {
            throw Error(ErrorKind::Schema, m_where + " field '" + key + "' must be an array");
        }
        for (const auto& s : v) {
            if (!s.is_string()) {
                throw Error(ErrorKind::Schema, m_where + " field '" + key + "' must hold strings");
            }
            out.push_back(s.get<std::string>());
        }
        return out;
    }

    void finish() const
    {
        if (!m_unused.empty()) {
            throw Error(ErrorKind::Schema, m_where + " has unknown field '" + *m_unused.begin() + "'");
        }
    }

    const std::string& where() const { return m_where; }

private:
    const json& m_obj;
    std::string m_where;
    std::set<std::string> m_unused;
};

json index_json(int index)
{
    return index < 0 ? json(nullptr) : json(index);
}

json edl_to_json(const EdlDirective& d)
{
    json out;
    out["kind"] = edl_kind_name(d.kind);
    switch (d.kind) {
        case EdlKind::ConstantPlaceholder:
            out["literalType"] = d.literal_type;
            break;
        case EdlKind::OptionSet:
            out["insecure"] = d.insecure;
            out["secure"] = d.secure;
            break;
        case EdlKind::ValueRange:
            out["min"] = d.min;
            out["dimension"] = dimension_name(d.dimension);
            break;
    }
    out["argIndex"] = index_json(d.arg_index);
    return out;
}

EdlDirective edl_from_json(const json& j, const std::string& where)
{
    Fields f(j, where);
    EdlDirective d;
    d.kind = parse_enum(f.get("kind"), kEdlKinds, where + ".kind");
    switch (d.kind) {
        case EdlKind::ConstantPlaceholder:
            d.literal_type = f.string("literalType");
            if (d.literal_type != "string" && d.literal_type != "int") {
                throw Error(ErrorKind::Schema, where + " field 'literalType' must be \"string\" or \"int\"");
            }
            break;
        case EdlKind::OptionSet:
            d.insecure = f.strings("insecure");
            d.secure = f.strings("secure");
            break;
        case EdlKind::ValueRange:
            d.min = f.integer("min");
            d.dimension = parse_enum(f.get("dimension"), kDimensions, where + ".dimension");
            break;
    }
    d.arg_index = f.index("argIndex");
    f.finish();
    return d;
}

json pattern_to_json(const Pattern& p)
{
    json out;
    out["id"] = p.id;
    out["criticalApi"] = {{"binding", p.critical.binding},
                          {"form", api_form_name(p.critical.form)},
                          {"argIndex", index_json(p.critical.arg_index)}};
    out["anchors"] = p.anchors;
    json edges = json::array();
    for (const auto& e : p.dataflow) {
        edges.push_back({{"source", e.source}, {"argIndex", e.arg_index}});
    }
    out["template"] = {{"text", p.template_text}, {"dataflow", edges}, {"critical", p.template_critical}};
    json fix = {{"text", p.fix_text}, {"mode", fix_mode_name(p.fix_mode)}};
    if (p.fix_mode == FixMode::ExpressionReplacement) {
        fix["old"] = p.fix_old;
        fix["new"] = p.fix_new;
    }
    out["fix"] = fix;
    json var_map = json::object();
    for (const auto& [from, to] : p.var_map) {
        var_map[from] = to;
    }
    out["varMap"] = var_map;
    json edl = json::array();
    for (const auto& d : p.edl) {
        edl.push_back(edl_to_json(d));
    }
    out["edl"] = edl;
    return out;
}

Pattern pattern_from_json(const json& j, const std::string& where)
{
    Fields f(j, where);
    Pattern p;
    p.id = f.string("id");
    {
        Fields c(f.get("criticalApi"), where + ".criticalApi");
        p.critical.binding = c.string("binding");
        p.critical.form = parse_enum(c.get("form"), kForms, c.where() + ".form");
        p.critical.arg_index = c.index("argIndex");
        c.finish();
    }
    p.anchors = f.strings("anchors");
    {
        Fields t(f.get("template"), where + ".template");
        p.template_text = t.string("text");
        const auto& edges = t.get("dataflow");
        if (!edges.is_array()) {
            throw Error(ErrorKind::Schema, t.where() + " field 'dataflow' must be an array");
        }
        for (std::size_t i = 0; i < edges.size(); ++i) {
            Fields e(edges[i], t.where() + ".dataflow[" + std::to_string(i) + "]");
            DataflowEdge edge;
            edge.source = e.string("source");
            edge.arg_index = e.index("argIndex");
            e.finish();
            p.dataflow.push_back(edge);
        }
        p.template_critical = static_cast<int>(t.integer("critical"));
        t.finish();
    }
    {
        Fields x(f.get("fix"), where + ".fix");
        p.fix_text = x.string("text");
        p.fix_mode = parse_enum(x.get("mode"), kFixModes, x.where() + ".mode");
        if (p.fix_mode == FixMode::ExpressionReplacement) {
            p.fix_old = x.string("old");
            p.fix_new = x.string("new");
        }
        x.finish();
    }
    const auto& var_map = f.get("varMap");
    if (!var_map.is_object()) {
        throw Error(ErrorKind::Schema, where + " field 'varMap' must be an object");
    }
    for (const auto& [from, to] : var_map.items()) {
        if (!to.is_string()) {
            throw Error(ErrorKind::Schema, where + ".varMap values must be strings");
        }
        p.var_map.emplace_back(from, to.get<std::string>());
    }
    const auto& edl = f.get("edl");
    if (!edl.is_array()) {
        throw Error(ErrorKind::Schema, where + " field 'edl' must be an array");
    }
    for (std::size_t i = 0; i < edl.size(); ++i) {
        p.edl.push_back(edl_from_json(edl[i], where + ".edl[" + std::to_string(i) + "]"));
    }
    f.finish();
    return p;
}

std::string edl_signature(const Pattern& p)
{
    std::string out;
    for (const auto& d : p.edl) {
        out += std::string(edl_kind_name(d.kind)) + "@" + std::to_string(d.arg_index);
        if (d.kind == EdlKind::ValueRange) {
            out += "/" + std::string(dimension_name(d.dimension));
        }
        out += ";";
    }
    return out;
}

bool iequals(const std::string& a, const std::string& b)
{
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

void union_into(std::vector<std::string>& into, const std::vector<std::string>& from)
{
    for (const auto& item : from) {
        if (std::none_of(into.begin(), into.end(), [&](const std::string& s) { return iequals(s, item); })) {
            into.push_back(item);
        }
    }
}

}  // namespace

const char* api_form_name(ApiForm form) noexcept
{
    for (const auto& [e, name] : kForms) {
        if (e == form) {
            return name;
        }
    }
    return "?";
}

const char* edl_kind_name(EdlKind kind) noexcept
{
    for (const auto& [e, name] : kEdlKinds) {
        if (e == kind) {
            return name;
        }
    }
    return "?";
}

const char* dimension_name(RangeDimension dim) noexcept
{
    for (const auto& [e, name] : kDimensions) {
        if (e == dim) {
            return name;
        }
    }
    return "?";
}

const char* fix_mode_name(FixMode mode) noexcept
{
    for (const auto& [e, name] : kFixModes) {
        if (e == mode) {
            return name;
        }
    }
    return "?";
}

std::uint64_t fnv1a64(std::string_view data)
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string compute_pattern_id(const Pattern& pattern)
{
    std::string material = pattern.critical.binding;
    material += '\x1f';
    material += api_form_name(pattern.critical.form);
    material += '\x1f';
    material += pattern.template_text;
    material += '\x1f';
    material += pattern.fix_text;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(material)));
    return buf;
}

std::string patterns_to_json(const std::vector<Pattern>& patterns)
{
    json doc;
    doc["version"] = kPatternVersion;
    doc["patterns"] = json::array();
    for (const auto& p : patterns) {
        doc["patterns"].push_back(pattern_to_json(p));
    }
    return doc.dump(2) + "\n";
}

std::vector<Pattern> patterns_from_json(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Schema, std::string("patterns file is not valid JSON: ") + e.what());
    }
    Fields f(doc, "patterns file");
    const auto& version = f.get("version");
    if (!version.is_number_integer()) {
        throw Error(ErrorKind::Schema, "patterns file field 'version' must be an integer");
    }
    if (version.get<long long>() != kPatternVersion) {
        throw Error(ErrorKind::VersionMismatch, "patterns file has version " + version.dump() + ", expected " +
                                                    std::to_string(kPatternVersion));
    }
    const auto& list = f.get("patterns");
    if (!list.is_array()) {
        throw Error(ErrorKind::Schema, "patterns file field 'patterns' must be an array");
    }
    f.finish();
    std::vector<Pattern> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        out.push_back(pattern_from_json(list[i], "patterns[" + std::to_string(i) + "]"));
    }
    return out;
}

void save_patterns(const std::vector<Pattern>& patterns, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write " + path.string());
    }
    out << patterns_to_json(patterns);
    if (!out) {
        throw Error(ErrorKind::Io, "failed writing " + path.string());
    }
}

std::vector<Pattern> load_patterns(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot read " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return patterns_from_json(buffer.str());
}

std::vector<Pattern> merge_patterns(const std::vector<Pattern>& patterns)
{
    std::map<std::tuple<std::string, int, std::string>, std::vector<const Pattern*>> groups;
    for (const auto& p : patterns) {
        groups[{p.critical.binding, static_cast<int>(p.critical.form), edl_signature(p)}].push_back(&p);
    }
    std::vector<Pattern> out;
    for (auto& [key, members] : groups) {
        // equal ids can still differ in the example's variable names
        std::sort(members.begin(), members.end(), [](const Pattern* a, const Pattern* b) {
            return std::tie(a->id, a->var_map) < std::tie(b->id, b->var_map);
        });
        Pattern merged = *members.front();
        for (std::size_t i = 1; i < members.size(); ++i) {
            const Pattern& other = *members[i];
            if (other.id == merged.id) {
                continue;
            }
            if (other.dataflow != merged.dataflow) {
                throw Error(ErrorKind::ConflictingPatterns,
                            "patterns " + merged.id + " and " + other.id + " share " + merged.critical.binding +
                                " but have different template dataflow");
            }
            for (std::size_t d = 0; d < merged.edl.size(); ++d) {
                auto& mine = merged.edl[d];
                const auto& theirs = other.edl[d];
                if (mine.kind == EdlKind::OptionSet) {
                    union_into(mine.insecure, theirs.insecure);
                    union_into(mine.secure, theirs.secure);
                } else if (mine.kind == EdlKind::ValueRange) {
                    mine.min = std::max(mine.min, theirs.min);
                }
            }
        }
        for (const auto& d : merged.edl) {
            if (d.kind != EdlKind::OptionSet) {
                continue;
            }
            for (const auto& s : d.secure) {
                if (std::any_of(d.insecure.begin(), d.insecure.end(), [&](const std::string& i) { return iequals(i, s); })) {
                    throw Error(ErrorKind::ConflictingPatterns,
                                "merged option lists for " + merged.critical.binding + " overlap on " + s);
                }
            }
        }
        out.push_back(std::move(merged));
    }
    std::sort(out.begin(), out.end(), [](const Pattern& a, const Pattern& b) {
        return std::tie(a.critical.binding, a.id) < std::tie(b.critical.binding, b.id);
    });
    return out;
}

}  // namespace misuseforge
