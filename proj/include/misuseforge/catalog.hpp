#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace misuseforge {

struct ApiBinding {
    std::string class_name;  // fully qualified
    std::string method;      // constructors use the simple class name
    std::vector<std::string> params;
    std::string binding;     // e.g. javax.crypto.Cipher.getInstance(String)
    bool overridable = false;
    bool random = false;     // returns or fills random data

    [[nodiscard]] std::string simple_class() const;
    [[nodiscard]] bool is_constructor() const { return method == simple_class(); }
};

class Catalog {
public:
    Catalog() = default;
    explicit Catalog(std::vector<ApiBinding> entries);

    [[nodiscard]] static Catalog load(const std::filesystem::path& path);
    [[nodiscard]] static Catalog parse(std::string_view text);

    [[nodiscard]] const ApiBinding* find(std::string_view simple_class, std::string_view method,
                                         std::size_t arity) const;
    [[nodiscard]] const ApiBinding* by_binding(std::string_view binding) const;
    [[nodiscard]] const std::vector<ApiBinding>& entries() const { return m_entries; }

private:
    std::vector<ApiBinding> m_entries;
};

// Path order: explicit flag, MISUSEFORGE_CATALOG, then the shipped default.
[[nodiscard]] std::filesystem::path resolve_catalog_path(const std::string& flag_value);

}  // namespace misuseforge
