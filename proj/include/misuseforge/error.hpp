#pragma once

#include <stdexcept>
#include <string>

namespace misuseforge {

enum class ErrorKind {
    Syntax,
    UnsupportedConstruct,
    AmbiguousSnippet,
    Io,
    Schema,
    VersionMismatch,
    NoCriticalApi,
    MalformedEdl,
    ConflictingPatterns,
    DuplicateClass,
    NoSources,
};

[[nodiscard]] const char* error_kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, int line = 0, int column = 0);

    [[nodiscard]] ErrorKind kind() const noexcept { return m_kind; }
    [[nodiscard]] int line() const noexcept { return m_line; }
    [[nodiscard]] int column() const noexcept { return m_column; }

private:
    ErrorKind m_kind;
    int m_line;
    int m_column;
};

}  // namespace misuseforge
