#include "misuseforge/error.hpp"

namespace misuseforge {

const char* error_kind_name(ErrorKind kind) noexcept
{
    switch (kind) {
        case ErrorKind::Syntax: return "SyntaxError";
        case ErrorKind::UnsupportedConstruct: return "UnsupportedConstruct";
        case ErrorKind::AmbiguousSnippet: return "AmbiguousSnippet";
        case ErrorKind::Io: return "IoError";
        case ErrorKind::Schema: return "SchemaError";
        case ErrorKind::VersionMismatch: return "VersionMismatch";
        case ErrorKind::NoCriticalApi: return "NoCriticalApi";
        case ErrorKind::MalformedEdl: return "MalformedEdl";
        case ErrorKind::ConflictingPatterns: return "ConflictingPatterns";
        case ErrorKind::DuplicateClass: return "DuplicateClass";
        case ErrorKind::NoSources: return "NoSources";
    }
    return "Error";
}

namespace {

std::string decorate(ErrorKind kind, const std::string& message, int line, int column)
{
    std::string out = error_kind_name(kind);
    if (line > 0) {
        out += " at " + std::to_string(line) + ":" + std::to_string(column);
    }
    out += ": " + message;
    return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message, int line, int column)
    : std::runtime_error(decorate(kind, message, line, column)), m_kind(kind), m_line(line), m_column(column)
{
}

}  // namespace misuseforge
