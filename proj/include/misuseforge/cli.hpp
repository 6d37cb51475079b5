#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "misuseforge/progmodel.hpp"

namespace misuseforge {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNoCriticalApi = 2;
inline constexpr int kExitFindings = 3;

struct InferOptions {
    std::string insecure;
    std::string secure;
    std::string out;
    std::string catalog;
    bool no_merge = false;
};

struct ScanCommand {
    std::string patterns;
    std::string target;
    std::string report;  // empty: stdout
    std::string format = "json";
    std::string catalog;
    int max_depth = kDefaultMaxDepth;
    int jobs = 0;
    std::optional<std::uint64_t> seed;
    bool timestamps = false;
};

struct EvalOptions {
    std::string report;
    std::string truth;
};

int cmd_infer(const InferOptions& options, std::ostream& out, std::ostream& err);
int cmd_scan(const ScanCommand& options, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalOptions& options, std::ostream& out, std::ostream& err);

// Full command line entry point.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace misuseforge
