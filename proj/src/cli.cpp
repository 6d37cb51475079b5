#include "misuseforge/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "misuseforge/catalog.hpp"
#include "misuseforge/error.hpp"
#include "misuseforge/inference.hpp"
#include "misuseforge/repair.hpp"

namespace misuseforge {

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot read '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text) || !out.flush()) {
        throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
    }
}

void require_file(const std::string& path, const char* what)
{
    if (path.empty()) {
        throw Error(ErrorKind::Io, std::string("missing ") + what + " path");
    }
    if (!fs::is_regular_file(path)) {
        throw Error(ErrorKind::Io, std::string(what) + " '" + path + "' does not exist");
    }
}

Catalog open_catalog(const std::string& flag)
{
    const auto path = resolve_catalog_path(flag);
    require_file(path.string(), "catalog");
    return Catalog::load(path);
}

std::string utc_now()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

int report_error(std::ostream& err, const Error& e)
{
    err << "error: " << e.what() << "\n";
    return kExitError;
}

}  // namespace

int cmd_infer(const InferOptions& options, std::ostream& out, std::ostream& err)
{
    try {
        require_file(options.insecure, "insecure example");
        require_file(options.secure, "secure example");
        if (options.out.empty()) {
            throw Error(ErrorKind::Io, "missing output path");
        }
        const auto catalog = open_catalog(options.catalog);
        Pattern pattern;
        try {
            pattern = infer_pattern(options.insecure, options.secure, catalog);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NoCriticalApi) {
                throw;
            }
            err << "error: " << e.what() << "\n";
            return kExitNoCriticalApi;
        }
        std::vector<Pattern> patterns;
        if (fs::exists(options.out)) {
            patterns = load_patterns(options.out);
        }
        patterns.push_back(pattern);
        if (!options.no_merge) {
            patterns = merge_patterns(patterns);
        }
        save_patterns(patterns, options.out);
        out << pattern.id << " " << pattern.critical.binding << "\n";
        return kExitOk;
    } catch (const Error& e) {
        return report_error(err, e);
    }
}

int cmd_scan(const ScanCommand& options, std::ostream& out, std::ostream& err)
{
    try {
        require_file(options.patterns, "patterns file");
        if (options.target.empty() || !fs::is_directory(options.target)) {
            throw Error(ErrorKind::Io, "target '" + options.target + "' is not a directory");
        }
        if (options.format != "json" && options.format != "text") {
            throw Error(ErrorKind::Schema, "unknown report format '" + options.format + "'");
        }
        if (options.max_depth < 0) {
            throw Error(ErrorKind::Schema, "max depth must not be negative");
        }
        const auto catalog = open_catalog(options.catalog);
        const auto patterns = load_patterns(options.patterns);
        ModelConfig config;
        config.jobs = options.jobs;
        const auto model = ProgramModel::load(options.target, catalog, config);
        const auto graph = CallGraph::build(model);
        ScanOptions scan_options;
        scan_options.max_depth = options.max_depth;
        scan_options.jobs = options.jobs;
        const auto results = scan(model, graph, patterns, scan_options);

        std::vector<FixSuggestion> fixes;
        for (const auto& r : results) {
            const auto it = std::find_if(patterns.begin(), patterns.end(),
                                         [&](const Pattern& p) { return p.id == r.pattern_id; });
            fixes.push_back(customize_fix(*it, r, options.seed));
        }
        ReportSummary summary;
        summary.scanned_files = model.units().size();
        summary.patterns_applied = patterns.size();
        if (options.timestamps) {
            summary.generated_at = utc_now();
        }
        const auto report = render_report(results, fixes, summary,
                                          options.format == "json" ? ReportFormat::Json : ReportFormat::Text);
        if (options.report.empty()) {
            out << report;
        } else {
            write_text(options.report, report);
            out << results.size() << " finding(s) written to " << options.report << "\n";
        }
        return results.empty() ? kExitOk : kExitFindings;
    } catch (const Error& e) {
        return report_error(err, e);
    }
}

int cmd_eval(const EvalOptions& options, std::ostream& out, std::ostream& err)
{
    try {
        require_file(options.report, "report");
        require_file(options.truth, "ground truth");
        const auto reports = findings_from_report(read_text(options.report));
        const auto truths = parse_ground_truth(read_text(options.truth));
        out << render_metrics(evaluate(reports, truths));
        return kExitOk;
    } catch (const Error& e) {
        return report_error(err, e);
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Learn API misuse patterns from example pairs and scan code for them"};
    app.set_version_flag("--version", "misuseforge 1.0.0");
    app.require_subcommand(1);

    InferOptions infer;
    auto* infer_cmd = app.add_subcommand("infer", "infer a pattern from an insecure/secure example pair");
    infer_cmd->add_option("--insecure", infer.insecure, "insecure example")->required();
    infer_cmd->add_option("--secure", infer.secure, "secure example")->required();
    infer_cmd->add_option("--out", infer.out, "patterns file to create or extend")->required();
    infer_cmd->add_option("--catalog", infer.catalog, "API catalog (default: $MISUSEFORGE_CATALOG)");
    infer_cmd->add_flag("--no-merge", infer.no_merge, "append without merging");

    ScanCommand scan_opts;
    std::uint64_t seed = 0;
    auto* scan_cmd = app.add_subcommand("scan", "scan a source tree with learned patterns");
    scan_cmd->add_option("--patterns", scan_opts.patterns, "patterns file")->required();
    scan_cmd->add_option("--target", scan_opts.target, "directory to scan")->required();
    scan_cmd->add_option("--report", scan_opts.report, "report file (default: stdout)");
    scan_cmd->add_option("--format", scan_opts.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    scan_cmd->add_option("--max-depth", scan_opts.max_depth, "slice depth bound")->check(CLI::NonNegativeNumber);
    scan_cmd->add_option("--jobs", scan_opts.jobs, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
    auto* seed_opt = scan_cmd->add_option("--seed", seed, "pick secure options at random with this seed");
    scan_cmd->add_option("--catalog", scan_opts.catalog, "API catalog (default: $MISUSEFORGE_CATALOG)");
    scan_cmd->add_flag("--timestamps", scan_opts.timestamps, "stamp the report with the scan time");

    EvalOptions eval;
    auto* eval_cmd = app.add_subcommand("eval", "compute precision, recall and F-score of a report");
    eval_cmd->add_option("--report", eval.report, "JSON report")->required();
    eval_cmd->add_option("--truth", eval.truth, "ground truth file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    }
    if (infer_cmd->parsed()) {
        return cmd_infer(infer, out, err);
    }
    if (scan_cmd->parsed()) {
        if (seed_opt->count() > 0) {
            scan_opts.seed = seed;
        }
        return cmd_scan(scan_opts, out, err);
    }
    return cmd_eval(eval, out, err);
}

}  // namespace misuseforge
