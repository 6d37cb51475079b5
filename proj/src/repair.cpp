#include "misuseforge/repair.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "json.hpp"
#include "misuseforge/error.hpp"

namespace misuseforge {

namespace {

using ordered_json = nlohmann::ordered_json;

const std::regex& abstract_var_regex()
{
    static const std::regex re(R"(\$v_[0-9]+)");
    return re;
}

const EdlDirective* directive_for(const Pattern& pattern, EdlKind kind)
{
    auto it = std::find_if(pattern.edl.begin(), pattern.edl.end(), [&](const EdlDirective& d) { return d.kind == kind; });
    return it == pattern.edl.end() ? nullptr : &*it;
}

const Evidence* evidence_for(const MatchResult& match, const char* constraint)
{
    auto it = std::find_if(match.evidence.begin(), match.evidence.end(),
                           [&](const Evidence& e) { return e.constraint == constraint; });
    return it == match.evidence.end() ? nullptr : &*it;
}

std::string quoted(const std::string& value)
{
    return ordered_json(value).dump();
}

void origin_note(const Evidence& e, std::vector<std::string>& notes)
{
    if (e.trace.size() > 1) {
        notes.push_back("value originates at " + e.trace.back());
    }
}

std::vector<std::string> unbound_vars(const std::string& text)
{
    std::vector<std::string> out;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), abstract_var_regex()); it != std::sregex_iterator();
         ++it) {
        if (std::find(out.begin(), out.end(), it->str()) == out.end()) {
            out.push_back(it->str());
        }
    }
    std::sort(out.begin(), out.end(),
              [](const std::string& a, const std::string& b) { return std::stoi(a.substr(3)) < std::stoi(b.substr(3)); });
    return out;
}

std::vector<std::string> comment_lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        const auto first = line.find_first_not_of(' ');
        if (first != std::string::npos && line.compare(first, 2, "//") == 0) {
            out.push_back(line.substr(first));
        }
    }
    return out;
}

ordered_json evidence_json(const Evidence& e)
{
    ordered_json j;
    j["arg"] = e.arg < 0 ? ordered_json(nullptr) : ordered_json(e.arg);
    j["constraint"] = e.constraint;
    j["origin"] = e.origin;
    j["value"] = e.value;
    j["trace"] = e.trace;
    return j;
}

}  // namespace

std::string substitute_bindings(const std::string& text, const NameMap& bindings)
{
    std::string out;
    std::size_t last = 0;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), abstract_var_regex()); it != std::sregex_iterator();
         ++it) {
        out.append(text, last, static_cast<std::size_t>(it->position()) - last);
        const auto* concrete = lookup(bindings, it->str());
        out += concrete != nullptr ? *concrete : it->str();
        last = static_cast<std::size_t>(it->position() + it->length());
    }
    out.append(text, last, std::string::npos);
    return out;
}

FixSuggestion customize_fix(const Pattern& pattern, const MatchResult& match, std::optional<std::uint64_t> seed)
{
    FixSuggestion fix;
    fix.pattern_id = pattern.id;
    if (pattern.critical.form == ApiForm::DeletedCall || pattern.fix_mode == FixMode::None) {
        fix.mode = FixMode::None;
        fix.old_text = match.site.text;
        fix.notes.push_back("deprecated API use: " + pattern.critical.binding);
        return fix;
    }
    if (const auto* option = directive_for(pattern, EdlKind::OptionSet); option && !option->secure.empty()) {
        if (const auto* e = evidence_for(match, "optionSet")) {
            std::size_t pick = 0;
            if (seed) {
                std::mt19937_64 rng(*seed);
                pick = std::uniform_int_distribution<std::size_t>(0, option->secure.size() - 1)(rng);
            }
            fix.mode = FixMode::ExpressionReplacement;
            fix.old_text = quoted(e->value);
            fix.new_text = quoted(option->secure[pick]);
            origin_note(*e, fix.notes);
            return fix;
        }
    }
    if (const auto* range = directive_for(pattern, EdlKind::ValueRange)) {
        if (const auto* e = evidence_for(match, "valueRange")) {
            fix.mode = FixMode::ExpressionReplacement;
            fix.old_text = e->value;
            fix.new_text = std::to_string(range->min);
            origin_note(*e, fix.notes);
            return fix;
        }
    }
    fix.mode = pattern.fix_mode;
    if (fix.mode == FixMode::ExpressionReplacement) {
        fix.old_text = substitute_bindings(pattern.fix_old, match.bindings);
        fix.new_text = substitute_bindings(pattern.fix_new, match.bindings);
    } else {
        fix.old_text = match.site.text;
        fix.new_text = substitute_bindings(pattern.fix_text, match.bindings);
    }
    for (const auto& comment : comment_lines(fix.new_text)) {
        fix.notes.push_back("comment preserved: " + comment);
    }
    for (const auto& var : unbound_vars(fix.new_text)) {
        fix.notes.push_back("fresh variable " + var + ": introduce a new local");
    }
    return fix;
}

std::string render_report(const std::vector<MatchResult>& results, const std::vector<FixSuggestion>& suggestions,
                          const ReportSummary& summary, ReportFormat format)
{
    if (format == ReportFormat::Json) {
        ordered_json doc;
        doc["version"] = 1;
        if (summary.generated_at) {
            doc["generatedAt"] = *summary.generated_at;
        }
        doc["findings"] = ordered_json::array();
        for (std::size_t i = 0; i < results.size(); ++i) {
            const auto& r = results[i];
            ordered_json f;
            f["patternId"] = r.pattern_id;
            f["binding"] = r.binding;
            f["file"] = r.site.file;
            f["line"] = r.site.line;
            f["form"] = api_form_name(r.site.form);
            f["bindings"] = ordered_json::object();
            for (const auto& [abstract, concrete] : r.bindings) {
                f["bindings"][abstract] = concrete;
            }
            f["evidence"] = ordered_json::array();
            for (const auto& e : r.evidence) {
                f["evidence"].push_back(evidence_json(e));
            }
            f["confidence"] = r.low_confidence ? "low" : "high";
            if (i < suggestions.size()) {
                const auto& s = suggestions[i];
                f["fix"] = {{"mode", fix_mode_name(s.mode)}, {"old", s.old_text}, {"new", s.new_text}, {"notes", s.notes}};
            }
            doc["findings"].push_back(std::move(f));
        }
        doc["summary"] = {{"scannedFiles", summary.scanned_files},
                          {"patternsApplied", summary.patterns_applied},
                          {"findings", results.size()}};
        return doc.dump(2) + "\n";
    }

    std::ostringstream out;
    if (summary.generated_at) {
        out << "generated at " << *summary.generated_at << "\n\n";
    }
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        out << r.site.file << ":" << r.site.line << "  " << r.binding << "  [" << r.pattern_id << "]\n";
        out << "  form: " << api_form_name(r.site.form) << ", confidence: " << (r.low_confidence ? "low" : "high")
            << "\n";
        if (!r.bindings.empty()) {
            out << "  bindings:";
            for (const auto& [abstract, concrete] : r.bindings) {
                out << " " << abstract << " -> " << concrete << ";";
            }
            out << "\n";
        }
        for (const auto& e : r.evidence) {
            out << "  evidence: ";
            if (e.arg >= 0) {
                out << "arg " << e.arg << " ";
            }
            out << e.constraint << " " << e.origin;
            for (std::size_t t = 0; t < e.trace.size(); ++t) {
                out << (t == 0 ? " via " : " <- ") << e.trace[t];
            }
            out << "\n";
        }
        if (i < suggestions.size()) {
            const auto& s = suggestions[i];
            out << "  fix (" << fix_mode_name(s.mode) << "):\n";
            if (s.mode == FixMode::ExpressionReplacement) {
                out << "    replace " << s.old_text << " with " << s.new_text << "\n";
            } else if (s.mode == FixMode::SnippetReplacement) {
                std::istringstream lines(s.new_text);
                for (std::string line; std::getline(lines, line);) {
                    out << "    " << line << "\n";
                }
            }
            for (const auto& note : s.notes) {
                out << "  note: " << note << "\n";
            }
        }
        out << "\n";
    }
    out << results.size() << " finding(s) in " << summary.scanned_files << " file(s), " << summary.patterns_applied
        << " pattern(s) applied\n";
    return out.str();
}

std::vector<Finding> parse_ground_truth(std::string_view text)
{
    std::vector<Finding> out;
    std::istringstream in{std::string(text)};
    int number = 0;
    for (std::string line; std::getline(in, line);) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream fields(line);
        std::string location;
        std::string id;
        std::string extra;
        if (!(fields >> location)) {
            continue;
        }
        const auto colon = location.rfind(':');
        if (!(fields >> id) || (fields >> extra) || colon == std::string::npos || colon == 0) {
            throw Error(ErrorKind::Schema, "ground truth line " + std::to_string(number) + ": expected 'file:line patternId'",
                        number);
        }
        Finding f;
        f.file = location.substr(0, colon);
        f.pattern_id = id;
        try {
            std::size_t used = 0;
            f.line = std::stoi(location.substr(colon + 1), &used);
            if (used != location.size() - colon - 1 || f.line <= 0) {
                throw std::invalid_argument("line");
            }
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::Schema, "ground truth line " + std::to_string(number) + ": bad line number", number);
        }
        out.push_back(std::move(f));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Finding> findings_from_report(std::string_view json_text)
{
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Schema, std::string("report is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("findings") || !doc["findings"].is_array()) {
        throw Error(ErrorKind::Schema, "report has no 'findings' array");
    }
    if (!doc.contains("version") || doc["version"] != 1) {
        throw Error(ErrorKind::VersionMismatch, "unsupported report version");
    }
    std::vector<Finding> out;
    for (const auto& f : doc["findings"]) {
        try {
            out.push_back(Finding{f.at("file").get<std::string>(), f.at("line").get<int>(),
                                  f.at("patternId").get<std::string>()});
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::Schema, std::string("malformed finding: ") + e.what());
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::optional<double> precision(std::size_t correct, std::size_t reports)
{
    if (reports == 0) {
        return 1.0;
    }
    return static_cast<double>(correct) / static_cast<double>(reports);
}

std::optional<double> recall(std::size_t found, std::size_t truths)
{
    if (truths == 0) {
        return std::nullopt;
    }
    return static_cast<double>(found) / static_cast<double>(truths);
}

std::optional<double> fscore(std::optional<double> p, std::optional<double> r)
{
    if (!p || !r || *p + *r <= 0.0) {
        return std::nullopt;
    }
    return 2.0 * *p * *r / (*p + *r);
}

Metrics compute_metrics(std::size_t reports, std::size_t correct, std::size_t truths)
{
    Metrics m;
    m.reports = reports;
    m.correct = correct;
    m.truths = truths;
    m.precision = precision(correct, reports);
    m.recall = recall(std::min(correct, truths), truths);
    m.fscore = fscore(m.precision, m.recall);
    return m;
}

Metrics evaluate(const std::vector<Finding>& reports, const std::vector<Finding>& truths)
{
    const std::set<Finding> truth_set(truths.begin(), truths.end());
    const std::set<Finding> report_set(reports.begin(), reports.end());
    const auto correct = static_cast<std::size_t>(
        std::count_if(report_set.begin(), report_set.end(), [&](const Finding& f) { return truth_set.count(f) > 0; }));
    return compute_metrics(report_set.size(), correct, truth_set.size());
}

std::string format_percent(std::optional<double> ratio)
{
    if (!ratio) {
        return "-";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", *ratio * 100.0);
    return buf;
}

std::string render_metrics(const Metrics& m)
{
    std::ostringstream out;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-8s %-8s %-8s %-7s %-7s %s\n", "reports", "correct", "truths", "P(%)", "R(%)", "F(%)");
    out << buf;
    std::snprintf(buf, sizeof buf, "%-8zu %-8zu %-8zu %-7s %-7s %s\n", m.reports, m.correct, m.truths,
                  format_percent(m.precision).c_str(), format_percent(m.recall).c_str(),
                  format_percent(m.fscore).c_str());
    out << buf;
    return out.str();
}

}  // namespace misuseforge
