// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "misuseforge/cli.hpp"
#include "misuseforge/diffing.hpp"
#include "misuseforge/error.hpp"
#include "misuseforge/inference.hpp"
#include "misuseforge/matcher.hpp"
#include "misuseforge/repair.hpp"

namespace fs = std::filesystem;
using namespace misuseforge;

namespace {

const fs::path kRoot = MISUSEFORGE_SOURCE_DIR;

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(bool ok, const std::string& what)
{
    if (!ok) {
        throw Failure(what);
    }
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const Catalog& catalog()
{
    static const auto cat = Catalog::load(kRoot / "data" / "catalog.json");
    return cat;
}

Pattern infer(const std::string& pair)
{
    const auto dir = kRoot / "corpus" / "pairs" / pair;
    return infer_pattern(dir / "insecure.mj", dir / "secure.mj", catalog());
}

std::vector<std::string> lines_of(const fs::path& path)
{
    std::vector<std::string> out;
    std::istringstream in(read_text(path));
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line[0] != '#') {
            out.push_back(line);
        }
    }
    return out;
}

std::vector<std::string> all_pairs()
{
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(kRoot / "corpus" / "pairs")) {
        out.push_back(e.path().filename().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string canonical_statements(const std::string& text)
{
    return format_statements(parse_snippet(text).method.body, 0, true);
}

std::string squeeze(const std::string& s)
{
    std::string out;
    std::copy_if(s.begin(), s.end(), std::back_inserter(out), [](char c) { return !std::isspace(static_cast<unsigned char>(c)); });
    return out;
}

struct Scan {
    ProgramModel model;
    CallGraph graph;
    std::vector<MatchResult> results;
};

Scan scan_dir(const fs::path& dir, const std::vector<Pattern>& patterns)
{
    auto model = ProgramModel::load(dir, catalog());
    auto graph = CallGraph::build(model);
    auto results = scan(model, graph, patterns);
    return Scan{std::move(model), std::move(graph), std::move(results)};
}

// Wagner-Fischer over the full (m+1)x(n+1) matrix.
std::size_t reference_distance(const std::string& a, const std::string& b)
{
    std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) {
        d[i][0] = i;
    }
    for (std::size_t j = 0; j <= b.size(); ++j) {
        d[0][j] = j;
    }
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        }
    }
    return d[a.size()][b.size()];
}

int run_cli_quiet(std::vector<std::string> args, std::string* out_text = nullptr)
{
    args.insert(args.begin(), "misuseforge");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text != nullptr) {
        *out_text = out.str();
    }
    return code;
}

fs::path scratch(const std::string& name)
{
    auto dir = fs::temp_directory_path() / ("misuseforge_acceptance_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string print_unit(const SourceUnit& unit)
{
    std::ostringstream out;
    for (const auto& cls : unit.classes) {
        for (const auto& m : cls.modifiers) {
            out << m << " ";
        }
        out << "class " << cls.name;
        for (std::size_t i = 0; i < cls.super_types.size(); ++i) {
            out << (i == 0 ? " implements " : ", ") << cls.super_types[i];
        }
        out << " {\n";
        for (const auto& f : cls.fields) {
            out << "    ";
            for (const auto& m : f.modifiers) {
                out << m << " ";
            }
            out << f.type << " " << f.name;
            if (f.init) {
                out << " = " << pretty_print(*f.init);
            }
            out << ";\n";
        }
        for (const auto& m : cls.methods) {
            out << format_method(m, 1, true) << "\n";
        }
        out << "}\n";
    }
    return out.str();
}

// ---- criteria ----

void criterion_1()
{
    const auto p = infer("secretkey_constant");
    const std::string tmpl = "SecretKey $v_0 = new SecretKeySpec(StringLiterals.CONSTANT.getBytes(), \"AES\");";
    const std::string fix = "SecureRandom $v_1 = new SecureRandom(); \n"
                            "String $v_2 = String.valueOf($v_1.nextInt());\n"
                            "byte[] $v_3 = $v_2.getBytes(); \n"
                            "$v_3 = Arrays.copyOf($v_3, 24);\n"
                            "SecretKey $v_0 = new SecretKeySpec($v_3, \"AES\");";
    check(p.template_text == canonical_statements(tmpl), "template text: " + p.template_text);
    check(p.critical.binding == "javax.crypto.spec.SecretKeySpec.SecretKeySpec(byte[], String)",
          "binding: " + p.critical.binding);
    check(p.anchors.empty(), "anchors not empty");
    check(p.fix_text == canonical_statements(fix), "fix text: " + p.fix_text);
    check(std::count(p.fix_text.begin(), p.fix_text.end(), '\n') == 4, "fix is not 5 lines");
}

void criterion_2()
{
    const auto pattern = infer("secretkey_constant");
    const auto s = scan_dir(kRoot / "corpus" / "cencryptor", {pattern});
    check(s.results.size() == 1, "expected one finding, got " + std::to_string(s.results.size()));
    const auto& r = s.results[0];
    check(r.site.line == 8, "finding line " + std::to_string(r.site.line));
    check(r.bindings == NameMap{{"$v_0", "secret"}}, "bindings differ");
    const std::string expected = "SecureRandom $v_1 = new SecureRandom(); \n"
                                 "String $v_2 = String.valueOf($v_1.nextInt());\n"
                                 "byte[] $v_3 = $v_2.getBytes(); \n"
                                 "$v_3 = Arrays.copyOf($v_3,24);\n"
                                 "SecretKey secret = new SecretKeySpec($v_3, \"AES\");";
    const auto fix = customize_fix(pattern, r);
    check(squeeze(fix.new_text) == squeeze(expected), "customized fix: " + fix.new_text);
    auto traced = [&](const std::string& loc) {
        return std::any_of(r.evidence.begin(), r.evidence.end(), [&](const Evidence& e) {
            return std::find(e.trace.begin(), e.trace.end(), loc) != e.trace.end();
        });
    };
    check(traced("CEncryptor.mj:3"), "field initializer line 3 missing from evidence");
    check(traced("CEncryptor.mj:5"), "constructor assignment line 5 missing from evidence");
    check(traced("CEncryptor.mj:13"), "call-site literal line 13 missing from evidence");
    check(std::any_of(r.evidence.begin(), r.evidence.end(), [](const Evidence& e) { return e.value == "password"; }),
          "literal \"password\" missing from evidence");
}

void criterion_3()
{
    const auto dir = scratch("corpus");
    const auto patterns = dir / "patterns.json";
    const auto cat = (kRoot / "data" / "catalog.json").string();
    for (const auto& pair : lines_of(kRoot / "corpus" / "core_pairs.txt")) {
        const auto base = kRoot / "corpus" / "pairs" / pair;
        check(run_cli_quiet({"infer", "--insecure", (base / "insecure.mj").string(), "--secure",
                             (base / "secure.mj").string(), "--out", patterns.string(), "--catalog", cat}) == kExitOk,
              "infer failed for " + pair);
    }
    const auto report = dir / "report.json";
    check(run_cli_quiet({"scan", "--patterns", patterns.string(), "--target", (kRoot / "corpus" / "fixtures").string(),
                         "--report", report.string(), "--catalog", cat}) == kExitFindings,
          "scan exit code");
    std::string table;
    check(run_cli_quiet({"eval", "--report", report.string(), "--truth",
                         (kRoot / "corpus" / "truth.txt").string()},
                        &table) == kExitOk,
          "eval exit code");
    const auto metrics = evaluate(findings_from_report(read_text(report)),
                                  parse_ground_truth(read_text(kRoot / "corpus" / "truth.txt")));
    check(metrics.truths == 13, "truth count");
    check(format_percent(metrics.precision) == "100.0" && format_percent(metrics.recall) == "100.0" &&
              format_percent(metrics.fscore) == "100.0",
          "metrics: " + table);
    check(table.find("100.0   100.0   100.0") != std::string::npos, "eval table: " + table);
}

void criterion_4()
{
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<int> len(0, 64);
    std::uniform_int_distribution<int> alpha_size(1, 26);
    for (int i = 0; i < 1200; ++i) {
        const int k = alpha_size(rng);
        std::uniform_int_distribution<int> ch(0, k - 1);
        auto gen = [&] {
            std::string s(static_cast<std::size_t>(len(rng)), 'a');
            for (auto& c : s) {
                c = static_cast<char>('a' + ch(rng));
            }
            return s;
        };
        const auto a = gen();
        const auto b = gen();
        const auto c = gen();
        const auto d = reference_distance(a, b);
        check(levenshtein(a, b) == d, "distance mismatch on pair " + std::to_string(i));
        const auto score = similarity_score(a, b);
        const auto maxlen = std::max(a.size(), b.size());
        if (maxlen > 0) {
            check(score.value() == 1.0 - static_cast<double>(d) / static_cast<double>(maxlen),
                  "similarity mismatch on pair " + std::to_string(i));
        }
        check(levenshtein(b, a) == levenshtein(a, b), "symmetry");
        check(levenshtein(a, a) == 0, "identity");
        check((levenshtein(a, b) == 0) == (a == b), "identity of indiscernibles");
        check(levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c), "triangle inequality");
    }
}

void criterion_5()
{
    const auto multi = infer("cipher_options");
    check(multi.edl.size() == 1 && multi.edl[0].kind == EdlKind::OptionSet, "no optionSet");
    check(multi.edl[0].insecure ==
              std::vector<std::string>{"AES", "RC2", "RC4", "RC5", "DES", "blowfish", "DESede"},
          "insecure option list");
    check(multi.edl[0].secure == std::vector<std::string>{"AES/GCM/PKCS5Padding", "RSA", "ECIES"},
          "secure option list");

    const auto range = infer("pbe_salt_size");
    check(range.edl.size() == 1 && range.edl[0].kind == EdlKind::ValueRange && range.edl[0].min == 8 &&
              range.edl[0].dimension == RangeDimension::ArrayLength,
          "valueRange{8, arrayLength}");

    const auto boundary = kRoot / "corpus" / "boundary";
    check(scan_dir(boundary / "salt8", {range}).results.empty(), "byte[8] flagged");
    check(scan_dir(boundary / "salt7", {range}).results.size() == 1, "byte[7] not flagged");
    const auto iterations = infer("pbe_iteration");
    check(scan_dir(boundary / "iter999", {iterations}).results.size() == 1, "999 iterations not flagged");
    check(scan_dir(boundary / "iter1000", {iterations}).results.empty(), "1000 iterations flagged");
}

void criterion_6()
{
    const auto pattern = infer("hostname_verifier");
    const auto base = kRoot / "corpus" / "pairs" / "hostname_verifier";
    const auto insecure = parse_snippet(read_text(base / "insecure.mj"));
    const auto secure = parse_snippet(read_text(base / "secure.mj"));
    check(match_override(insecure.method, pattern).has_value(), "insecure body does not match");
    check(!match_override(secure.method, pattern).has_value(), "secure body matches");

    const auto s = scan_dir(kRoot / "corpus" / "fixtures" / "insecure", {pattern});
    check(s.results.size() == 1, "override fixture findings: " + std::to_string(s.results.size()));
    const auto fix = customize_fix(pattern, s.results[0]);
    check(fix.new_text.find("//Please change \"example.com\" as needed") != std::string::npos,
          "comment not preserved: " + fix.new_text);
}

void criterion_7()
{
    const auto pairs = all_pairs();
    std::vector<std::string> runs;
    std::vector<Pattern> patterns;
    for (int run = 0; run < 3; ++run) {
        patterns.clear();
        for (const auto& p : pairs) {
            patterns.push_back(infer(p));
        }
        runs.push_back(patterns_to_json(patterns));
    }
    check(runs[0] == runs[1] && runs[1] == runs[2], "inferred patterns differ between runs");
    check(patterns_from_json(runs[0]) == patterns, "pattern save/load round trip");
    check(patterns_to_json(patterns_from_json(runs[0])) == runs[0], "pattern JSON not byte-stable");

    const auto merged = patterns_to_json(merge_patterns(patterns));
    const auto dir = scratch("determinism");
    const auto cat = (kRoot / "data" / "catalog.json").string();
    std::vector<Pattern> core;
    for (const auto& pair : lines_of(kRoot / "corpus" / "core_pairs.txt")) {
        core.push_back(infer(pair));
    }
    core = merge_patterns(core);
    std::mt19937 rng(5);
    std::string reference;
    for (int round = 0; round < 3; ++round) {
        auto shuffled = patterns;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        check(patterns_to_json(merge_patterns(shuffled)) == merged, "merge depends on pattern order");

        auto core_shuffled = core;
        std::shuffle(core_shuffled.begin(), core_shuffled.end(), rng);
        const auto file = dir / ("patterns" + std::to_string(round) + ".json");
        save_patterns(core_shuffled, file);
        std::string report;
        run_cli_quiet({"scan", "--patterns", file.string(), "--target", (kRoot / "corpus" / "fixtures").string(),
                       "--catalog", cat, "--jobs", std::to_string(round + 1)},
                      &report);
        if (round == 0) {
            reference = report;
        }
        check(!report.empty() && report == reference, "report differs across runs or permutations");
    }
    check(reference == read_text(kRoot / "corpus" / "golden" / "fixtures_report.json"),
          "report differs from golden file");

    for (const auto& entry : fs::recursive_directory_iterator(kRoot / "corpus")) {
        if (entry.path().extension() != ".mj") {
            continue;
        }
        const auto text = read_text(entry.path());
        const auto name = entry.path().string();
        if (name.find("/pairs/") != std::string::npos) {
            const auto snippet = parse_snippet(text);
            const auto printed = snippet.has_class ? format_method(snippet.method, 0, true)
                                                   : format_statements(snippet.method.body, 0, true);
            const auto again = parse_snippet(printed);
            const auto reprinted = again.has_class || again.method.name != "__snippet"
                                       ? format_method(again.method, 0, true)
                                       : format_statements(again.method.body, 0, true);
            check(printed == reprinted, "print/parse round trip: " + name);
        } else {
            const auto printed = print_unit(parse_unit(text, name));
            check(print_unit(parse_unit(printed, name)) == printed, "print/parse round trip: " + name);
        }
    }
}

void criterion_8()
{
    check(format_percent(compute_metrics(4, 4, 3).precision) == "100.0", "(4, 4) precision");
    const auto empty = compute_metrics(0, 0, 0);
    check(format_percent(empty.precision) == "100.0", "(0, 0) precision");
    check(format_percent(empty.recall) == "-", "(0, 0) recall");
    const auto f = fscore(1.0, 0.84);
    check(f.has_value() && std::abs(*f * 100.0 - 91.0) <= 0.5, "F for P=1, R=0.84");
}

}  // namespace

int main()
{
    const std::vector<std::tuple<int, const char*, std::function<void()>, double>> criteria{
        {1, "worked-example pipeline", criterion_1, 1.0},
        {2, "inter-procedural detection and repair", criterion_2, 1.0},
        {3, "corpus precision/recall", criterion_3, 10.0},
        {4, "similarity oracle equivalence", criterion_4, 0.0},
        {5, "EDL scenarios and boundaries", criterion_5, 0.0},
        {6, "override matching", criterion_6, 0.0},
        {7, "determinism and round trips", criterion_7, 0.0},
        {8, "metric conventions", criterion_8, 0.0},
    };
    int failed = 0;
    for (const auto& [number, title, fn, budget] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = true;
        try {
            fn();
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (ok && budget > 0.0 && seconds >= budget) {
            ok = false;
            detail = "took " + std::to_string(seconds) + " s";
        }
        char timing[32];
        std::snprintf(timing, sizeof timing, "%.3f s", seconds);
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << number << ": " << title << " (" << timing << ")";
        if (!ok) {
            std::cout << " -- " << detail;
            ++failed;
        }
        std::cout << "\n";
    }
    return failed == 0 ? 0 : 1;
}
