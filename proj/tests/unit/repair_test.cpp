#include <gtest/gtest.h>

#include <random>
#include <regex>

#include "json.hpp"
#include "misuseforge/error.hpp"
#include "misuseforge/repair.hpp"
#include "test_support.hpp"

using namespace misuseforge;

namespace {

const char* kCustomizedKeyFix =
    "SecureRandom $v_1 = new SecureRandom(); \n"
    "String $v_2 = String.valueOf($v_1.nextInt());\n"
    "byte[] $v_3 = $v_2.getBytes(); \n"
    "$v_3 = Arrays.copyOf($v_3,24);\n"
    "SecretKey secret = new SecretKeySpec($v_3, \"AES\");\n";

std::string squeeze(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            out += c;
        }
    }
    return out;
}

struct Scanned {
    std::vector<Pattern> patterns;
    std::vector<MatchResult> results;
};

Scanned scan_corpus(const std::string& rel, std::vector<Pattern> patterns)
{
    const auto model = ProgramModel::load(test_support::corpus_path(rel), test_support::catalog());
    const auto graph = CallGraph::build(model);
    auto results = scan(model, graph, patterns);
    return Scanned{std::move(patterns), std::move(results)};
}

const Pattern& pattern_of(const Scanned& s, const MatchResult& r)
{
    return *std::find_if(s.patterns.begin(), s.patterns.end(), [&](const Pattern& p) { return p.id == r.pattern_id; });
}

const MatchResult& result_in(const Scanned& s, const std::string& file)
{
    return *std::find_if(s.results.begin(), s.results.end(), [&](const MatchResult& r) { return r.site.file == file; });
}

std::string strip_comments(const std::string& text)
{
    return std::regex_replace(text, std::regex("//[^\n]*"), "");
}

}  // namespace

TEST(CustomizeFix, SecretKeySnippet)
{
    const auto s = scan_corpus("cencryptor", {test_support::infer_pair("secretkey_constant")});
    ASSERT_EQ(s.results.size(), 1u);
    const auto fix = customize_fix(s.patterns[0], s.results[0]);
    EXPECT_EQ(fix.mode, FixMode::SnippetReplacement);
    EXPECT_EQ(squeeze(fix.new_text), squeeze(kCustomizedKeyFix));
    EXPECT_EQ(fix.old_text, "SecretKey secret = new SecretKeySpec(new String(passPhrase).getBytes(), alg);");
    EXPECT_EQ(fix.notes, (std::vector<std::string>{"fresh variable $v_1: introduce a new local",
                                                   "fresh variable $v_2: introduce a new local",
                                                   "fresh variable $v_3: introduce a new local"}));
}

TEST(CustomizeFix, ArrayLengthReplacement)
{
    const auto s = scan_corpus("fixtures", test_support::core_patterns());
    const auto& r = result_in(s, "insecure/r08_pbeparam.mj");
    const auto fix = customize_fix(pattern_of(s, r), r);
    EXPECT_EQ(fix.mode, FixMode::ExpressionReplacement);
    EXPECT_EQ(fix.old_text, "4");
    EXPECT_EQ(fix.new_text, "8");
}

TEST(CustomizeFix, OverrideKeepsComment)
{
    const auto s = scan_corpus("fixtures", test_support::core_patterns());
    const auto& r = result_in(s, "insecure/r02_hostname.mj");
    const auto fix = customize_fix(pattern_of(s, r), r);
    EXPECT_EQ(fix.mode, FixMode::SnippetReplacement);
    EXPECT_NE(fix.new_text.find("    //Please change \"example.com\" as needed\n"), std::string::npos);
    EXPECT_NE(fix.new_text.find("if (\"example.com\".equals(host))"), std::string::npos);
    EXPECT_NE(std::find(fix.notes.begin(), fix.notes.end(),
                        "comment preserved: //Please change \"example.com\" as needed"),
              fix.notes.end());
}

TEST(CustomizeFix, OptionChoice)
{
    const auto s = scan_corpus("fixtures", test_support::core_patterns());
    const auto& r = result_in(s, "insecure/r01_cipher.mj");
    const auto& p = pattern_of(s, r);
    const auto plain = customize_fix(p, r);
    EXPECT_EQ(plain.old_text, "\"DES\"");
    EXPECT_EQ(plain.new_text, "\"" + p.edl[0].secure.front() + "\"");
    EXPECT_EQ(customize_fix(p, r), plain);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto seeded = customize_fix(p, r, seed);
        EXPECT_EQ(seeded.new_text, customize_fix(p, r, seed).new_text);
        const auto value = seeded.new_text.substr(1, seeded.new_text.size() - 2);
        EXPECT_NE(std::find(p.edl[0].secure.begin(), p.edl[0].secure.end(), value), p.edl[0].secure.end());
    }
}

TEST(CustomizeFix, DeletedCallHasNoReplacement)
{
    std::vector<SourceUnit> units;
    units.push_back(parse_unit("class R { int roll() { Random r = new Random(); return r.nextInt(); } }", "r.mj"));
    const auto model = ProgramModel::from_units(std::move(units), test_support::catalog());
    const auto graph = CallGraph::build(model);
    const auto pattern = test_support::infer_pair("random_deleted");
    const auto results = scan(model, graph, {pattern});
    ASSERT_EQ(results.size(), 1u);
    const auto fix = customize_fix(pattern, results[0]);
    EXPECT_EQ(fix.mode, FixMode::None);
    EXPECT_TRUE(fix.new_text.empty());
    ASSERT_EQ(fix.notes.size(), 1u);
    EXPECT_EQ(fix.notes[0].rfind("deprecated API use", 0), 0u);
}

TEST(CustomizeFix, SubstitutionCompleteAndParseable)
{
    const auto s = scan_corpus("fixtures", test_support::core_patterns());
    ASSERT_FALSE(s.results.empty());
    for (const auto& r : s.results) {
        SCOPED_TRACE(r.site.file);
        const auto fix = customize_fix(pattern_of(s, r), r);
        for (const auto& [abstract, concrete] : r.bindings) {
            if (abstract != concrete) {
                EXPECT_EQ(std::regex_search(fix.new_text, std::regex("\\" + abstract + "\\b")), false) << abstract;
            }
        }
        if (fix.mode == FixMode::SnippetReplacement) {
            EXPECT_NO_THROW((void)parse_snippet(strip_comments(fix.new_text)));
        }
    }
}

TEST(Substitute, ExactTokens)
{
    const NameMap b{{"$v_1", "key"}, {"$v_10", "ten"}};
    EXPECT_EQ(substitute_bindings("$v_1 $v_10 $v_100 $v_2", b), "key ten $v_100 $v_2");
}

TEST(Report, JsonSchemaFields)
{
    const auto s = scan_corpus("cencryptor", {test_support::infer_pair("secretkey_constant")});
    std::vector<FixSuggestion> fixes{customize_fix(s.patterns[0], s.results[0])};
    const auto text = render_report(s.results, fixes, {1, 1, std::nullopt}, ReportFormat::Json);
    const auto doc = nlohmann::json::parse(text);
    EXPECT_EQ(doc["version"], 1);
    ASSERT_EQ(doc["findings"].size(), 1u);
    const auto& f = doc["findings"][0];
    for (const char* key : {"patternId", "binding", "file", "line", "form", "bindings", "evidence", "confidence", "fix"}) {
        EXPECT_TRUE(f.contains(key)) << key;
    }
    EXPECT_EQ(f["line"], 8);
    EXPECT_EQ(f["bindings"]["$v_0"], "secret");
    EXPECT_EQ(f["confidence"], "high");
    for (const char* key : {"mode", "old", "new", "notes"}) {
        EXPECT_TRUE(f["fix"].contains(key)) << key;
    }
    EXPECT_EQ(doc["summary"]["findings"], 1);
    EXPECT_FALSE(doc.contains("generatedAt"));
}

TEST(Report, EmptyFindings)
{
    const auto text = render_report({}, {}, {3, 2, std::nullopt}, ReportFormat::Json);
    const auto doc = nlohmann::json::parse(text);
    EXPECT_TRUE(doc["findings"].is_array());
    EXPECT_TRUE(doc["findings"].empty());
    EXPECT_EQ(doc["summary"]["scannedFiles"], 3);
}

TEST(Report, TextFormat)
{
    const auto s = scan_corpus("cencryptor", {test_support::infer_pair("secretkey_constant")});
    std::vector<FixSuggestion> fixes{customize_fix(s.patterns[0], s.results[0])};
    const auto text = render_report(s.results, fixes, {1, 1, std::nullopt}, ReportFormat::Text);
    EXPECT_EQ(text.rfind("CEncryptor.mj:8  javax.crypto.spec.SecretKeySpec.SecretKeySpec(byte[], String)", 0), 0u);
    EXPECT_NE(text.find("$v_0 -> secret"), std::string::npos);
    EXPECT_NE(text.find("SecretKey secret = new SecretKeySpec($v_3, \"AES\");"), std::string::npos);
    EXPECT_NE(text.find("1 finding(s) in 1 file(s)"), std::string::npos);
}

TEST(Report, GoldenCorpusReport)
{
    const auto s = scan_corpus("fixtures", test_support::core_patterns());
    std::vector<FixSuggestion> fixes;
    for (const auto& r : s.results) {
        fixes.push_back(customize_fix(pattern_of(s, r), r));
    }
    const auto text = render_report(s.results, fixes, {26, s.patterns.size(), std::nullopt}, ReportFormat::Json);
    EXPECT_EQ(text, test_support::read_corpus("golden/fixtures_report.json"));
}

TEST(Metrics, ZeroCountConventions)
{
    const auto row = compute_metrics(4, 4, 3);
    EXPECT_EQ(format_percent(row.precision), "100.0");
    const auto empty = compute_metrics(0, 0, 0);
    EXPECT_EQ(format_percent(empty.precision), "100.0");
    EXPECT_EQ(format_percent(empty.recall), "-");
    EXPECT_FALSE(empty.fscore);
}

TEST(Metrics, HarmonicMean)
{
    EXPECT_DOUBLE_EQ(*fscore(1.0, 1.0), 1.0);
    const double f = *fscore(1.0, 0.84);
    EXPECT_NEAR(f, 2 * 0.84 / 1.84, 1e-12);
    EXPECT_EQ(format_percent(f), "91.3");
    EXPECT_FALSE(fscore(0.0, 0.0));
    EXPECT_FALSE(fscore(std::nullopt, 1.0));
}

TEST(Metrics, BoundsOnRandomCounts)
{
    std::mt19937 rng(3);
    std::uniform_int_distribution<std::size_t> dist(0, 40);
    for (int i = 0; i < 2000; ++i) {
        const auto truths = dist(rng);
        const auto reports = dist(rng);
        const auto correct = std::min({reports, truths, dist(rng)});
        const auto m = compute_metrics(reports, correct, truths);
        ASSERT_TRUE(m.precision);
        EXPECT_GE(*m.precision, 0.0);
        EXPECT_LE(*m.precision, 1.0);
        EXPECT_EQ(m.recall.has_value(), truths > 0);
        EXPECT_EQ(m.fscore.has_value(), m.recall && *m.precision + *m.recall > 0);
        if (m.fscore) {
            EXPECT_LE(*m.fscore, std::max(*m.precision, *m.recall) + 1e-12);
            EXPECT_GE(*m.fscore, std::min(*m.precision, *m.recall) - 1e-12);
        }
    }
}

TEST(Metrics, EvaluateWithPlantedFalsePositive)
{
    const std::vector<Finding> truths{{"a.mj", 3, "p1"}, {"b.mj", 4, "p2"}};
    auto reports = truths;
    EXPECT_EQ(format_percent(evaluate(reports, truths).precision), "100.0");
    reports.push_back({"c.mj", 9, "p1"});
    const auto m = evaluate(reports, truths);
    EXPECT_EQ(format_percent(m.precision), "66.7");
    EXPECT_EQ(format_percent(m.recall), "100.0");
    EXPECT_EQ(format_percent(m.fscore), "80.0");
}

TEST(GroundTruth, ParsesLinesAndComments)
{
    const auto truths = parse_ground_truth("# header\n\nsrc/a.mj:12 abc  # trailing\n  b.mj:3 def\n");
    EXPECT_EQ(truths, (std::vector<Finding>{{"b.mj", 3, "def"}, {"src/a.mj", 12, "abc"}}));
}

TEST(GroundTruth, RejectsMalformedLines)
{
    for (const char* bad : {"a.mj abc\n", "a.mj:x abc\n", "a.mj:3\n", "a.mj:3 abc extra\n", "a.mj:0 abc\n"}) {
        try {
            (void)parse_ground_truth(bad);
            ADD_FAILURE() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::Schema);
        }
    }
}

TEST(GroundTruth, ReportRoundTrip)
{
    const auto findings = findings_from_report(test_support::read_corpus("golden/fixtures_report.json"));
    EXPECT_EQ(findings, parse_ground_truth(test_support::read_corpus("truth.txt")));
}
