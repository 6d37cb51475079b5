#include <gtest/gtest.h>

#include <functional>
#include <map>
#include <random>

#include "misuseforge/diffing.hpp"
#include "test_support.hpp"

using namespace misuseforge;

namespace {

// Reference distance: memoized recursion over suffixes, independent of the two-row table.
std::size_t oracle_distance(const std::string& a, const std::string& b)
{
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
    std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
        if (i == a.size()) {
            return b.size() - j;
        }
        if (j == b.size()) {
            return a.size() - i;
        }
        auto key = std::make_pair(i, j);
        if (auto it = memo.find(key); it != memo.end()) {
            return it->second;
        }
        std::size_t best;
        if (a[i] == b[j]) {
            best = go(i + 1, j + 1);
        } else {
            best = 1 + std::min({go(i + 1, j), go(i, j + 1), go(i + 1, j + 1)});
        }
        memo[key] = best;
        return best;
    };
    return go(0, 0);
}

std::string random_string(std::mt19937& rng, std::size_t max_len, const std::string& alphabet)
{
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::string out(len(rng), ' ');
    for (auto& c : out) {
        c = alphabet[pick(rng)];
    }
    return out;
}

MethodDecl body_of(const std::string& src)
{
    return parse_snippet(src).method;
}

std::string canonical(const std::vector<NodePtr>& stmts)
{
    std::string out;
    for (const auto& s : stmts) {
        out += pretty_print(*s) + "\n";
    }
    return out;
}

NodePtr substitute(const NodePtr& root, const Node* target, const NodePtr& replacement)
{
    if (root.get() == target) {
        return replacement;
    }
    std::vector<NodePtr> children;
    bool changed = false;
    for (const auto& child : root->children) {
        children.push_back(substitute(child, target, replacement));
        changed = changed || children.back() != child;
    }
    return changed ? with_children(*root, std::move(children)) : root;
}

int count(const EditScript& script, EditKind kind)
{
    return static_cast<int>(std::count_if(script.ops.begin(), script.ops.end(),
                                          [&](const EditOp& op) { return op.kind == kind; }));
}

}  // namespace

TEST(Levenshtein, Examples)
{
    EXPECT_EQ(levenshtein("abc", "abc"), 0u);
    EXPECT_EQ(levenshtein("", "abcd"), 4u);
    EXPECT_EQ(levenshtein("kitten", "sitting"), 3u);
    EXPECT_EQ(oracle_distance("kitten", "sitting"), 3u);
}

TEST(Levenshtein, MatchesOracleOnRandomPairs)
{
    std::mt19937 rng(20240611);
    for (int n = 0; n < 1500; ++n) {
        const auto alphabet = n % 2 == 0 ? std::string("ab") : std::string("abcdefxyz$_ ;()");
        auto a = random_string(rng, 64, alphabet);
        auto b = random_string(rng, 64, alphabet);
        const auto expected = oracle_distance(a, b);
        ASSERT_EQ(levenshtein(a, b), expected) << a << " | " << b;
        const auto score = similarity_score(a, b);
        const auto max_len = std::max(a.size(), b.size());
        if (max_len == 0) {
            EXPECT_EQ(score.value(), 1.0);
        } else {
            EXPECT_EQ(score.value(), 1.0 - static_cast<double>(expected) / static_cast<double>(max_len));
        }
        EXPECT_GE(score.value(), 0.0);
        EXPECT_LE(score.value(), 1.0);
    }
}

TEST(Levenshtein, MetricAxioms)
{
    std::mt19937 rng(7);
    for (int n = 0; n < 1000; ++n) {
        auto a = random_string(rng, 64, "abc");
        auto b = random_string(rng, 64, "abc");
        auto c = random_string(rng, 64, "abc");
        const auto ab = levenshtein(a, b);
        EXPECT_EQ(ab, levenshtein(b, a));
        EXPECT_EQ(levenshtein(a, a), 0u);
        EXPECT_EQ(ab == 0, a == b);
        EXPECT_LE(levenshtein(a, c), ab + levenshtein(b, c));
        EXPECT_EQ(similarity_score(a, a).value(), 1.0);
    }
}

TEST(Similarity, Examples)
{
    auto a = normalize_matching(*parse_statement("byte[] salt = new byte[4];"));
    auto b = normalize_matching(*parse_statement("byte[] salt = new byte[8];"));
    EXPECT_EQ(similarity(a, b), 1.0);
    EXPECT_EQ(similarity_score("aaaaaaaaaa", "bcdefghijk").value(), 0.0);
    auto empty = similarity_score("", "");
    EXPECT_TRUE(empty.degenerate);
    EXPECT_EQ(empty.value(), 1.0);
}

TEST(Similarity, ThresholdIsExact)
{
    // 1 - 2/10 = 0.8 exactly
    EXPECT_TRUE(similarity_score("aaaaaaaaaa", "aaaaaaaabb").meets_threshold());
    EXPECT_FALSE(similarity_score("aaaaaaaaaa", "aaaaaaabbb").meets_threshold());
}

TEST(DiffStatements, SecretKeyPair)
{
    auto script = diff_statements(body_of(test_support::read_corpus("pairs/secretkey_constant/insecure.mj")),
                                  body_of(test_support::read_corpus("pairs/secretkey_constant/secure.mj")));
    EXPECT_EQ(count(script, EditKind::Update), 1);
    EXPECT_EQ(count(script, EditKind::Insert), 4);
    EXPECT_EQ(count(script, EditKind::Delete), 0);
    ASSERT_EQ(script.matches.size(), 1u);
    EXPECT_EQ(script.matches[0].s_index, 4);
    EXPECT_NEAR(script.matches[0].similarity, 1.0 - 3.0 / 47.0, 1e-12);
}

TEST(DiffStatements, IdentityDiff)
{
    auto method = body_of(test_support::read_corpus("pairs/secretkey_constant/secure.mj"));
    auto script = diff_statements(method, method);
    EXPECT_TRUE(script.ops.empty());
    ASSERT_EQ(script.matches.size(), 5u);
    for (const auto& m : script.matches) {
        EXPECT_EQ(m.similarity, 1.0);
        EXPECT_EQ(m.i_index, m.s_index);
    }
}

TEST(DiffStatements, OverrideBody)
{
    auto script = diff_statements(body_of(test_support::read_corpus("pairs/hostname_verifier/insecure.mj")),
                                  body_of(test_support::read_corpus("pairs/hostname_verifier/secure.mj")));
    EXPECT_EQ(count(script, EditKind::Delete), 1);
    EXPECT_EQ(count(script, EditKind::Update), 0);
    EXPECT_EQ(count(script, EditKind::Insert), 3);
    for (const auto& op : script.ops) {
        if (op.kind == EditKind::Delete) {
            EXPECT_EQ(pretty_print(*op.old_node), "return true;");
        }
    }
}

TEST(DiffStatements, MovedStatementIsDeleteAndInsert)
{
    auto script = diff_statements(body_of("a(); b();"), body_of("b(); a();"));
    EXPECT_EQ(count(script, EditKind::Delete), 1);
    EXPECT_EQ(count(script, EditKind::Insert), 1);
    EXPECT_EQ(script.matches.size(), 1u);
}

TEST(DiffStatements, TieBreakPrefersPositionalNeighbour)
{
    auto script = diff_statements(body_of("x = f(1); y = g(2);"), body_of("x = f(3); x = f(3);"));
    ASSERT_FALSE(script.matches.empty());
    EXPECT_EQ(script.matches[0].i_index, 0);
    EXPECT_EQ(script.matches[0].s_index, 0);
}

TEST(RefineUpdate, ConstantArgument)
{
    auto script = diff_statements(body_of(test_support::read_corpus("pairs/secretkey_constant/insecure.mj")),
                                  body_of(test_support::read_corpus("pairs/secretkey_constant/secure.mj")));
    const auto it = std::find_if(script.ops.begin(), script.ops.end(),
                                 [](const EditOp& op) { return op.kind == EditKind::Update; });
    ASSERT_NE(it, script.ops.end());
    auto refined = refine_update(*it);
    ASSERT_EQ(refined.size(), 1u);
    EXPECT_EQ(refined[0].granularity, Granularity::Expression);
    EXPECT_EQ(pretty_print(*refined[0].old_node), "StringLiterals.CONSTANT.getBytes()");
    EXPECT_EQ(pretty_print(*refined[0].new_node), "keyBytes");
}

TEST(RefineUpdate, ArraySizeLiteral)
{
    auto script = diff_statements(body_of(test_support::read_corpus("pairs/pbe_salt_size/insecure.mj")),
                                  body_of(test_support::read_corpus("pairs/pbe_salt_size/secure.mj")));
    ASSERT_EQ(script.ops.size(), 1u);
    auto refined = refine_update(script.ops[0]);
    ASSERT_EQ(refined.size(), 1u);
    EXPECT_EQ(refined[0].old_node->kind, NodeKind::IntLit);
    EXPECT_EQ(refined[0].old_node->text, "4");
    EXPECT_EQ(refined[0].new_node->text, "8");
}

TEST(RefineUpdate, IdenticalAndRootMismatch)
{
    EditOp same;
    same.old_node = parse_statement("a(1);");
    same.new_node = parse_statement("a(1);");
    EXPECT_TRUE(refine_update(same).empty());

    EditOp root;
    root.old_node = parse_statement("x = a(1);");
    root.new_node = parse_statement("int x = a(1);");
    auto kept = refine_update(root);
    ASSERT_EQ(kept.size(), 1u);
    EXPECT_EQ(kept[0].granularity, Granularity::Statement);
}

TEST(RefineUpdate, OptionListKeepsWholeCreation)
{
    auto script = diff_statements(body_of(test_support::read_corpus("pairs/cipher_options/insecure.mj")),
                                  body_of(test_support::read_corpus("pairs/cipher_options/secure.mj")));
    auto refined = refine_script(script);
    ASSERT_EQ(refined.ops.size(), 1u);
    EXPECT_EQ(refined.ops[0].old_node->kind, NodeKind::ObjectCreation);
    EXPECT_EQ(call_args(*refined.ops[0].old_node).size(), 7u);
    EXPECT_EQ(call_args(*refined.ops[0].new_node).size(), 3u);
}

TEST(DiffProperties, SoundnessAndConservativenessOnCorpusPairs)
{
    for (const auto& entry : std::filesystem::directory_iterator(test_support::corpus_path("pairs"))) {
        auto I = body_of(test_support::read_file(entry.path() / "insecure.mj"));
        auto S = body_of(test_support::read_file(entry.path() / "secure.mj"));
        auto script = diff_statements(I, S);
        EXPECT_EQ(canonical(apply_statement_script(I.body, script)), canonical(S.body)) << entry.path();
        for (const auto& m : script.matches) {
            EXPECT_TRUE(m.similarity == 1.0 || m.similarity >= kSimilarityThreshold);
        }
        for (const auto& op : script.ops) {
            if (op.kind != EditKind::Update) {
                continue;
            }
            auto rebuilt = op.old_node;
            for (const auto& r : refine_update(op)) {
                if (r.granularity == Granularity::Statement) {
                    rebuilt = r.new_node;
                } else {
                    rebuilt = substitute(rebuilt, r.old_node.get(), r.new_node);
                }
            }
            EXPECT_TRUE(structurally_equal(*rebuilt, *op.new_node)) << pretty_print(*op.old_node);
        }
    }
}

TEST(DiffProperties, SoundnessOnRandomStatementLists)
{
    const std::vector<std::string> pool = {
        "a();", "b(1);", "int x = f(2);", "x = g(x, \"k\");", "return x;", "Cipher.getInstance(\"DES\");",
        "Cipher.getInstance(\"AES\");", "byte[] s = new byte[4];", "byte[] s = new byte[8];", "if (x == null) { a(); }",
    };
    std::mt19937 rng(99);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::uniform_int_distribution<int> len(0, 7);
    for (int n = 0; n < 400; ++n) {
        std::string i_src, s_src;
        for (int k = len(rng); k > 0; --k) {
            i_src += pool[pick(rng)] + "\n";
        }
        for (int k = len(rng); k > 0; --k) {
            s_src += pool[pick(rng)] + "\n";
        }
        auto I = body_of(i_src);
        auto S = body_of(s_src);
        auto script = diff_statements(I, S);
        ASSERT_EQ(canonical(apply_statement_script(I.body, script)), canonical(S.body)) << i_src << "--\n" << s_src;
        std::vector<int> i_seen(I.body.size()), s_seen(S.body.size());
        for (const auto& m : script.matches) {
            ++i_seen[m.i_index];
            ++s_seen[m.s_index];
        }
        for (const auto& op : script.ops) {
            if (op.kind == EditKind::Delete) {
                ++i_seen[op.i_index];
            }
            if (op.kind == EditKind::Insert) {
                ++s_seen[op.s_index];
            }
        }
        for (int v : i_seen) {
            EXPECT_EQ(v, 1);
        }
        for (int v : s_seen) {
            EXPECT_EQ(v, 1);
        }
    }
}
