#include <gtest/gtest.h>

#include "misuseforge/error.hpp"
#include "misuseforge/frontend.hpp"
#include "test_support.hpp"

using namespace misuseforge;

namespace {

const char* kExampleInsecure =
    "SecretKey key = new SecretKeySpec(StringLiterals.CONSTANT.getBytes(), \"AES\");\n";

const char* kExampleSecure =
    "SecureRandom random = new SecureRandom();\n"
    "String defaultKey = String.valueOf(random.nextInt());\n"
    "byte[] keyBytes = defaultKey.getBytes();\n"
    "keyBytes = Arrays.copyOf(keyBytes,24);\n"
    "SecretKey key = new SecretKeySpec(keyBytes, \"AES\");\n";

ErrorKind kind_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& err) {
        return err.kind();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorKind::Io;
}

}  // namespace

TEST(ParseUnit, MinimalClass)
{
    auto unit = parse_unit("class A { void m() {} }", "a.mj");
    ASSERT_EQ(unit.classes.size(), 1u);
    ASSERT_EQ(unit.classes[0].methods.size(), 1u);
    EXPECT_TRUE(unit.classes[0].methods[0].body.empty());
    EXPECT_EQ(unit.classes[0].methods[0].return_type, "void");
}

TEST(ParseUnit, WrappedSecretKeySnippet)
{
    auto unit = parse_unit(std::string("class A { void m() { ") + kExampleInsecure + " } }", "a.mj");
    const auto& method = unit.classes.at(0).methods.at(0);
    ASSERT_EQ(method.body.size(), 1u);
    const auto& decl = *method.body[0];
    EXPECT_EQ(decl.kind, NodeKind::LocalDecl);
    const auto& init = *decl.children.at(2);
    EXPECT_EQ(init.kind, NodeKind::ObjectCreation);
    EXPECT_EQ(call_args(init).size(), 2u);
}

TEST(ParseUnit, MalformedInitializerIsSyntaxError)
{
    EXPECT_EQ(kind_of([] { (void)parse_unit("class A { void m() { int x = ; } }", "a.mj"); }), ErrorKind::Syntax);
}

TEST(ParseUnit, SyntaxErrorCarriesPosition)
{
    try {
        (void)parse_unit("class A {\n  void m() {\n    int x = ;\n  }\n}", "a.mj");
        FAIL();
    } catch (const Error& err) {
        EXPECT_EQ(err.line(), 3);
        EXPECT_EQ(err.column(), 13);
    }
}

TEST(ParseUnit, OutOfSubsetConstructs)
{
    const char* sources[] = {
        "class A { void m() { for (x) {} } }",
        "class A { void m() throws Exception {} }",
        "class A { void m() { int x = a + b; } }",
        "class A { void m() { x = args[0]; } }",
        "class A { List<String> xs; }",
        "interface A {}",
        "class A { @Deprecated void m() {} }",
        "class A { void m() { char c = 'x'; } }",
    };
    for (const auto* src : sources) {
        EXPECT_EQ(kind_of([&] { (void)parse_unit(src, "a.mj"); }), ErrorKind::UnsupportedConstruct) << src;
    }
}

TEST(ParseUnit, ClassHeaderAndMembers)
{
    auto unit = parse_unit(
        "public class V extends Base implements HostnameVerifier, Other {\n"
        "  private String alg = \"AES\";\n"
        "  public V(String a) { this.alg = a; }\n"
        "  @Override\n"
        "  public boolean verify(String h, SSLSession s) { return h == null; }\n"
        "}\n",
        "v.mj");
    const auto& cls = unit.classes.at(0);
    EXPECT_EQ(cls.super_types, (std::vector<std::string>{"Base", "HostnameVerifier", "Other"}));
    ASSERT_EQ(cls.fields.size(), 1u);
    EXPECT_EQ(cls.fields[0].span.line, 2);
    ASSERT_EQ(cls.methods.size(), 2u);
    EXPECT_TRUE(cls.methods[0].is_constructor);
    EXPECT_TRUE(cls.methods[1].is_override);
    EXPECT_EQ(cls.methods[1].span.line, 5);
    EXPECT_EQ(pretty_print(*cls.methods[1].body[0]), "return h == null;");
}

TEST(ParseUnit, DuplicateParameterIsRejected)
{
    EXPECT_EQ(kind_of([] { (void)parse_unit("class A { void m(int a, int a) {} }", "a.mj"); }), ErrorKind::Syntax);
}

TEST(ParseSnippet, SecureKeySnippetHasFiveStatements)
{
    auto snippet = parse_snippet(kExampleSecure);
    EXPECT_EQ(snippet.method.name, "__snippet");
    EXPECT_TRUE(snippet.method.params.empty());
    EXPECT_EQ(snippet.method.body.size(), 5u);
    EXPECT_EQ(snippet.method.body[3]->kind, NodeKind::Assign);
}

TEST(ParseSnippet, EmptySnippet)
{
    auto snippet = parse_snippet("");
    EXPECT_EQ(snippet.method.name, "__snippet");
    EXPECT_TRUE(snippet.method.body.empty());
}

TEST(ParseSnippet, OverrideClassReturnsVerify)
{
    auto snippet = parse_snippet(test_support::read_corpus("pairs/hostname_verifier/insecure.mj"));
    EXPECT_EQ(snippet.method.name, "verify");
    EXPECT_TRUE(snippet.method.is_override);
    EXPECT_TRUE(snippet.has_class);
    EXPECT_EQ(snippet.super_types, std::vector<std::string>{"HostnameVerifier"});
}

TEST(ParseSnippet, BareMethod)
{
    auto snippet = parse_snippet("void test(int iterations){ byte[] salt = new byte[4]; }");
    EXPECT_EQ(snippet.method.name, "test");
    ASSERT_EQ(snippet.method.params.size(), 1u);
    EXPECT_EQ(snippet.method.params[0].name, "iterations");
}

TEST(ParseSnippet, TwoMethodsAreAmbiguous)
{
    EXPECT_EQ(kind_of([] { (void)parse_snippet("class A { void a() {} void b() {} }"); }),
              ErrorKind::AmbiguousSnippet);
}

TEST(ParseSnippet, CommentsAttachToFollowingStatement)
{
    auto snippet = parse_snippet("// keep me\nfoo();\n/* and me */ bar();");
    ASSERT_EQ(snippet.method.body.size(), 2u);
    EXPECT_EQ(snippet.method.body[0]->comments, std::vector<std::string>{"// keep me"});
    EXPECT_EQ(snippet.method.body[1]->comments, std::vector<std::string>{"/* and me */"});
    EXPECT_EQ(format_statements(snippet.method.body), "// keep me\nfoo();\n/* and me */\nbar();");
}

TEST(ParseUnit, CommentsAreDiscarded)
{
    auto unit = parse_unit("class A { void m() { // gone\n foo(); } }", "a.mj");
    EXPECT_TRUE(unit.classes[0].methods[0].body[0]->comments.empty());
}

TEST(PrettyPrint, CanonicalSpacing)
{
    auto snippet = parse_snippet(kExampleSecure);
    EXPECT_EQ(pretty_print(*snippet.method.body[3]), "keyBytes = Arrays.copyOf(keyBytes, 24);");
    EXPECT_EQ(pretty_print(*parse_statement("x = (byte[])  args.get( 0 ) ;")), "x = (byte[]) args.get(0);");
    EXPECT_EQ(pretty_print(*parse_statement("if(a!=null){return;}else{foo();}")),
              "if (a != null) { return; } else { foo(); }");
    EXPECT_EQ(pretty_print(*parse_expression("((Foo) x).bar()")), "((Foo) x).bar()");
}

TEST(PrettyPrint, WhitespaceInsensitive)
{
    auto a = parse_statement("byte[] keyBytes = defaultKey.getBytes();");
    auto b = parse_statement("byte [ ]   keyBytes=\n defaultKey . getBytes ( ) ;");
    EXPECT_EQ(pretty_print(*a), pretty_print(*b));
}

TEST(PrettyPrint, DeterministicOnRepeat)
{
    const char* src = "void test(int iterations){ byte[] salt = new byte[4];\n"
                      "AlgorithmParameterSpec paramSpec = new PBEParameterSpec(salt, iterations); }";
    auto first = pretty_print(*parse_snippet(src).method.body[1]);
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(pretty_print(*parse_snippet(src).method.body[1]), first);
    }
    EXPECT_EQ(first, "AlgorithmParameterSpec paramSpec = new PBEParameterSpec(salt, iterations);");
}

TEST(PrettyPrint, OverrideSnippetRoundTrip)
{
    auto snippet = parse_snippet(test_support::read_corpus("pairs/hostname_verifier/secure.mj"));
    for (const auto& stmt : snippet.method.body) {
        auto again = parse_snippet(pretty_print(*stmt));
        ASSERT_EQ(again.method.body.size(), 1u);
        EXPECT_TRUE(structurally_equal(*stmt, *again.method.body[0])) << pretty_print(*stmt);
    }
}

TEST(NormalizeMatching, SecretKeyStatement)
{
    auto form = normalize_matching(*parse_statement("SecretKey key = new SecretKeySpec(keyBytes, \"AES\");"));
    EXPECT_EQ(form.text, "SecretKey $v_0 = new SecretKeySpec($v_1, $c_0);");
    EXPECT_EQ(form.var_map, (NameMap{{"key", "$v_0"}, {"keyBytes", "$v_1"}}));
    EXPECT_EQ(form.const_map, (NameMap{{"\"AES\"", "$c_0"}}));
}

TEST(NormalizeMatching, BareReturn)
{
    auto form = normalize_matching(*parse_statement("return;"));
    EXPECT_EQ(form.text, "return;");
    EXPECT_TRUE(form.var_map.empty());
    EXPECT_TRUE(form.const_map.empty());
}

TEST(NormalizeMatching, ArraySize)
{
    EXPECT_EQ(normalize_matching(*parse_statement("byte[] salt = new byte[4];")).text, "byte[] $v_0 = new byte[$c_0];");
}

TEST(NormalizeMatching, ClassReceiversAndSharedConstCounter)
{
    auto form = normalize_matching(*parse_statement("x = Cipher.getInstance(\"AES\", 4, \"AES\", y.z);"));
    EXPECT_EQ(form.text, "$v_0 = Cipher.getInstance($c_0, $c_1, $c_0, $v_1.z);");
}

TEST(NormalizeMatching, ThisFieldSharesName)
{
    auto form = normalize_matching(*parse_statement("this.passPhrase = passPhrase.toCharArray();"));
    EXPECT_EQ(form.text, "$v_0 = $v_0.toCharArray();");
}

TEST(NormalizeMatching, EdlPlaceholdersCollapse)
{
    auto form = normalize_matching(*parse_statement(kExampleInsecure));
    EXPECT_EQ(form.text, "SecretKey $v_0 = new SecretKeySpec($c_0, $c_1);");
    EXPECT_EQ(form.const_map.at(0).first, "StringLiterals.CONSTANT.getBytes()");
}

TEST(NormalizeMatching, Idempotent)
{
    for (const char* src : {"SecretKey key = new SecretKeySpec(keyBytes, \"AES\");", "byte[] salt = new byte[4];",
                            "if (a == \"x\") { b.c(a, 3); }", "Cipher.getInstance(lit.getAString());"}) {
        auto once = normalize_matching(*parse_statement(src));
        auto twice = normalize_matching(*parse_statement(once.text));
        EXPECT_EQ(once.text, twice.text) << src;
    }
}

TEST(NormalizeTemplate, SecretKeyTemplate)
{
    auto form = normalize_template(parse_snippet(kExampleInsecure).method.body, {});
    EXPECT_EQ(form.text, "SecretKey $v_0 = new SecretKeySpec(StringLiterals.CONSTANT.getBytes(), \"AES\");");
    EXPECT_EQ(form.var_map, (NameMap{{"key", "$v_0"}}));
}

TEST(NormalizeTemplate, SecretKeyFixWithSeed)
{
    auto form = normalize_template(parse_snippet(kExampleSecure).method.body, {{"key", "$v_0"}});
    EXPECT_EQ(form.text,
              "SecureRandom $v_1 = new SecureRandom();\n"
              "String $v_2 = String.valueOf($v_1.nextInt());\n"
              "byte[] $v_3 = $v_2.getBytes();\n"
              "$v_3 = Arrays.copyOf($v_3, 24);\n"
              "SecretKey $v_0 = new SecretKeySpec($v_3, \"AES\");");
}

TEST(NormalizeTemplate, NoVariables)
{
    auto form = normalize_template({parse_statement("Cipher.getInstance(\"DES\");")}, {{"k", "$v_0"}});
    EXPECT_EQ(form.text, "Cipher.getInstance(\"DES\");");
    EXPECT_EQ(form.var_map.size(), 1u);
}

TEST(Spans, LinesAndColumns)
{
    auto unit = parse_unit("class A {\n  void m() {\n    foo(1);\n  }\n}", "a.mj");
    const auto& stmt = *unit.classes[0].methods[0].body[0];
    EXPECT_EQ(stmt.span.line, 3);
    EXPECT_EQ(stmt.span.column, 5);
    EXPECT_EQ(unit.raw_text.substr(stmt.span.begin, stmt.span.end - stmt.span.begin), "foo(1);");
}
