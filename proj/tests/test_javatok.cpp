#include <gtest/gtest.h>

#include <fstream>

#include <json.hpp>

#include "codeqa/common.hpp"
#include "codeqa/javatok.hpp"
#include "test_util.hpp"

namespace codeqa {
namespace {

TokenSeq words(const std::string& s) {
  TokenSeq out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

TEST(Tokenize, SignatureFromExample) {
  EXPECT_EQ(tokenize("public Vertex nextVertex(Vertex v)"), words("public vertex nextvertex ( vertex v )"));
}

TEST(Tokenize, EmptyString) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Tokenize, StatementWithMemberCall) {
  EXPECT_EQ(tokenize("int ind = vertices.indexOf(v);"), words("int ind = vertices . indexof ( v ) ;"));
}

TEST(Tokenize, PunctuationIsSingleCharacter) {
  EXPECT_EQ(tokenize("a==b&&c!=d"), words("a = = b & & c ! = d"));
  EXPECT_EQ(tokenize("x->y ? z : w"), words("x - > y ? z : w"));
  EXPECT_EQ(tokenize("@Override ~a ^ b % c | d [0]"), words("@ override ~ a ^ b % c | d [ 0 ]"));
}

TEST(Tokenize, VarargsEllipsisIsOneToken) {
  EXPECT_EQ(tokenize("String... xs"), words("string ... xs"));
}

TEST(Tokenize, LiteralsBecomePlaceholders) {
  EXPECT_EQ(tokenize("s = \"a \\\"quoted\\\" { word\"; c = '}';"), words("s = <strlit> ; c = <chrlit> ;"));
  EXPECT_EQ(tokenize("c = '\\n';"), words("c = <chrlit> ;"));
}

TEST(Tokenize, UnclosedStringSwallowsRest) {
  EXPECT_EQ(tokenize("x = \"never closed ( { ;"), words("x = <strlit>"));
}

TEST(Tokenize, CommentsAreDropped) {
  EXPECT_EQ(tokenize("a // line comment\n b /* block\n comment */ c"), words("a b c"));
}

TEST(Tokenize, NumbersKeptWhole) {
  EXPECT_EQ(tokenize("x = 3.5e-2f + 0x1F + 10L;"), words("x = 3.5e-2f + 0x1f + 10l ;"));
}

TEST(Tokenize, SpecialTokensRecognized) {
  EXPECT_EQ(tokenize("<st> here is <funcode> </s>"), words("<st> here is <funcode> </s>"));
  EXPECT_EQ(tokenize("a<b"), words("a < b"));
}

TEST(Tokenize, ContractionsStayTogether) {
  EXPECT_EQ(tokenize("what's it's"), words("what's it's"));
}

TEST(Tokenize, LowercaseNoWhitespace) {
  for (const auto& t : tokenize("Class  Foo\t{ INT X;\r\n}")) {
    for (char c : t) {
      EXPECT_FALSE(c >= 'A' && c <= 'Z') << t;
      EXPECT_FALSE(c == ' ' || c == '\t' || c == '\n') << t;
    }
  }
}

TEST(Detokenize, JoinsWithSpaces) {
  EXPECT_EQ(detokenize(words("the return type for this method is vertex")), "the return type for this method is vertex");
  EXPECT_EQ(detokenize({}), "");
}

TEST(Detokenize, RoundTripsSampledMethods) {
  const auto records = testing::synth_records(1000, 11);
  ASSERT_EQ(records.size(), 1000u);
  for (const auto& r : records) {
    const TokenSeq t = tokenize(r.raw_source);
    EXPECT_EQ(tokenize(detokenize(t)), t) << r.id;
  }
}

TEST(Detokenize, RoundTripsAwkwardText) {
  for (const char* s : {"a...b", "x<y>>z", "'q' \"s\"", "<st>x</s>", "what's up?", "1.5e+3 + 2"}) {
    const TokenSeq t = tokenize(s);
    EXPECT_EQ(tokenize(detokenize(t)), t) << s;
  }
}

TEST(ExtractFeatures, ExampleMethod) {
  const auto f = extract_features("public Vertex nextVertex(Vertex v) { return v; }");
  EXPECT_EQ(f.return_type, TokenSeq{"vertex"});
  EXPECT_EQ(f.name, "nextvertex");
  ASSERT_EQ(f.params.size(), 1u);
  EXPECT_EQ(f.params[0], (Parameter{{"vertex"}, "v"}));
  EXPECT_EQ(f.modifiers, std::vector<std::string>{"public"});
  EXPECT_EQ(f.body_tokens, words("{ return v ; }"));
}

TEST(ExtractFeatures, VoidWithoutParameters) {
  const auto f = extract_features("void run() { }");
  EXPECT_EQ(f.return_type, TokenSeq{"void"});
  EXPECT_TRUE(f.params.empty());
  EXPECT_EQ(f.signature_tokens, words("void run ( )"));
}

TEST(ExtractFeatures, GenericReturnTypeAgainstHandParse) {
  const auto f = extract_features("static List<String> f(int a, int b) {}");
  EXPECT_EQ(f.return_type, (TokenSeq{"list", "<", "string", ">"}));
  EXPECT_EQ(f.params, (std::vector<Parameter>{{{"int"}, "a"}, {{"int"}, "b"}}));
  EXPECT_EQ(f.modifiers, std::vector<std::string>{"static"});
}

TEST(ExtractFeatures, ConstructorUsesNameAsReturnType) {
  const auto f = extract_features("public Polygon(int n) { this.n = n; }");
  EXPECT_TRUE(f.is_constructor);
  EXPECT_EQ(f.return_type, TokenSeq{"polygon"});
}

TEST(ExtractFeatures, ThrowsClauseNotInSignature) {
  const auto f = extract_features("public void load(String p) throws IOException { }");
  EXPECT_EQ(f.signature_tokens, words("public void load ( string p )"));
}

TEST(ExtractFeatures, MalformedInputs) {
  for (const char* src : {"public int x = 3;", "foo", "", "void f( { }", "void f() { {", "(int a) { }", "public int if() { }",
                          "void f(int) { }"}) {
    try {
      extract_features(src);
      ADD_FAILURE() << "accepted: " << src;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::MalformedMethod) << src;
    }
  }
}

TEST(ExtractFeatures, NameIsNeverKeyword) {
  for (const auto& r : testing::synth_records(300, 5)) {
    EXPECT_FALSE(is_java_keyword(r.features.name));
    EXPECT_EQ(r.features.params.empty(),
              r.features.signature_tokens.back() == ")" &&
                  r.features.signature_tokens[r.features.signature_tokens.size() - 2] == "(");
  }
}

TEST(ExtractFeatures, SignatureIsPrefixOfCodeTokens) {
  for (const auto& r : testing::synth_records(500, 3)) {
    const TokenSeq code = tokenize(r.raw_source);
    const auto& sig = r.features.signature_tokens;
    ASSERT_LE(r.features.signature_offset + sig.size(), code.size());
    EXPECT_TRUE(std::equal(sig.begin(), sig.end(), code.begin() + static_cast<std::ptrdiff_t>(r.features.signature_offset)))
        << r.id;
    if (r.raw_source.find('@') == std::string::npos) {
      EXPECT_EQ(r.features.signature_offset, 0u);
    }
  }
}

TEST(ExtractFeatures, HandLabeledFixture) {
  std::ifstream in(testing::test_data("extraction_fixture.jsonl"));
  ASSERT_TRUE(in) << "missing fixture";
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const std::string src = j["source"].get<std::string>();
    SCOPED_TRACE(src);
    const auto f = extract_features(src);
    EXPECT_EQ(f.modifiers, j["modifiers"].get<std::vector<std::string>>());
    EXPECT_EQ(f.return_type, j["return_type"].get<TokenSeq>());
    EXPECT_EQ(f.name, j["name"].get<std::string>());
    EXPECT_EQ(f.is_constructor, j["constructor"].get<bool>());
    EXPECT_EQ(f.signature_tokens, j["signature"].get<TokenSeq>());
    std::vector<Parameter> params;
    for (const auto& p : j["params"]) params.push_back({p["type"].get<TokenSeq>(), p["name"].get<std::string>()});
    EXPECT_EQ(f.params, params);
    ++n;
  }
  EXPECT_EQ(n, 50u);
}

TEST(MethodRecord, ContextLayoutWithSummary) {
  const auto r = make_record("m1", "p", "public Vertex nextVertex(Vertex v) { return v; }",
                             "Returns the next vertex of a polygon.");
  const TokenSeq expected = words("<st> returns the next vertex of a polygon nl public vertex nextvertex ( vertex v ) { return v ; }");
  EXPECT_EQ(r.context_tokens, expected);
  EXPECT_EQ(r.return_type_span(), (std::pair<std::size_t, std::size_t>{10, 11}));
  EXPECT_EQ(r.context_tokens[10], "vertex");
  EXPECT_EQ(r.signature_span(), (std::pair<std::size_t, std::size_t>{9, 16}));
  EXPECT_EQ(r.context_tokens[15], ")");
}

TEST(MethodRecord, EmptySummaryKeepsMarkers) {
  const auto r = make_record("m2", "p", "void run() { }", "");
  EXPECT_EQ(r.context_tokens, words("<st> nl void run ( ) { }"));
  EXPECT_FALSE(r.has_summary());
}

TEST(MethodRecord, DocCommentBecomesSummary) {
  const auto r = make_record("m3", "p", "/**\n * Sets the domain name.\n * @param n the name\n */\npublic void setDomainName(String n) { }", "");
  EXPECT_EQ(r.features.summary, words("sets the domain name"));
  EXPECT_EQ(r.context_tokens.front(), "<st>");
  EXPECT_EQ(r.context_tokens[5], "nl");
}

TEST(Tokenize, Deterministic) {
  const std::string src = "public static <T> List<T> f(T... xs) { return List.of(xs); }";
  EXPECT_EQ(tokenize(src), tokenize(std::string(src)));
}

}  // namespace
}  // namespace codeqa
