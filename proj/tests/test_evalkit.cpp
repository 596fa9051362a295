#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include "codeqa/evalkit.hpp"
#include "codeqa/pipeline.hpp"
#include "test_util.hpp"

namespace codeqa {
namespace {

TokenSeq strip(const TokenSeq& answer) { return TokenSeq(answer.begin() + 1, answer.end() - 1); }

QATuple gold_for(QuestionType q, const MethodRecord& rec, const TokenSeq* negative = nullptr) {
  Rng rng(1);
  QATuple t;
  t.qtype = q;
  t.method_id = rec.id;
  t.context = rec.context_tokens;
  t.question = render_question(q, rec, testing::bundled_templates(), rng).question;
  t.answer = render_answer(q, rec, testing::bundled_templates(), negative, rng);
  t.is_negative = negative != nullptr;
  return t;
}

MethodRecord vertex_method() {
  return make_record("m1", "geo", "public Vertex nextVertex(Vertex v) { int ind = vertices.indexOf(v); return vertices.get(ind + 1); }",
                     "Returns the next vertex of a polygon.");
}

TEST(Score, ReturnTypeExample) {
  const auto rec = vertex_method();
  const auto gold = gold_for(QuestionType::ReturnType, rec);
  EXPECT_TRUE(score_answer(QuestionType::ReturnType, tokenize("the return type for this method is vertex"), rec, gold));
  EXPECT_FALSE(score_answer(QuestionType::ReturnType, tokenize("the return type for this method is int"), rec, gold));
  EXPECT_FALSE(score_answer(QuestionType::ReturnType, {}, rec, gold));
}

TEST(Score, MultiTokenTypesNeedContiguousRun) {
  const auto rec = make_record("m", "p", "List<String> names() { return n; }", "Returns the names of this set.");
  const auto gold = gold_for(QuestionType::ReturnType, rec);
  EXPECT_TRUE(score_answer(QuestionType::ReturnType, tokenize("the return type is list < string >"), rec, gold));
  EXPECT_FALSE(score_answer(QuestionType::ReturnType, tokenize("list string < >"), rec, gold));
}

TEST(Score, ParametersNeedEveryTypeAndName) {
  const auto rec = make_record("m", "p", "void put(String key, int value) { }", "Stores a value under a key.");
  const auto gold = gold_for(QuestionType::Parameters, rec);
  EXPECT_TRUE(score_answer(QuestionType::Parameters, tokenize("the parameters are string key , int value"), rec, gold));
  EXPECT_FALSE(score_answer(QuestionType::Parameters, tokenize("the parameters are string key"), rec, gold));
  const auto none = make_record("n", "p", "void run() { }", "Runs the task now.");
  EXPECT_TRUE(score_answer(QuestionType::Parameters, tokenize("this method has no parameters"), none,
                           gold_for(QuestionType::Parameters, none)));
}

TEST(Score, ConstructorReturnType) {
  const auto rec = make_record("c", "p", "public Polygon(int n) { }", "Creates a polygon with n sides.");
  EXPECT_EQ(slot_tokens(QuestionType::ReturnType, rec), TokenSeq{"constructor"});
  EXPECT_TRUE(score_answer(QuestionType::ReturnType, tokenize("this method is a constructor"), rec,
                           gold_for(QuestionType::ReturnType, rec)));
}

TEST(Score, DefinitionAndCapability) {
  const auto rec = vertex_method();
  EXPECT_TRUE(score_answer(QuestionType::Definition, tokenize("here is the definition <funcode>"), rec,
                           gold_for(QuestionType::Definition, rec)));
  EXPECT_FALSE(score_answer(QuestionType::Definition, tokenize("here is the definition"), rec,
                            gold_for(QuestionType::Definition, rec)));
  const TokenSeq other = tokenize("sets the name");
  EXPECT_TRUE(score_answer(QuestionType::Capability, {"yes"}, rec, gold_for(QuestionType::Capability, rec)));
  EXPECT_FALSE(score_answer(QuestionType::Capability, {"yes"}, rec, gold_for(QuestionType::Capability, rec, &other)));
  EXPECT_TRUE(score_answer(QuestionType::Capability, {"no"}, rec, gold_for(QuestionType::Capability, rec, &other)));
}

TEST(Score, DescriptionF1Boundary) {
  // gold phrase: returns the next vertex of a polygon (7 tokens)
  const auto rec = vertex_method();
  const auto gold = gold_for(QuestionType::Description, rec);
  EXPECT_DOUBLE_EQ(token_f1(tokenize("returns the next vertex"), tokenize("returns the next vertex of a polygon")),
                   8.0 / 11.0);
  // 3 overlapping of 5 produced: F1 = 6 / 12 = 0.5, accepted.
  EXPECT_DOUBLE_EQ(token_f1(tokenize("returns the next edge node"), tokenize("returns the next vertex of a polygon")),
                   0.5);
  EXPECT_TRUE(score_answer(QuestionType::Description, tokenize("returns the next edge node"), rec, gold));
  // 3 overlapping of 6 produced: F1 = 6 / 13 < 0.5, rejected.
  EXPECT_FALSE(score_answer(QuestionType::Description, tokenize("returns the next edge node x"), rec, gold));
}

TEST(Score, TokenF1CountsDuplicatesOnce) {
  EXPECT_DOUBLE_EQ(token_f1(tokenize("the the the"), tokenize("the cat")), 2.0 / 5.0);
  EXPECT_DOUBLE_EQ(token_f1({}, tokenize("a")), 0.0);
}

TEST(Score, GoldAnswersAlwaysScoreCorrect) {
  const auto records = testing::synth_records(300, 17);
  const auto gen = generate_corpus(records, testing::bundled_templates(), 17);
  const auto index = record_index(records);
  for (const auto& t : gen.tuples) {
    EXPECT_TRUE(score_answer(t.qtype, strip(t.answer), *index.at(t.method_id), t))
        << code(t.qtype) << " " << detokenize(t.answer);
  }
}

TEST(Evaluate, EchoStubScoresPerfectly) {
  const auto records = testing::synth_records(200, 5);
  const auto tuples = generate_corpus(records, testing::bundled_templates(), 5).tuples;
  const auto index = record_index(records);
  std::map<const QATuple*, TokenSeq> gold;
  const Answerer echo = [](const QATuple& t) { return Answer{strip(t.answer), std::nullopt, false}; };
  const auto report = evaluate_split(echo, tuples, index);
  EXPECT_EQ(report.n(), tuples.size());
  EXPECT_DOUBLE_EQ(report.overall_rate(), 1.0);
  for (auto q : kAllQuestionTypes) EXPECT_DOUBLE_EQ(report[q].rate(), 1.0) << code(q);
  EXPECT_EQ(report.focus_n, 0u);
}

TEST(Evaluate, IndependentOfTupleOrderAndThreads) {
  const auto records = testing::synth_records(150, 6);
  auto tuples = generate_corpus(records, testing::bundled_templates(), 6).tuples;
  const auto index = record_index(records);
  // Deterministic but imperfect answerer: right on even template ids.
  const Answerer half = [](const QATuple& t) {
    return Answer{t.template_id % 2 == 0 ? strip(t.answer) : TokenSeq{"<unk>"}, std::nullopt, false};
  };
  const auto a = report_to_json(evaluate_split(half, tuples, index, {nullptr, 1000, 1}));
  Rng rng(3);
  rng.shuffle(tuples);
  const auto b = evaluate_split(half, tuples, index, {nullptr, 1000, 4});
  auto strip_samples = [](nlohmann::ordered_json j) {
    for (auto& [k, v] : j["per_type"].items()) v.erase("failure_samples");
    return j;
  };
  EXPECT_EQ(strip_samples(a).dump(), strip_samples(report_to_json(b)).dump());
  EXPECT_GT(b.unk_answer_failure_fraction(), 0.99);
}

TEST(Evaluate, InVocabularyFilterExcludesUnknownSlots) {
  const auto rec = make_record("m", "p", "public Zebra stripe() { return z; }", "Returns the zebra of the herd.");
  std::map<std::string, const MethodRecord*> index{{rec.id, &rec}};
  const std::vector<QATuple> tuples{gold_for(QuestionType::ReturnType, rec), gold_for(QuestionType::Definition, rec)};
  const Vocabulary out({"<pad>", "<unk>", "<st>", "</s>", "<funcode>", "nl", "the"});
  const Answerer echo = [](const QATuple& t) { return Answer{strip(t.answer), std::nullopt, false}; };
  EvalOptions opts;
  opts.in_vocab_filter = &out;
  const auto report = evaluate_split(echo, tuples, index, opts);
  EXPECT_EQ(report[QuestionType::ReturnType].excluded, 1u);
  EXPECT_EQ(report[QuestionType::ReturnType].n, 0u);
  EXPECT_EQ(report[QuestionType::Definition].n, 1u);
}

TEST(Evaluate, FailuresRecordUnknownTokens) {
  const auto rec = vertex_method();
  std::map<std::string, const MethodRecord*> index{{rec.id, &rec}};
  const Answerer unk = [](const QATuple&) { return Answer{tokenize("the return type is <unk>"), std::nullopt, true}; };
  const auto report = evaluate_split(unk, {gold_for(QuestionType::ReturnType, rec)}, index);
  const auto& t = report[QuestionType::ReturnType];
  ASSERT_EQ(t.failure_samples.size(), 1u);
  EXPECT_TRUE(t.failure_samples[0].unk_in_answer);
  EXPECT_TRUE(t.failure_samples[0].unk_in_question);
  EXPECT_EQ(t.failure_samples[0].expected_slot, TokenSeq{"vertex"});
  EXPECT_EQ(t.failures_unk_answer, 1u);
}

TEST(Ordering, ExpectedShape) {
  CorrectnessReport r;
  auto set = [&](QuestionType q, std::size_t hits) {
    r.per_type[index(q)].n = 100;
    r.per_type[index(q)].n_correct = hits;
  };
  set(QuestionType::ReturnType, 95);
  set(QuestionType::Parameters, 80);
  set(QuestionType::Definition, 100);
  set(QuestionType::Signature, 92);
  set(QuestionType::Description, 40);
  set(QuestionType::Capability, 75);
  EXPECT_TRUE(has_expected_ordering(r));
  set(QuestionType::Parameters, 93);
  EXPECT_FALSE(has_expected_ordering(r));
  set(QuestionType::Parameters, 80);
  set(QuestionType::Description, 76);
  EXPECT_FALSE(has_expected_ordering(r));
}

TEST(Focus, ArgmaxInsideSpan) {
  AttentionTrace t;
  t.code_attn = Eigen::MatrixXd::Constant(2, 20, 0.01);
  t.code_attn(1, 11) = 0.8;
  EXPECT_TRUE(attention_focus(t, {11, 12}));
  EXPECT_FALSE(attention_focus(t, {12, 13}));
  t.code_attn(0, 3) = 0.9;  // earlier rows do not count
  EXPECT_TRUE(attention_focus(t, {11, 12}));
}

TEST(Focus, UniformRowTiesGoToFirstPosition) {
  AttentionTrace t;
  t.code_attn = Eigen::MatrixXd::Constant(1, 200, 1.0 / 200);
  EXPECT_FALSE(attention_focus(t, {11, 12}));
  EXPECT_TRUE(attention_focus(t, {0, 1}));
  EXPECT_FALSE(attention_focus(AttentionTrace{}, {0, 1}));
}

TEST(Heatmap, RoundTripDimensionsAndSpans) {
  const auto records = testing::synth_records(60, 8);
  const auto tuples = generate_corpus(records, testing::bundled_templates(), 8).tuples;
  ModelConfig mc;
  mc.d_emb = 6;
  mc.d_hid = 8;
  const Model model = make_model(tuples, mc, 8);
  const auto index = record_index(records);
  const auto dir = std::filesystem::temp_directory_path() / "codeqa_heatmap_test";
  std::filesystem::create_directories(dir);

  std::size_t checked = 0;
  for (const auto& t : tuples) {
    if (t.qtype != QuestionType::ReturnType || checked == 20) continue;
    const auto& rec = *index.at(t.method_id);
    const InferResult r = infer(model, t.question, t.context, 6);
    const HeatmapExport h = make_heatmap(r, t, rec);
    EXPECT_EQ(h.code_attn.rows(), static_cast<Eigen::Index>(h.answer.size()));
    EXPECT_EQ(h.code_attn.cols(), static_cast<Eigen::Index>(h.context.size()));
    EXPECT_EQ(h.q_attn.rows(), static_cast<Eigen::Index>(h.answer.size()));

    // Spans agree with an independent search for the signature in the context.
    const auto& sig = rec.features.signature_tokens;
    const auto at = std::search(h.context.begin() + static_cast<std::ptrdiff_t>(rec.code_offset()), h.context.end(),
                                sig.begin(), sig.end());
    ASSERT_NE(at, h.context.end());
    const auto sig_begin = static_cast<std::size_t>(at - h.context.begin());
    ASSERT_TRUE(h.signature_span.has_value());
    EXPECT_EQ(*h.signature_span, (std::pair<std::size_t, std::size_t>{sig_begin, sig_begin + sig.size()}));
    if (rec.features.is_constructor) {
      EXPECT_FALSE(h.return_type_span.has_value());
    } else {
      ASSERT_TRUE(h.return_type_span.has_value());
      const auto [b, e] = *h.return_type_span;
      EXPECT_EQ(TokenSeq(h.context.begin() + static_cast<std::ptrdiff_t>(b), h.context.begin() + static_cast<std::ptrdiff_t>(e)),
                rec.features.return_type);
      EXPECT_GE(b, sig_begin);
      EXPECT_LE(e, sig_begin + sig.size());
    }

    const std::string path = (dir / (rec.id + ".json")).string();
    export_heatmap(h, path);
    const HeatmapExport back = read_heatmap(path);
    EXPECT_EQ(back.method_id, h.method_id);
    EXPECT_EQ(back.qtype, "Q1");
    EXPECT_EQ(back.question, h.question);
    EXPECT_EQ(back.answer, h.answer);
    EXPECT_EQ(back.context, h.context);
    EXPECT_EQ(back.return_type_span, h.return_type_span);
    EXPECT_EQ(back.signature_span, h.signature_span);
    EXPECT_TRUE(back.code_attn.isApprox(h.code_attn, 1e-12) || h.code_attn.size() == 0);
    EXPECT_EQ(read_file(path), heatmap_to_json(back).dump(1) + "\n");
    ++checked;
  }
  EXPECT_EQ(checked, 20u);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace codeqa
