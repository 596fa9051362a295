#include <gtest/gtest.h>

#include <cmath>

#include "codeqa/common.hpp"
#include "codeqa/gradcheck.hpp"
#include "codeqa/gru.hpp"
#include "codeqa/seq2seq.hpp"

namespace codeqa {
namespace {

Seq2SeqModel<double> tiny_model(std::uint64_t seed, int d_emb = 6, int d_hid = 7) {
  std::vector<std::string> in = Vocabulary().tokens();
  for (auto t : {"what", "does", "it", "return", "public", "void", "int", "run", "(", ")", "{", "}", "size"}) in.emplace_back(t);
  std::vector<std::string> out = Vocabulary().tokens();
  for (auto t : {"the", "return", "type", "is", "void", "int"}) out.emplace_back(t);
  ModelDims dims;
  dims.d_emb = d_emb;
  dims.d_hid = d_hid;
  dims.max_q_len = 10;
  dims.max_c_len = 16;
  dims.max_a_len = 8;
  Seq2SeqModel<double> m(Vocabulary(in), Vocabulary(out), dims);
  Rng rng(seed);
  m.init_random(rng);
  return m;
}

double log_sum_exp(const Eigen::VectorXd& v) {
  const double hi = v.maxCoeff();
  return hi + std::log((v.array() - hi).exp().sum());
}

TEST(Gru, MatchesScalarLoop) {
  GruCell<double> cell;
  cell.resize(3, 2);
  Rng rng(4);
  for (auto* m : {&cell.W, &cell.U, &cell.b}) {
    for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = 2 * rng.unit() - 1;
  }
  Matrix<double> x(3, 2), h(2, 2);
  x << 0.1, -0.4, 0.7, 0.2, -0.3, 0.9;
  h << 0.5, -0.1, 0.2, 0.3;
  RowMask<double> mask(2);
  mask << 1, 0;
  const Matrix<double> got = gru_forward(cell, x, h, mask);

  auto sig = [](double v) { return 1 / (1 + std::exp(-v)); };
  for (int col = 0; col < 2; ++col) {
    for (int k = 0; k < 2; ++k) {
      double az = cell.b(k, 0), ar = cell.b(2 + k, 0), an = cell.b(4 + k, 0), un = 0;
      for (int i = 0; i < 3; ++i) {
        az += cell.W(k, i) * x(i, col);
        ar += cell.W(2 + k, i) * x(i, col);
        an += cell.W(4 + k, i) * x(i, col);
      }
      double uz = 0, ur = 0;
      for (int i = 0; i < 2; ++i) {
        uz += cell.U(k, i) * h(i, col);
        ur += cell.U(2 + k, i) * h(i, col);
        un += cell.U(4 + k, i) * h(i, col);
      }
      const double z = sig(az + uz), r = sig(ar + ur), n = std::tanh(an + r * un);
      const double expected = col == 0 ? (1 - z) * n + z * h(k, col) : h(k, col);
      EXPECT_NEAR(got(k, col), expected, 1e-12);
    }
  }
}

TEST(Forward, LogitsGiveNormalizedDistribution) {
  const auto m = tiny_model(1);
  const auto q = m.input_vocab.encode(tokenize("what does it return ?"));
  const auto c = m.input_vocab.encode(tokenize("<st> nl public void run ( ) { }"));
  const auto step = forward(m, q, c, {Vocabulary::kStart, m.output_vocab.id("the")});
  const Eigen::VectorXd logits = step.logits.col(0);
  const Eigen::VectorXd p = (logits.array() - log_sum_exp(logits)).exp();
  EXPECT_NEAR(p.sum(), 1.0, 1e-6);
  EXPECT_NEAR(step.code_row.sum(), 1.0, 1e-6);
  EXPECT_NEAR(step.q_row.sum(), 1.0, 1e-6);
  EXPECT_EQ(step.code_row.rows(), static_cast<Eigen::Index>(c.size()));
  EXPECT_EQ(step.q_row.rows(), static_cast<Eigen::Index>(q.size()));
}

TEST(Forward, EmptyContextPutsAllMassOnFirstPosition) {
  const auto m = tiny_model(2);
  const auto q = m.input_vocab.encode(tokenize("what does it return"));
  const auto step = forward(m, q, {}, {Vocabulary::kStart});
  ASSERT_EQ(step.code_row.rows(), 1);
  EXPECT_DOUBLE_EQ(step.code_row(0, 0), 1.0);
}

TEST(Forward, PaddingReceivesNoAttention) {
  const auto m = tiny_model(3);
  const auto long_ex = encode_example(m, tokenize("what does it return"), tokenize("<st> nl public int size ( ) { }"),
                                      tokenize("<st> the return type is int </s>"));
  const auto short_ex = encode_example(m, tokenize("return"), tokenize("<st> nl"), tokenize("<st> int </s>"));
  std::vector<const EncodedExample*> ptrs{&long_ex, &short_ex};
  const PaddedBatch batch = make_batch(ptrs);
  EXPECT_EQ(batch.c.rows(), 9);
  ForwardTape<double> tape;
  forward_loss(m, batch, tape);
  ASSERT_EQ(tape.attn_c.size(), 2u);
  EXPECT_EQ(tape.attn_c[1].rows(), 2);
  for (Eigen::Index t = 0; t < tape.attn_c[1].cols(); ++t) EXPECT_NEAR(tape.attn_c[1].col(t).sum(), 1.0, 1e-6);

  // The short example scores the same alone and inside a padded batch.
  std::vector<const EncodedExample*> alone{&short_ex};
  ForwardTape<double> tape_alone;
  const auto solo = forward_loss(m, make_batch(alone), tape_alone);
  const Eigen::Index off = tape.offsets[1];
  for (Eigen::Index k = 0; k < tape_alone.probs.cols(); ++k) {
    EXPECT_LT((tape.probs.col(off + k) - tape_alone.probs.col(k)).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_GT(solo.loss, 0.0);
}

TEST(Forward, ZeroOutputLayerGivesUniformLoss) {
  auto m = tiny_model(4);
  m.params.out_w.setZero();
  m.params.out_b.setZero();
  const auto e = encode_example(m, tokenize("what does it return"), tokenize("<st> nl void run ( ) { }"),
                                tokenize("<st> the return type is void </s>"));
  std::vector<const EncodedExample*> ptrs{&e};
  ForwardTape<double> tape;
  const auto stats = forward_loss(m, make_batch(ptrs), tape);
  EXPECT_NEAR(stats.loss, std::log(static_cast<double>(m.output_vocab.size())), 1e-12);
  EXPECT_EQ(stats.tokens, 6u);
}

TEST(Forward, TeacherForcedLossMatchesStepwiseDecoding) {
  const auto m = tiny_model(5);
  const auto e = encode_example(m, tokenize("what does it return"), tokenize("<st> nl public int size ( ) { }"),
                                tokenize("<st> the return type is int </s>"));
  std::vector<const EncodedExample*> ptrs{&e};
  ForwardTape<double> tape;
  const double loss = forward_loss(m, make_batch(ptrs), tape).loss;
  double total = 0;
  for (std::size_t t = 1; t < e.answer.size(); ++t) {
    const std::vector<int> prefix(e.answer.begin(), e.answer.begin() + static_cast<std::ptrdiff_t>(t));
    const Eigen::VectorXd logits = forward(m, e.question, e.context, prefix).logits.col(0);
    total += log_sum_exp(logits) - logits(e.answer[t]);
  }
  EXPECT_NEAR(loss, total / static_cast<double>(e.answer.size() - 1), 1e-10);
}

TEST(Forward, RejectsOutOfRangeIds) {
  const auto m = tiny_model(6);
  try {
    forward(m, {1000}, {2}, {Vocabulary::kStart});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
  EXPECT_THROW(forward(m, {2}, {2}, {Vocabulary::kStart, 99}), Error);
  EXPECT_THROW(forward(m, {2}, {2}, {}), Error);
}

class GradCheck : public ::testing::TestWithParam<std::tuple<std::uint64_t, bool>> {};

TEST_P(GradCheck, AnalyticMatchesCentralDifferences) {
  const auto [seed, padded] = GetParam();
  auto f = make_gradcheck_fixture(seed, padded);
  const GradCheckResult r = grad_check(f.model, f.batch, 1e-5);
  EXPECT_EQ(r.parameters_checked, f.model.params.parameter_count());
  EXPECT_LT(r.max_relative_error, 1e-4);
  EXPECT_LT(r.max_tensor_relative_error, 1e-6);
  for (const auto& t : r.tensors) EXPECT_LT(t.max_abs_error, 1e-8) << t.name;
}

INSTANTIATE_TEST_SUITE_P(Seeds, GradCheck,
                         ::testing::Values(std::make_tuple(1u, false), std::make_tuple(2u, false),
                                           std::make_tuple(3u, false), std::make_tuple(1u, true),
                                           std::make_tuple(2u, true)));

TEST(GradCheck, DirectionalDerivativeAtDefaultInit) {
  auto m = tiny_model(9);
  const auto e = encode_example(m, tokenize("what does it return"), tokenize("<st> nl public int size ( ) { }"),
                                tokenize("<st> the return type is int </s>"));
  std::vector<const EncodedExample*> ptrs{&e};
  const PaddedBatch batch = make_batch(ptrs);
  ForwardTape<double> tape;
  forward_loss(m, batch, tape);
  Seq2SeqParams<double> grads = m.params;
  grads.set_zero();
  backward(m, tape, grads);

  Seq2SeqParams<double> dir = m.params;
  Rng rng(10);
  dir.for_each([&](const char*, Matrix<double>& d) {
    for (Eigen::Index i = 0; i < d.size(); ++i) d.data()[i] = 2 * rng.unit() - 1;
  });
  double analytic = 0;
  std::vector<const Matrix<double>*> gs, ds;
  grads.for_each([&](const char*, const Matrix<double>& g) { gs.push_back(&g); });
  dir.for_each([&](const char*, const Matrix<double>& d) { ds.push_back(&d); });
  for (std::size_t k = 0; k < gs.size(); ++k) analytic += gs[k]->cwiseProduct(*ds[k]).sum();

  auto shifted_loss = [&](double h) {
    Seq2SeqModel<double> copy = m;
    std::vector<Matrix<double>*> ps;
    copy.params.for_each([&](const char*, Matrix<double>& p) { ps.push_back(&p); });
    for (std::size_t k = 0; k < ps.size(); ++k) *ps[k] += h * *ds[k];
    ForwardTape<double> t;
    return forward_loss(copy, batch, t).loss;
  };
  const double h = 1e-5;
  const double numeric = (shifted_loss(h) - shifted_loss(-h)) / (2 * h);
  EXPECT_LT(relative_error(analytic, numeric), 1e-6);
}

TEST(Infer, RespectsLengthBound) {
  const auto m = tiny_model(11);
  const auto r = infer(m, tokenize("what does it return"), tokenize("<st> nl void run ( ) { }"), 1);
  EXPECT_LE(r.answer.size(), 1u);
  EXPECT_EQ(r.trace.code_attn.rows(), static_cast<Eigen::Index>(r.answer.size()));
}

TEST(Infer, TraceDimensionsMatchSequences) {
  const auto m = tiny_model(12);
  const TokenSeq ctx = tokenize("<st> nl public int size ( ) { }");
  const auto r = infer(m, tokenize("what does it return"), ctx, 8);
  EXPECT_EQ(r.context, ctx);
  EXPECT_EQ(r.trace.code_attn.rows(), static_cast<Eigen::Index>(r.answer.size()));
  EXPECT_EQ(r.trace.code_attn.cols(), static_cast<Eigen::Index>(ctx.size()));
  EXPECT_EQ(r.trace.q_attn.cols(), 4);
  for (Eigen::Index i = 0; i < r.trace.code_attn.rows(); ++i) {
    EXPECT_NEAR(r.trace.code_attn.row(i).sum(), 1.0, 1e-6);
    EXPECT_NEAR(r.trace.q_attn.row(i).sum(), 1.0, 1e-6);
  }
  for (const auto& t : r.answer) {
    EXPECT_NE(t, "<pad>");
    EXPECT_NE(t, "<st>");
    EXPECT_NE(t, "</s>");
  }
}

TEST(Infer, UnknownQuestionStillAnswersWithWarning) {
  const auto m = tiny_model(13);
  const auto r = infer(m, tokenize("zzz qqq xxx"), tokenize("<st> nl void run ( ) { }"), 8);
  EXPECT_DOUBLE_EQ(r.unk_fraction, 1.0);
  EXPECT_TRUE(r.low_confidence);
  const auto ok = infer(m, tokenize("what does it return zzz"), tokenize("<st> nl void run ( ) { }"), 8);
  EXPECT_DOUBLE_EQ(ok.unk_fraction, 0.2);
  EXPECT_FALSE(ok.low_confidence);
}

TEST(Infer, Deterministic) {
  const auto m = tiny_model(14);
  const auto a = infer(m, tokenize("what does it return"), tokenize("<st> nl void run ( ) { }"), 8);
  const auto b = infer(m, tokenize("what does it return"), tokenize("<st> nl void run ( ) { }"), 8);
  EXPECT_EQ(a.answer, b.answer);
  EXPECT_TRUE(a.trace.code_attn.isApprox(b.trace.code_attn, 0.0) || a.trace.code_attn.size() == 0);
}

TEST(Encode, ClipsToConfiguredLengths) {
  const auto m = tiny_model(15);
  TokenSeq long_ctx(40, "run");
  TokenSeq long_ans{"<st>"};
  for (int i = 0; i < 20; ++i) long_ans.push_back("int");
  long_ans.push_back("</s>");
  const auto e = encode_example(m, TokenSeq(30, "what"), long_ctx, long_ans);
  EXPECT_EQ(e.question.size(), 10u);
  EXPECT_EQ(e.context.size(), 16u);
  EXPECT_EQ(e.answer.size(), 10u);
  EXPECT_EQ(e.answer.front(), Vocabulary::kStart);
  EXPECT_EQ(e.answer.back(), Vocabulary::kEnd);
}

}  // namespace
}  // namespace codeqa
