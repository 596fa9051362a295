#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "codeqa/common.hpp"
#include "codeqa/pipeline.hpp"
#include "codeqa/train.hpp"
#include "test_util.hpp"

namespace codeqa {
namespace {

struct SmallSetup {
  std::vector<QATuple> tuples;
  Model model;
  std::vector<EncodedExample> examples;
};

SmallSetup small_setup(std::size_t methods = 30, std::uint64_t seed = 3) {
  const auto records = testing::synth_records(methods, seed, 3);
  SmallSetup s;
  s.tuples = generate_corpus(records, testing::bundled_templates(), seed).tuples;
  ModelConfig mc;
  mc.d_emb = 12;
  mc.d_hid = 16;
  mc.max_c_len = 60;
  s.model = make_model(s.tuples, mc, seed);
  s.examples = encode_tuples(s.model, s.tuples);
  return s;
}

template <typename Scalar>
bool same_params(const Seq2SeqParams<Scalar>& a, const Seq2SeqParams<Scalar>& b) {
  std::vector<const Matrix<Scalar>*> xs, ys;
  a.for_each([&](const char*, const Matrix<Scalar>& m) { xs.push_back(&m); });
  b.for_each([&](const char*, const Matrix<Scalar>& m) { ys.push_back(&m); });
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (*xs[k] != *ys[k]) return false;
  }
  return true;
}

TEST(Train, ZeroLearningRateLeavesParametersUnchanged) {
  auto s = small_setup(20);
  const auto before = s.model.params;
  OptimizerConfig oc;
  oc.learning_rate = 0.0;
  oc.batch_size = 16;
  Adam<float> adam(s.model, oc);
  Rng rng(1);
  const auto m = train_epoch(s.model, s.examples, adam, rng);
  EXPECT_GT(m.batches, 0u);
  EXPECT_TRUE(same_params(before, s.model.params));
}

TEST(Train, DecoderIsFedTheGoldPrefix) {
  auto s = small_setup(20);
  OptimizerConfig oc;
  oc.batch_size = 8;
  Adam<float> adam(s.model, oc);
  Rng rng(2);
  std::size_t checked = 0;
  train_epoch<float>(s.model, s.examples, adam, rng, [&](const ForwardTape<float>& tape) {
    const auto& b = tape.batch;
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      const auto off = static_cast<std::size_t>(tape.offsets[static_cast<std::size_t>(j)]);
      const int steps = b.a_len[static_cast<std::size_t>(j)] - 1;
      for (int t = 0; t < steps; ++t) {
        ASSERT_EQ(tape.decoder_inputs[off + static_cast<std::size_t>(t)], b.a(t, j));
        ASSERT_EQ(tape.targets[off + static_cast<std::size_t>(t)], b.a(t + 1, j));
        ++checked;
      }
    }
  });
  std::size_t expected = 0;
  for (const auto& e : s.examples) expected += e.answer.size() - 1;
  EXPECT_EQ(checked, expected);
}

TEST(Train, GradientDependsOnGoldPrefix) {
  auto s = small_setup(10);
  EncodedExample e = s.examples.front();
  EncodedExample corrupted = e;
  ASSERT_GT(corrupted.answer.size(), 3u);
  corrupted.answer[2] = corrupted.answer[2] == Vocabulary::kUnk ? Vocabulary::kFuncode : Vocabulary::kUnk;

  auto grads_for = [&](const EncodedExample& ex) {
    std::vector<const EncodedExample*> ptrs{&ex};
    ForwardTape<float> tape;
    forward_loss(s.model, make_batch(ptrs), tape);
    Seq2SeqParams<float> g = s.model.params;
    g.set_zero();
    backward(s.model, tape, g);
    return g;
  };
  const auto g1 = grads_for(e);
  const auto g2 = grads_for(corrupted);
  EXPECT_FALSE(same_params(g1, g2));
  EXPECT_NE(g1.emb_a.col(e.answer[2]), g2.emb_a.col(e.answer[2]));
}

TEST(Train, SameSeedSameParameters) {
  auto a = small_setup(20);
  auto b = small_setup(20);
  TrainConfig tc;
  tc.epochs = 2;
  tc.batch_size = 16;
  const auto ma = train_model(a.model, a.tuples, tc, 5);
  const auto mb = train_model(b.model, b.tuples, tc, 5);
  EXPECT_TRUE(same_params(a.model.params, b.model.params));
  EXPECT_EQ(ma.back().mean_loss, mb.back().mean_loss);

  auto c = small_setup(20);
  train_model(c.model, c.tuples, tc, 6);
  EXPECT_FALSE(same_params(a.model.params, c.model.params));
}

TEST(Train, LossFallsOnMostEpochs) {
  auto s = small_setup(40);
  TrainConfig tc;
  tc.epochs = 6;
  tc.batch_size = 16;
  const auto metrics = train_model(s.model, s.tuples, tc, 3);
  ASSERT_EQ(metrics.size(), 6u);
  int decreases = 0;
  for (std::size_t k = 1; k < metrics.size(); ++k) decreases += metrics[k].mean_loss < metrics[k - 1].mean_loss;
  EXPECT_GE(decreases, 4);
  EXPECT_LT(metrics.back().mean_loss, metrics.front().mean_loss);
}

TEST(Train, NonFiniteLossAborts) {
  auto s = small_setup(10);
  s.model.params.out_b(0, 0) = std::numeric_limits<float>::quiet_NaN();
  OptimizerConfig oc;
  Adam<float> adam(s.model, oc);
  Rng rng(1);
  try {
    train_epoch(s.model, s.examples, adam, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonFiniteLoss);
  }
}

TEST(Train, BatchSizeMustBePositive) {
  auto s = small_setup(10);
  OptimizerConfig oc;
  oc.batch_size = 0;
  Adam<float> adam(s.model, oc);
  Rng rng(1);
  EXPECT_THROW(train_epoch(s.model, s.examples, adam, rng), Error);
}

TEST(Adam, FirstStepMovesEachEntryByLearningRate) {
  auto s = small_setup(10);
  Seq2SeqParams<float> grads = s.model.params;
  grads.for_each([](const char*, Matrix<float>& m) { m.setConstant(0.001f); });
  const auto before = s.model.params;
  OptimizerConfig oc;
  oc.learning_rate = 0.01;
  Adam<float> adam(s.model, oc);
  adam.step(s.model.params, grads);
  // With bias correction the first update is lr * g / |g| = lr per entry.
  EXPECT_NEAR(before.out_w(0, 0) - s.model.params.out_w(0, 0), 0.01f, 1e-4f);
  EXPECT_NEAR(before.emb_q(1, 2) - s.model.params.emb_q(1, 2), 0.01f, 1e-4f);
}

TEST(Adam, ClipsLargeGradients) {
  auto s = small_setup(10);
  Seq2SeqParams<float> grads = s.model.params;
  grads.for_each([](const char*, Matrix<float>& m) { m.setConstant(100.0f); });
  Adam<float> adam(s.model, {});
  const double norm = adam.step(s.model.params, grads);
  EXPECT_NEAR(norm, 100.0 * std::sqrt(static_cast<double>(s.model.params.parameter_count())), 1.0);
  EXPECT_TRUE(s.model.params.all_finite());
}

TEST(Batches, CoverEveryExampleOnce) {
  auto s = small_setup(20);
  Rng rng(3);
  const auto plan = plan_batches(s.examples, 7, rng);
  std::vector<int> seen(s.examples.size(), 0);
  for (const auto& b : plan) {
    EXPECT_LE(b.size(), 7u);
    for (auto i : b) ++seen[i];
  }
  for (int n : seen) EXPECT_EQ(n, 1);
}

}  // namespace
}  // namespace codeqa
