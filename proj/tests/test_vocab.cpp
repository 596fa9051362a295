#include <gtest/gtest.h>

#include "codeqa/common.hpp"
#include "codeqa/qagen.hpp"
#include "codeqa/vocab.hpp"

namespace codeqa {
namespace {

QATuple tuple(const std::string& q, const std::string& a, const std::string& c) {
  QATuple t;
  t.question = tokenize(q);
  t.answer = tokenize(a);
  t.context = tokenize(c);
  return t;
}

TEST(Vocabulary, ReservedIdsFirst) {
  const Vocabulary v;
  ASSERT_EQ(v.size(), Vocabulary::kReserved);
  EXPECT_EQ(v.token(0), "<pad>");
  EXPECT_EQ(v.token(1), "<unk>");
  EXPECT_EQ(v.id("<st>"), Vocabulary::kStart);
  EXPECT_EQ(v.id("</s>"), Vocabulary::kEnd);
  EXPECT_EQ(v.id("<funcode>"), Vocabulary::kFuncode);
  EXPECT_EQ(v.id("nl"), Vocabulary::kNewline);
}

TEST(Vocabulary, FrequencyCapKeepsMostFrequent) {
  std::vector<QATuple> train{tuple("the the the a", "<st> yes </s>", "x"), tuple("a b", "<st> yes </s>", "")};
  const auto [in, out] = build_vocab(train, 7, 7);
  ASSERT_EQ(in.size(), 7u);
  EXPECT_TRUE(in.contains("the"));
  EXPECT_FALSE(in.contains("a"));
  EXPECT_EQ(in.id("b"), Vocabulary::kUnk);
  EXPECT_EQ(out.size(), 7u);
  EXPECT_TRUE(out.contains("yes"));
}

TEST(Vocabulary, TiesBrokenLexicographically) {
  std::vector<QATuple> train{tuple("zeta alpha mid", "<st> a </s>", "")};
  const auto [in, out] = build_vocab(train, 8, 10);
  EXPECT_EQ(in.token(6), "alpha");
  EXPECT_EQ(in.token(7), "mid");
}

TEST(Vocabulary, EncodeDecodeWithUnknowns) {
  std::vector<QATuple> train{tuple("what is it", "<st> it </s>", "int f")};
  const auto [in, out] = build_vocab(train, 100, 100);
  const auto ids = in.encode(tokenize("what is zzz"));
  EXPECT_EQ(ids[2], Vocabulary::kUnk);
  EXPECT_EQ(in.decode(ids), (TokenSeq{"what", "is", "<unk>"}));
}

TEST(Vocabulary, DeterministicBuild) {
  std::vector<QATuple> train{tuple("b a c a", "<st> x y </s>", "p q r p"), tuple("c c", "<st> y </s>", "q")};
  const auto a = build_vocab(train, 9, 8);
  const auto b = build_vocab(train, 9, 8);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
  EXPECT_EQ(a.first.checksum(), b.first.checksum());
}

TEST(Vocabulary, EmptyTrainingSplit) {
  try {
    build_vocab({}, 100, 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyCorpus);
  }
}

TEST(Vocabulary, TooSmallCapRejected) {
  std::vector<QATuple> train{tuple("a", "<st> b </s>", "")};
  EXPECT_THROW(build_vocab(train, 4, 10), std::invalid_argument);
}

TEST(Vocabulary, ExplicitListValidated) {
  EXPECT_THROW(Vocabulary({"a", "b"}), std::invalid_argument);
  EXPECT_NO_THROW(Vocabulary({"<pad>", "<unk>", "<st>", "</s>", "<funcode>", "nl", "x"}));
  EXPECT_THROW(Vocabulary({"<pad>", "<unk>", "<st>", "</s>", "<funcode>", "nl", "x", "x"}), std::invalid_argument);
}

}  // namespace
}  // namespace codeqa
