#include <gtest/gtest.h>

#include <set>

#include "codeqa/corpus.hpp"
#include "codeqa/javatok.hpp"
#include "codeqa/synth.hpp"

namespace codeqa {
namespace {

TEST(Synth, DeterministicForSeed) {
  SynthOptions o;
  o.methods = 300;
  EXPECT_EQ(format_synth_corpus(synthesize_corpus(o)), format_synth_corpus(synthesize_corpus(o)));
  SynthOptions other = o;
  other.seed = 8;
  EXPECT_NE(format_synth_corpus(synthesize_corpus(o)), format_synth_corpus(synthesize_corpus(other)));
}

TEST(Synth, CountsAndProjects) {
  SynthOptions o;
  o.methods = 400;
  o.projects = 25;
  const auto methods = synthesize_corpus(o);
  ASSERT_EQ(methods.size(), 400u);
  std::set<std::string> projects, ids, summaries;
  for (const auto& m : methods) {
    projects.insert(m.project);
    ids.insert(m.id);
    summaries.insert(m.summary);
  }
  EXPECT_EQ(projects.size(), 25u);
  EXPECT_EQ(ids.size(), 400u);
  EXPECT_EQ(summaries.size(), 400u);
}

TEST(Synth, EveryMethodParses) {
  SynthOptions o;
  o.methods = 1000;
  const auto corpus = parse_corpus(format_synth_corpus(synthesize_corpus(o)));
  EXPECT_EQ(corpus.records.size(), 1000u);
  EXPECT_EQ(corpus.stats.malformed_lines, 0u);
  EXPECT_EQ(corpus.stats.malformed_methods, 0u);
}

TEST(Synth, SummaryRateLeavesSomeEmpty) {
  SynthOptions o;
  o.methods = 200;
  o.summary_rate = 0.5;
  std::size_t empty = 0;
  for (const auto& m : synthesize_corpus(o)) empty += m.summary.empty();
  EXPECT_GT(empty, 50u);
  EXPECT_LT(empty, 150u);
}

}  // namespace
}  // namespace codeqa
