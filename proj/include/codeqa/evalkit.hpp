#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "codeqa/javatok.hpp"
#include "codeqa/qagen.hpp"
#include "codeqa/seq2seq.hpp"
#include "codeqa/vocab.hpp"

namespace codeqa {

/// Oracle slot tokens an answer of type `q` must reproduce: the return type
/// (`constructor` for constructors), every parameter type and name (or
/// `no parameters`), the signature, or the summary phrase. Empty for Q3 and Q6.
TokenSeq slot_tokens(QuestionType q, const MethodRecord& rec);

/// Bag-of-tokens F1 between two sequences.
double token_f1(const TokenSeq& produced, const TokenSeq& gold);

inline constexpr double kDescriptionF1Threshold = 0.5;

/// Automated correctness of a sentinel-free answer against the extraction
/// oracle for `rec` and the generated gold tuple.
bool score_answer(QuestionType q, const TokenSeq& produced, const MethodRecord& rec, const QATuple& gold);

/// True when `needle` occurs as a contiguous run inside `haystack`.
bool contains_run(const TokenSeq& haystack, const TokenSeq& needle);

/// Argmax (lowest index on ties) of the final code_attn row falls in the
/// half-open span [first, second).
bool attention_focus(const AttentionTrace& trace, std::pair<std::size_t, std::size_t> span);

struct FailureSample {
  std::string method_id;
  TokenSeq question;
  TokenSeq expected_slot;
  TokenSeq produced;
  bool unk_in_answer = false;
  bool unk_in_question = false;
};

struct TypeReport {
  std::size_t n = 0;
  std::size_t n_correct = 0;
  /// Tuples left out because a slot token is outside the output vocabulary.
  std::size_t excluded = 0;
  std::size_t failures_unk_answer = 0;
  std::size_t failures_unk_question = 0;
  std::vector<FailureSample> failure_samples;

  double rate() const { return n == 0 ? 0.0 : static_cast<double>(n_correct) / static_cast<double>(n); }
};

struct CorrectnessReport {
  std::array<TypeReport, kNumQuestionTypes> per_type;
  std::size_t focus_n = 0;
  std::size_t focus_hits = 0;

  const TypeReport& operator[](QuestionType q) const { return per_type[index(q)]; }
  std::size_t n() const;
  std::size_t n_correct() const;
  double overall_rate() const;
  double focus_rate() const {
    return focus_n == 0 ? 0.0 : static_cast<double>(focus_hits) / static_cast<double>(focus_n);
  }
  /// Fraction of all failures whose answer / question contains `<unk>`.
  double unk_answer_failure_fraction() const;
  double unk_question_failure_fraction() const;
};

/// Among Q1, Q2, Q4, Q5 and Q6, Q1 and Q4 hold the two highest rates (dense
/// ranking) and Q5 the lowest. Q3 is not ranked.
bool has_expected_ordering(const CorrectnessReport& report);

struct Answer {
  TokenSeq tokens;
  std::optional<AttentionTrace> trace;
  bool unk_in_question = false;
};

using Answerer = std::function<Answer(const QATuple&)>;

struct EvalOptions {
  /// When set, tuples whose slot tokens are not all in this vocabulary are
  /// excluded (counted in TypeReport::excluded) instead of scored.
  const Vocabulary* in_vocab_filter = nullptr;
  std::size_t max_failure_samples = 20;
  /// Worker threads for answering; results do not depend on the count.
  unsigned threads = 1;
};

/// Answers every tuple, scores it and aggregates per question type. Q1
/// tuples of non-constructor methods that come back with a trace also feed
/// the attention-focus rate. Tuples whose method is unknown are skipped.
CorrectnessReport evaluate_split(const Answerer& answerer, const std::vector<QATuple>& tuples,
                                 const std::map<std::string, const MethodRecord*>& records,
                                 const EvalOptions& options = {});

/// Answerer backed by greedy inference on `model`.
template <typename Scalar>
Answerer model_answerer(const Seq2SeqModel<Scalar>& model) {
  return [&model](const QATuple& t) {
    InferResult r = infer(model, t.question, t.context, model.dims.max_a_len);
    return Answer{std::move(r.answer), std::move(r.trace), r.unk_fraction > 0.0};
  };
}

nlohmann::ordered_json report_to_json(const CorrectnessReport& report);
std::string report_table(const CorrectnessReport& report);

/// One answer's attention, ready for plotting or the chat UI.
struct HeatmapExport {
  std::string method_id;
  std::string qtype;
  TokenSeq question;
  TokenSeq answer;
  TokenSeq context;
  /// answer.size() rows by context.size() columns.
  Eigen::MatrixXd code_attn;
  /// answer.size() rows by question-length columns.
  Eigen::MatrixXd q_attn;
  std::optional<std::pair<std::size_t, std::size_t>> return_type_span;
  std::optional<std::pair<std::size_t, std::size_t>> signature_span;
};

HeatmapExport make_heatmap(const InferResult& result, const QATuple& tuple, const MethodRecord& rec);
nlohmann::ordered_json heatmap_to_json(const HeatmapExport& h);
HeatmapExport heatmap_from_json(const nlohmann::json& j);
void export_heatmap(const HeatmapExport& h, const std::string& path);
HeatmapExport read_heatmap(const std::string& path);

}  // namespace codeqa
