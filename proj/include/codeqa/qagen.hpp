#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "codeqa/common.hpp"
#include "codeqa/corpus.hpp"
#include "codeqa/javatok.hpp"

namespace codeqa {

/// Known-subroutine question types. Questions that require searching for an
/// unknown method are deliberately not representable.
enum class QuestionType : int { ReturnType = 0, Parameters, Definition, Signature, Description, Capability };

inline constexpr std::size_t kNumQuestionTypes = 6;
inline constexpr std::array<QuestionType, kNumQuestionTypes> kAllQuestionTypes = {
    QuestionType::ReturnType,  QuestionType::Parameters,  QuestionType::Definition,
    QuestionType::Signature,   QuestionType::Description, QuestionType::Capability};

/// "Q1".."Q6".
std::string code(QuestionType q);
QuestionType parse_question_type(std::string_view code);
inline std::size_t index(QuestionType q) { return static_cast<std::size_t>(q); }

/// Paraphrase layouts for one question type. Slots are `{name}` placeholders.
struct TemplateGroup {
  std::vector<std::string> questions;
  std::vector<std::string> answers;
  /// Q2 only: used when the method takes no parameters.
  std::vector<std::string> answers_empty;
  /// Q1 only: used for constructors.
  std::vector<std::string> answers_ctor;
};

struct TemplateSet {
  std::array<TemplateGroup, kNumQuestionTypes> groups;
  std::string checksum;

  const TemplateGroup& operator[](QuestionType q) const { return groups[index(q)]; }
};

/// Parses the template file format:
///
///   # comment
///   [Q1]
///   q: what is the return type of {method} ?
///   a: the return type for this method is {rtype}
///   a_ctor: this method is a constructor
///
/// Validates layout counts (15..25 questions per type) and slot usage.
/// Throws Error(BadTemplates).
TemplateSet parse_templates(const std::string& text);
TemplateSet load_templates(const std::string& path);
std::string default_templates_path();

/// Slots each question type may use in its question and answer layouts.
const std::set<std::string>& question_slots(QuestionType q);
const std::set<std::string>& answer_slots(QuestionType q);

struct QATuple {
  TokenSeq question;
  TokenSeq answer;
  TokenSeq context;
  QuestionType qtype = QuestionType::ReturnType;
  std::string method_id;
  int template_id = 0;
  bool is_negative = false;
};

/// The summary as it is phrased inside answers: leading "this method" style
/// openers removed.
TokenSeq summary_phrase(const TokenSeq& summary);
/// The summary turned into an imperative task ("sets the x" -> "set the x").
TokenSeq task_phrase(const TokenSeq& summary);
/// `type ident , type ident` rendering of a parameter list.
TokenSeq params_phrase(const std::vector<Parameter>& params);

struct RenderedQuestion {
  TokenSeq question;
  int template_id = 0;
};

/// Picks one question layout uniformly and fills its slots. `task` overrides
/// the capability phrase (used for negatives). Throws Error(MissingSummary)
/// for Q5/Q6 when the method has no summary.
RenderedQuestion render_question(QuestionType q, const MethodRecord& rec, const TemplateSet& templates,
                                 Rng& rng, const TokenSeq* task = nullptr);

/// Renders `<st> ... </s>`. For Q6, a present negative_summary yields "no".
TokenSeq render_answer(QuestionType q, const MethodRecord& rec, const TemplateSet& templates,
                       const TokenSeq* negative_summary, Rng& rng);

/// A summary from another method of the same project with a different name
/// and a different summary. Throws Error(NoNegativeAvailable).
TokenSeq sample_negative_summary(const MethodRecord& rec, const std::vector<const MethodRecord*>& pool,
                                 Rng& rng);

struct SkipReason {
  QuestionType qtype;
  ErrorKind reason;
};

struct GeneratedTuples {
  std::vector<QATuple> tuples;
  std::vector<SkipReason> skipped;
};

/// Q1-Q5 once each plus a positive and (unless `negatives` is off) a negative
/// Q6, skipping types the record cannot support.
GeneratedTuples generate_tuples(const MethodRecord& rec, const TemplateSet& templates,
                                const std::vector<const MethodRecord*>& pool, Rng& rng, bool negatives = true);

struct CorpusGeneration {
  std::vector<QATuple> tuples;
  std::array<std::size_t, kNumQuestionTypes> per_type{};
  std::map<std::string, std::size_t> skips;  // "Q5:MissingSummary" -> count
  std::size_t q6_yes = 0;
  std::size_t q6_no = 0;
};

/// Runs generate_tuples over every record with per-method RNG streams derived
/// from (seed, method id); output follows record order.
CorpusGeneration generate_corpus(const std::vector<MethodRecord>& records, const TemplateSet& templates,
                                 std::uint64_t seed, bool negatives = true);

struct FilterStats {
  std::size_t duplicates = 0;
  std::size_t non_descriptive = 0;
};

/// True for stub-like summaries (todo markers, generated stubs, fewer than
/// three word tokens).
bool is_non_descriptive(const TokenSeq& summary);

/// Drops records whose summary duplicates an earlier record's and records
/// with non-descriptive summaries. Records without any summary are kept; they
/// still support Q1-Q4.
std::vector<MethodRecord> filter_corpus(std::vector<MethodRecord> records, FilterStats* stats = nullptr);

enum class Split { Train, Validation, Test };
std::string to_string(Split s);
std::optional<Split> parse_split(std::string_view s);

struct SplitRatios {
  double train = 0.90;
  double validation = 0.05;
  double test = 0.05;
};

struct SplitAssignment {
  std::map<std::string, Split> project_split;
  std::map<std::string, Split> method_split;
  std::array<std::size_t, 3> method_counts{};

  std::optional<Split> split_of_method(const std::string& id) const;
};

/// Project-disjoint split. Throws Error(TooFewProjects) below three projects.
SplitAssignment split_corpus(const std::vector<MethodRecord>& records, SplitRatios ratios, std::uint64_t seed);

/// `method_id<TAB>project<TAB>split` lines, in record order.
std::string format_split(const std::vector<MethodRecord>& records, const SplitAssignment& split);
SplitAssignment parse_split_file(const std::string& text);

/// One JSON object per line: qtype, question, answer, context, method_id,
/// template_id, is_negative.
std::string tuple_line(const QATuple& t);
QATuple parse_tuple_line(const std::string& line);
std::string format_tuples(const std::vector<QATuple>& tuples);
std::vector<QATuple> parse_tuples(const std::string& text);

}  // namespace codeqa
