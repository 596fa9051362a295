#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace codeqa {

using TokenSeq = std::vector<std::string>;

namespace tok {
inline constexpr std::string_view kStart = "<st>";
inline constexpr std::string_view kEnd = "</s>";
inline constexpr std::string_view kFuncode = "<funcode>";
inline constexpr std::string_view kNewline = "nl";
inline constexpr std::string_view kStrLit = "<strlit>";
inline constexpr std::string_view kChrLit = "<chrlit>";
inline constexpr std::string_view kPad = "<pad>";
inline constexpr std::string_view kUnk = "<unk>";
}  // namespace tok

/// Lexes text into lowercase tokens. Punctuation is split into single
/// characters (except `...`), comments are dropped, string and char literals
/// collapse to `<strlit>` / `<chrlit>`. Identifiers are kept whole.
TokenSeq tokenize(std::string_view text);

/// Joins tokens with single spaces. tokenize(detokenize(t)) == t for any t
/// produced by tokenize.
std::string detokenize(const TokenSeq& tokens);

bool is_java_keyword(std::string_view token);
bool is_java_modifier(std::string_view token);

struct Parameter {
  TokenSeq type;
  std::string name;

  bool operator==(const Parameter&) const = default;
};

struct MethodFeatures {
  std::vector<std::string> modifiers;
  TokenSeq return_type;
  std::string name;
  std::vector<Parameter> params;
  TokenSeq signature_tokens;
  TokenSeq body_tokens;
  TokenSeq summary;
  bool is_constructor = false;
  /// Index of signature_tokens[0] within the method's code tokens (non-zero
  /// only when leading annotations precede the signature).
  std::size_t signature_offset = 0;
  /// Index of return_type[0] within signature_tokens (meaningless for
  /// constructors).
  std::size_t return_type_offset = 0;
};

/// Parses the declaration at the head of a Java method. Throws
/// Error(MalformedMethod) when no parameter list, name, or balanced body is
/// found.
MethodFeatures extract_features(std::string_view raw_source);

/// Splits a leading `/** ... */` or `/* ... */` comment off a method. The
/// first element is the comment text with decoration removed.
std::pair<std::string, std::string> split_doc_comment(std::string_view source);

/// First sentence of a doc comment, with javadoc tags dropped.
std::string summary_sentence(std::string_view doc);

struct MethodRecord {
  std::string id;
  std::string project;
  std::string raw_source;
  std::string summary_raw;
  MethodFeatures features;
  TokenSeq context_tokens;

  bool has_summary() const { return !features.summary.empty(); }
  /// Position of the first code token inside context_tokens.
  std::size_t code_offset() const { return features.summary.size() + 2; }
  /// Half-open [begin, end) range of the return type inside context_tokens.
  std::pair<std::size_t, std::size_t> return_type_span() const;
  std::pair<std::size_t, std::size_t> signature_span() const;
};

/// Builds a record: strips a leading doc comment from the source (using it as
/// the summary when summary is empty), extracts features and assembles the
/// `<st> summary nl code` context. Throws Error(MalformedMethod).
MethodRecord make_record(std::string id, std::string project,
                         std::string source, std::string summary);

}  // namespace codeqa
