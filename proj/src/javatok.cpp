#include "codeqa/javatok.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "codeqa/common.hpp"

namespace codeqa {
namespace {

constexpr std::array kSpecialTokens = {tok::kStart,  tok::kEnd,    tok::kFuncode,
                                       tok::kStrLit, tok::kChrLit, tok::kPad,
                                       tok::kUnk};

constexpr std::array<std::string_view, 51> kKeywords = {
    "abstract", "assert",     "boolean",   "break",      "byte",     "case",
    "catch",    "char",       "class",     "const",      "continue", "default",
    "do",       "double",     "else",      "enum",       "extends",  "final",
    "finally",  "float",      "for",       "goto",       "if",       "implements",
    "import",   "instanceof", "int",       "interface",  "long",     "native",
    "new",      "package",    "private",   "protected",  "public",   "return",
    "short",    "static",     "strictfp",  "super",      "switch",   "synchronized",
    "this",     "throw",      "throws",    "transient",  "try",      "void",
    "volatile", "while",      "var"};

constexpr std::array<std::string_view, 12> kModifiers = {
    "public",   "protected",    "private", "static",   "final",    "abstract",
    "synchronized", "native",   "strictfp", "default", "transient", "volatile"};

bool is_space(unsigned char c) { return c <= 0x20 || c == 0x7f; }
bool is_ident_start(unsigned char c) {
  return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}
bool is_ident_part(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '$' || c >= 0x80;
}

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xe) return 3;
  if ((lead >> 3) == 0x1e) return 4;
  return 1;
}

// Length of a char literal starting at text[i] == '\'', or 0 when the quote
// does not open one.
std::size_t char_literal_length(std::string_view text, std::size_t i) {
  const std::size_t n = text.size();
  if (i + 2 >= n) return 0;
  if (text[i + 1] == '\\') {
    std::size_t j = i + 3;
    while (j < n && j - i <= 8 && text[j] != '\'' &&
           std::isalnum(static_cast<unsigned char>(text[j]))) {
      ++j;
    }
    return (j < n && text[j] == '\'') ? j - i + 1 : 0;
  }
  const auto c = static_cast<unsigned char>(text[i + 1]);
  if (c == '\'' || c == '\n' || c == '\r') return 0;
  const std::size_t len = utf8_length(c);
  if (i + 1 + len < n && text[i + 1 + len] == '\'') return len + 2;
  return 0;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool is_identifier(std::string_view t) {
  return !t.empty() && is_ident_start(static_cast<unsigned char>(t[0]));
}

}  // namespace

bool is_java_keyword(std::string_view token) {
  return std::find(kKeywords.begin(), kKeywords.end(), token) != kKeywords.end();
}

bool is_java_modifier(std::string_view token) {
  return std::find(kModifiers.begin(), kModifiers.end(), token) != kModifiers.end();
}

TokenSeq tokenize(std::string_view text) {
  TokenSeq out;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '/') {
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '*') {
      const auto end = text.find("*/", i + 2);
      i = end == std::string_view::npos ? n : end + 2;
      continue;
    }
    if (c == '"') {
      if (text.substr(i, 3) == "\"\"\"") {
        const auto end = text.find("\"\"\"", i + 3);
        i = end == std::string_view::npos ? n : end + 3;
      } else {
        std::size_t j = i + 1;
        while (j < n && text[j] != '"') j += (text[j] == '\\') ? 2 : 1;
        i = std::min(n, j + 1);
      }
      out.emplace_back(tok::kStrLit);
      continue;
    }
    if (c == '\'') {
      if (const auto len = char_literal_length(text, i); len > 0) {
        out.emplace_back(tok::kChrLit);
        i += len;
      } else {
        ++i;  // stray quote
      }
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t j = i + 1;
      while (j < n) {
        const auto d = static_cast<unsigned char>(text[j]);
        if (is_ident_part(d)) {
          ++j;
        } else if (d == '\'' && j + 1 < n &&
                   std::isalpha(static_cast<unsigned char>(text[j + 1])) &&
                   std::isalpha(static_cast<unsigned char>(text[j - 1]))) {
          ++j;  // contractions such as what's
        } else {
          break;
        }
      }
      out.push_back(lower(text.substr(i, j - i)));
      i = j;
      continue;
    }
    if (std::isdigit(c)) {
      const bool hex = c == '0' && i + 1 < n && (text[i + 1] == 'x' || text[i + 1] == 'X');
      std::size_t j = i + 1;
      while (j < n) {
        const auto d = static_cast<unsigned char>(text[j]);
        if (std::isalnum(d) || d == '_') {
          ++j;
        } else if (d == '.' && !(j + 1 < n && text[j + 1] == '.')) {
          ++j;
        } else if ((d == '+' || d == '-') &&
                   ((!hex && (text[j - 1] == 'e' || text[j - 1] == 'E')) ||
                    (hex && (text[j - 1] == 'p' || text[j - 1] == 'P')))) {
          ++j;
        } else {
          break;
        }
      }
      out.push_back(lower(text.substr(i, j - i)));
      i = j;
      continue;
    }
    if (c == '.' && text.substr(i, 3) == "...") {
      out.emplace_back("...");
      i += 3;
      continue;
    }
    if (c == '<') {
      bool matched = false;
      for (auto special : kSpecialTokens) {
        if (text.substr(i, special.size()) == special) {
          out.emplace_back(special);
          i += special.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    out.emplace_back(1, static_cast<char>(c));
    ++i;
  }
  return out;
}

std::string detokenize(const TokenSeq& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

namespace {

struct Cursor {
  const TokenSeq& t;
  std::size_t i = 0;

  bool at(std::string_view s) const { return i < t.size() && t[i] == s; }
  bool done() const { return i >= t.size(); }
};

[[noreturn]] void malformed(const std::string& why) {
  throw Error(ErrorKind::MalformedMethod, "malformed method: " + why);
}

// Index just past the bracket matching the opener at `open`, or npos.
std::size_t match_bracket(const TokenSeq& t, std::size_t open, std::string_view lhs,
                          std::string_view rhs) {
  int depth = 0;
  for (std::size_t k = open; k < t.size(); ++k) {
    if (t[k] == lhs) ++depth;
    if (t[k] == rhs && --depth == 0) return k + 1;
  }
  return std::string_view::npos;
}

// Skips `@name(.name)*` and an optional argument list.
void skip_annotation(Cursor& c) {
  ++c.i;  // '@'
  if (!c.done() && is_identifier(c.t[c.i])) ++c.i;
  while (c.at(".") && c.i + 1 < c.t.size() && is_identifier(c.t[c.i + 1])) c.i += 2;
  if (c.at("(")) {
    const auto end = match_bracket(c.t, c.i, "(", ")");
    if (end == std::string_view::npos) malformed("unterminated annotation arguments");
    c.i = end;
  }
}

Parameter parse_param(TokenSeq tokens) {
  Cursor c{tokens};
  while (!c.done() && (c.at("@") || c.at("final"))) {
    if (c.at("@")) {
      skip_annotation(c);
    } else {
      ++c.i;
    }
  }
  TokenSeq rest(tokens.begin() + static_cast<std::ptrdiff_t>(c.i), tokens.end());
  // C-style dimensions after the identifier move onto the type.
  std::size_t dims = 0;
  while (rest.size() >= 3 && rest[rest.size() - 1] == "]" && rest[rest.size() - 2] == "[") {
    rest.resize(rest.size() - 2);
    ++dims;
  }
  if (rest.size() < 2 || !is_identifier(rest.back()) || is_java_keyword(rest.back())) {
    malformed("bad parameter '" + detokenize(tokens) + "'");
  }
  Parameter p;
  p.name = rest.back();
  p.type.assign(rest.begin(), rest.end() - 1);
  for (std::size_t d = 0; d < dims; ++d) {
    p.type.emplace_back("[");
    p.type.emplace_back("]");
  }
  return p;
}

}  // namespace

MethodFeatures extract_features(std::string_view raw_source) {
  const TokenSeq t = tokenize(raw_source);
  Cursor c{t};
  while (c.at("@") && !(c.i + 1 < t.size() && t[c.i + 1] == "interface")) skip_annotation(c);
  const std::size_t sig_start = c.i;

  std::size_t open = std::string_view::npos;
  while (!c.done()) {
    if (c.at("@")) {
      skip_annotation(c);
      continue;
    }
    if (c.at("(")) {
      open = c.i;
      break;
    }
    if (c.at("{") || c.at(";") || c.at("=")) break;
    ++c.i;
  }
  if (open == std::string_view::npos) malformed("no parameter list");
  if (open == sig_start) malformed("missing method name");
  const std::string& name = t[open - 1];
  if (!is_identifier(name) || is_java_keyword(name)) malformed("missing method name");

  MethodFeatures f;
  f.name = name;
  f.signature_offset = sig_start;
  for (std::size_t k = sig_start; k + 1 < open;) {
    if (t[k] == "@") {
      Cursor a{t, k};
      skip_annotation(a);
      k = a.i;
      continue;
    }
    if (f.return_type.empty() && is_java_modifier(t[k])) {
      f.modifiers.push_back(t[k++]);
      continue;
    }
    if (f.return_type.empty() && t[k] == "<") {
      const auto end = match_bracket(t, k, "<", ">");
      if (end == std::string_view::npos || end > open) malformed("bad type parameters");
      k = end;
      continue;
    }
    if (f.return_type.empty()) f.return_type_offset = k - sig_start;
    f.return_type.push_back(t[k++]);
  }
  if (f.return_type.empty()) {
    f.is_constructor = true;
    f.return_type = {name};
    f.return_type_offset = open - 1 - sig_start;
  }

  const auto close_end = match_bracket(t, open, "(", ")");
  if (close_end == std::string_view::npos) malformed("unterminated parameter list");
  const std::size_t close = close_end - 1;

  TokenSeq current;
  int depth = 0;
  for (std::size_t k = open + 1; k < close; ++k) {
    const auto& tk = t[k];
    if (tk == "<" || tk == "[" || tk == "(") ++depth;
    if (tk == ">" || tk == "]" || tk == ")") --depth;
    if (tk == "," && depth == 0) {
      f.params.push_back(parse_param(std::move(current)));
      current.clear();
      continue;
    }
    current.push_back(tk);
  }
  if (!current.empty()) f.params.push_back(parse_param(std::move(current)));
  if (f.params.empty() && close != open + 1) malformed("empty parameter declaration");

  f.signature_tokens.assign(t.begin() + static_cast<std::ptrdiff_t>(sig_start),
                            t.begin() + static_cast<std::ptrdiff_t>(close_end));

  std::size_t k = close_end;
  while (k < t.size() && t[k] != "{" && t[k] != ";") ++k;
  if (k < t.size() && t[k] == "{") {
    const auto body_end = match_bracket(t, k, "{", "}");
    if (body_end == std::string_view::npos) malformed("unbalanced braces");
    f.body_tokens.assign(t.begin() + static_cast<std::ptrdiff_t>(k),
                         t.begin() + static_cast<std::ptrdiff_t>(body_end));
  } else if (k >= t.size()) {
    malformed("missing body");
  }
  const auto opens = std::count(t.begin(), t.end(), "{");
  const auto closes = std::count(t.begin(), t.end(), "}");
  if (opens != closes) malformed("unbalanced braces");
  return f;
}

std::pair<std::string, std::string> split_doc_comment(std::string_view source) {
  std::size_t i = 0;
  while (i < source.size() && is_space(static_cast<unsigned char>(source[i]))) ++i;
  if (source.substr(i, 2) != "/*") return {"", std::string(source)};
  const auto end = source.find("*/", i + 2);
  if (end == std::string_view::npos) return {"", std::string(source)};

  std::string body(source.substr(i + 2, end - i - 2));
  std::string doc;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    auto nl = body.find('\n', pos);
    if (nl == std::string::npos) nl = body.size();
    std::string_view line(body.data() + pos, nl - pos);
    std::size_t s = 0;
    while (s < line.size() && (is_space(static_cast<unsigned char>(line[s])) || line[s] == '*')) ++s;
    line.remove_prefix(s);
    if (!line.empty()) {
      if (!doc.empty()) doc.push_back('\n');
      doc.append(line);
    }
    pos = nl + 1;
  }
  return {doc, std::string(source.substr(end + 2))};
}

std::string summary_sentence(std::string_view doc) {
  std::string text;
  std::size_t pos = 0;
  while (pos < doc.size()) {
    auto nl = doc.find('\n', pos);
    if (nl == std::string_view::npos) nl = doc.size();
    auto line = doc.substr(pos, nl - pos);
    if (!line.empty() && line[0] == '@') break;
    if (!text.empty()) text.push_back(' ');
    text.append(line);
    pos = nl + 1;
  }
  for (std::size_t k = 0; k < text.size(); ++k) {
    if (text[k] == '.' && (k + 1 == text.size() || is_space(static_cast<unsigned char>(text[k + 1])))) {
      return text.substr(0, k);
    }
  }
  return text;
}

std::pair<std::size_t, std::size_t> MethodRecord::return_type_span() const {
  const std::size_t begin =
      code_offset() + features.signature_offset + features.return_type_offset;
  return {begin, begin + (features.is_constructor ? 1 : features.return_type.size())};
}

std::pair<std::size_t, std::size_t> MethodRecord::signature_span() const {
  const std::size_t begin = code_offset() + features.signature_offset;
  return {begin, begin + features.signature_tokens.size()};
}

MethodRecord make_record(std::string id, std::string project, std::string source,
                         std::string summary) {
  auto [doc, code] = split_doc_comment(source);
  if (summary.empty() && !doc.empty()) summary = summary_sentence(doc);

  MethodRecord rec;
  rec.id = std::move(id);
  rec.project = std::move(project);
  rec.features = extract_features(code);
  rec.raw_source = std::move(code);
  rec.summary_raw = std::move(summary);

  TokenSeq summary_tokens = tokenize(rec.summary_raw);
  while (!summary_tokens.empty() && summary_tokens.back() == ".") summary_tokens.pop_back();
  rec.features.summary = summary_tokens;

  rec.context_tokens.reserve(summary_tokens.size() + 64);
  rec.context_tokens.emplace_back(tok::kStart);
  rec.context_tokens.insert(rec.context_tokens.end(), summary_tokens.begin(), summary_tokens.end());
  rec.context_tokens.emplace_back(tok::kNewline);
  const TokenSeq code_tokens = tokenize(rec.raw_source);
  rec.context_tokens.insert(rec.context_tokens.end(), code_tokens.begin(), code_tokens.end());
  return rec;
}

}  // namespace codeqa
