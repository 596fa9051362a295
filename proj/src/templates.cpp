#include <algorithm>
#include <regex>
#include <sstream>

#include "codeqa/qagen.hpp"

namespace codeqa {

std::string code(QuestionType q) { return "Q" + std::to_string(index(q) + 1); }

QuestionType parse_question_type(std::string_view text) {
  if (text.size() == 2 && (text[0] == 'Q' || text[0] == 'q') && text[1] >= '1' && text[1] <= '6') {
    return static_cast<QuestionType>(text[1] - '1');
  }
  throw Error(ErrorKind::BadTemplates, "unknown question type '" + std::string(text) + "'");
}

const std::set<std::string>& question_slots(QuestionType q) {
  static const std::array<std::set<std::string>, kNumQuestionTypes> slots = {{
      {"method"}, {"method", "ptype"}, {"method"}, {"method"}, {"method"}, {"method", "task"}}};
  return slots[index(q)];
}

const std::set<std::string>& answer_slots(QuestionType q) {
  static const std::array<std::set<std::string>, kNumQuestionTypes> slots = {{
      {"rtype"}, {"params"}, {"funcode"}, {"signature"}, {"summary"}, {"yesno"}}};
  return slots[index(q)];
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> slots_of(const std::string& layout) {
  static const std::regex slot_re(R"(\{([a-z_]+)\})");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(layout.begin(), layout.end(), slot_re); it != std::sregex_iterator(); ++it) {
    out.push_back((*it)[1].str());
  }
  if (layout.find("<funcode>") != std::string::npos) out.emplace_back("funcode");
  return out;
}

[[noreturn]] void bad(int line, const std::string& why) {
  throw Error(ErrorKind::BadTemplates, "templates line " + std::to_string(line) + ": " + why);
}

}  // namespace

TemplateSet parse_templates(const std::string& text) {
  TemplateSet set;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  std::optional<QuestionType> current;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      try {
        current = parse_question_type(line.substr(1, line.size() - 2));
      } catch (const Error&) {
        bad(line_no, "unknown section " + line);
      }
      continue;
    }
    if (!current) bad(line_no, "layout outside of a section");
    const auto colon = line.find(':');
    if (colon == std::string::npos) bad(line_no, "missing layout prefix");
    const std::string kind = line.substr(0, colon);
    const std::string layout = trim(std::string_view(line).substr(colon + 1));
    if (layout.empty()) bad(line_no, "empty layout");

    auto& group = set.groups[index(*current)];
    const bool is_question = kind == "q";
    const auto& allowed = is_question ? question_slots(*current) : answer_slots(*current);
    for (const auto& slot : slots_of(layout)) {
      if (!allowed.count(slot)) bad(line_no, "slot {" + slot + "} not allowed for " + code(*current));
    }
    if (is_question) {
      group.questions.push_back(layout);
    } else if (kind == "a") {
      group.answers.push_back(layout);
    } else if (kind == "a_empty" && *current == QuestionType::Parameters) {
      group.answers_empty.push_back(layout);
    } else if (kind == "a_ctor" && *current == QuestionType::ReturnType) {
      group.answers_ctor.push_back(layout);
    } else {
      bad(line_no, "unknown layout prefix '" + kind + "'");
    }
  }

  for (auto q : kAllQuestionTypes) {
    const auto& g = set.groups[index(q)];
    if (g.questions.size() < 15 || g.questions.size() > 25) {
      throw Error(ErrorKind::BadTemplates, code(q) + " needs 15-25 question layouts, has " +
                                               std::to_string(g.questions.size()));
    }
    if (g.answers.empty()) throw Error(ErrorKind::BadTemplates, code(q) + " has no answer layout");
  }
  if (set[QuestionType::Parameters].answers_empty.empty()) {
    throw Error(ErrorKind::BadTemplates, "Q2 needs an a_empty layout");
  }
  if (set[QuestionType::ReturnType].answers_ctor.empty()) {
    throw Error(ErrorKind::BadTemplates, "Q1 needs an a_ctor layout");
  }
  for (const auto& a : set[QuestionType::Definition].answers) {
    const TokenSeq tokens = tokenize(a);
    if (std::count(tokens.begin(), tokens.end(), tok::kFuncode) != 1) {
      throw Error(ErrorKind::BadTemplates, "Q3 answers must contain exactly one <funcode>");
    }
  }
  set.checksum = checksum_hex(text);
  return set;
}

TemplateSet load_templates(const std::string& path) { return parse_templates(read_file(path)); }

std::string default_templates_path() { return std::string(CODEQA_DATA_DIR) + "/templates.txt"; }

}  // namespace codeqa
