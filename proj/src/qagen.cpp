#include "codeqa/qagen.hpp"

#include <algorithm>
#include <json.hpp>
#include <sstream>

namespace codeqa {
namespace {

bool starts_with(const TokenSeq& t, std::initializer_list<std::string_view> prefix) {
  if (t.size() < prefix.size()) return false;
  return std::equal(prefix.begin(), prefix.end(), t.begin());
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string base_form(const std::string& verb) {
  if (verb == "is") return "be";
  if (verb == "has") return "have";
  if (verb == "does") return "do";
  if (verb.size() > 4 && ends_with(verb, "ies")) return verb.substr(0, verb.size() - 3) + "y";
  for (auto suffix : {"sses", "shes", "ches", "xes", "zes", "oes"}) {
    if (ends_with(verb, suffix)) return verb.substr(0, verb.size() - 2);
  }
  if (verb.size() > 2 && ends_with(verb, "s") && !ends_with(verb, "ss") && !ends_with(verb, "us")) {
    return verb.substr(0, verb.size() - 1);
  }
  return verb;
}

void replace_all(std::string& s, std::string_view from, const std::string& to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

bool needs_summary(QuestionType q) {
  return q == QuestionType::Description || q == QuestionType::Capability;
}

void require_summary(QuestionType q, const MethodRecord& rec) {
  if (needs_summary(q) && !rec.has_summary()) {
    throw Error(ErrorKind::MissingSummary, code(q) + " needs a summary for " + rec.id);
  }
}

}  // namespace

TokenSeq summary_phrase(const TokenSeq& summary) {
  TokenSeq out = summary;
  if (starts_with(out, {"this", "method"}) || starts_with(out, {"this", "function"})) {
    out.erase(out.begin(), out.begin() + 2);
  } else if (starts_with(out, {"method"}) || starts_with(out, {"function"})) {
    out.erase(out.begin());
  }
  while (!out.empty() && out.back() == ".") out.pop_back();
  return out.empty() ? summary : out;
}

TokenSeq task_phrase(const TokenSeq& summary) {
  TokenSeq out = summary_phrase(summary);
  if (!out.empty()) out.front() = base_form(out.front());
  return out;
}

TokenSeq params_phrase(const std::vector<Parameter>& params) {
  TokenSeq out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out.emplace_back(",");
    out.insert(out.end(), params[i].type.begin(), params[i].type.end());
    out.push_back(params[i].name);
  }
  return out;
}

RenderedQuestion render_question(QuestionType q, const MethodRecord& rec, const TemplateSet& templates,
                                 Rng& rng, const TokenSeq* task) {
  require_summary(q, rec);
  const auto& layouts = templates[q].questions;
  RenderedQuestion out;
  out.template_id = static_cast<int>(rng.below(layouts.size()));
  std::string text = layouts[static_cast<std::size_t>(out.template_id)];
  replace_all(text, "{method}", rec.features.name);
  if (q == QuestionType::Capability) {
    replace_all(text, "{task}", detokenize(task ? *task : task_phrase(rec.features.summary)));
  }
  if (q == QuestionType::Parameters && !rec.features.params.empty()) {
    replace_all(text, "{ptype}", detokenize(rec.features.params.front().type));
  }
  out.question = tokenize(text);
  return out;
}

TokenSeq render_answer(QuestionType q, const MethodRecord& rec, const TemplateSet& templates,
                       const TokenSeq* negative_summary, Rng& rng) {
  require_summary(q, rec);
  const auto& group = templates[q];
  const std::vector<std::string>* layouts = &group.answers;
  if (q == QuestionType::ReturnType && rec.features.is_constructor) layouts = &group.answers_ctor;
  if (q == QuestionType::Parameters && rec.features.params.empty()) layouts = &group.answers_empty;
  std::string text = (*layouts)[layouts->size() > 1 ? rng.below(layouts->size()) : 0];

  const auto& f = rec.features;
  switch (q) {
    case QuestionType::ReturnType: replace_all(text, "{rtype}", detokenize(f.return_type)); break;
    case QuestionType::Parameters: replace_all(text, "{params}", detokenize(params_phrase(f.params))); break;
    case QuestionType::Definition: break;
    case QuestionType::Signature: replace_all(text, "{signature}", detokenize(f.signature_tokens)); break;
    case QuestionType::Description: replace_all(text, "{summary}", detokenize(summary_phrase(f.summary))); break;
    case QuestionType::Capability: replace_all(text, "{yesno}", negative_summary ? "no" : "yes"); break;
  }
  TokenSeq out{std::string(tok::kStart)};
  const TokenSeq body = tokenize(text);
  out.insert(out.end(), body.begin(), body.end());
  out.emplace_back(tok::kEnd);
  return out;
}

TokenSeq sample_negative_summary(const MethodRecord& rec, const std::vector<const MethodRecord*>& pool,
                                 Rng& rng) {
  std::vector<const MethodRecord*> candidates;
  for (const auto* other : pool) {
    if (other->project != rec.project || other->id == rec.id) continue;
    if (other->features.name == rec.features.name) continue;
    if (!other->has_summary() || other->features.summary == rec.features.summary) continue;
    candidates.push_back(other);
  }
  if (candidates.empty()) {
    throw Error(ErrorKind::NoNegativeAvailable, "no negative summary for " + rec.id);
  }
  return candidates[rng.below(candidates.size())]->features.summary;
}

GeneratedTuples generate_tuples(const MethodRecord& rec, const TemplateSet& templates,
                                const std::vector<const MethodRecord*>& pool, Rng& rng, bool negatives) {
  GeneratedTuples out;
  auto make = [&](QuestionType q, RenderedQuestion question, TokenSeq answer, bool negative) {
    QATuple t;
    t.question = std::move(question.question);
    t.answer = std::move(answer);
    t.context = rec.context_tokens;
    t.qtype = q;
    t.method_id = rec.id;
    t.template_id = question.template_id;
    t.is_negative = negative;
    out.tuples.push_back(std::move(t));
  };

  for (auto q : kAllQuestionTypes) {
    if (needs_summary(q) && !rec.has_summary()) {
      out.skipped.push_back({q, ErrorKind::MissingSummary});
      if (q == QuestionType::Capability) out.skipped.push_back({q, ErrorKind::MissingSummary});
      continue;
    }
    auto question = render_question(q, rec, templates, rng);
    auto answer = render_answer(q, rec, templates, nullptr, rng);
    make(q, std::move(question), std::move(answer), false);

    if (q == QuestionType::Capability && negatives) {
      try {
        const TokenSeq negative = sample_negative_summary(rec, pool, rng);
        const TokenSeq task = task_phrase(negative);
        auto neg_question = render_question(q, rec, templates, rng, &task);
        auto neg_answer = render_answer(q, rec, templates, &negative, rng);
        make(q, std::move(neg_question), std::move(neg_answer), true);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoNegativeAvailable) throw;
        out.skipped.push_back({q, e.kind()});
      }
    }
  }
  return out;
}

CorpusGeneration generate_corpus(const std::vector<MethodRecord>& records, const TemplateSet& templates,
                                 std::uint64_t seed, bool negatives) {
  std::map<std::string, std::vector<const MethodRecord*>> by_project;
  for (const auto& rec : records) by_project[rec.project].push_back(&rec);

  CorpusGeneration gen;
  gen.tuples.reserve(records.size() * 7);
  for (const auto& rec : records) {
    Rng rng = Rng::derive(seed, rec.id);
    auto result = generate_tuples(rec, templates, by_project[rec.project], rng, negatives);
    for (auto& t : result.tuples) {
      ++gen.per_type[index(t.qtype)];
      if (t.qtype == QuestionType::Capability) ++(t.is_negative ? gen.q6_no : gen.q6_yes);
      gen.tuples.push_back(std::move(t));
    }
    for (const auto& s : result.skipped) {
      ++gen.skips[code(s.qtype) + ":" + std::string(to_string(s.reason))];
    }
  }
  return gen;
}

bool is_non_descriptive(const TokenSeq& summary) {
  std::size_t words = 0;
  for (const auto& t : summary) {
    if (t == "todo" || t == "fixme" || t == "autogenerated") return true;
    if (!t.empty() && std::isalnum(static_cast<unsigned char>(t[0]))) ++words;
  }
  for (std::size_t i = 0; i + 2 < summary.size(); ++i) {
    if (summary[i] == "auto" && summary[i + 1] == "-" && summary[i + 2] == "generated") return true;
    if (summary[i] == "generated" && summary[i + 1] == "method" && summary[i + 2] == "stub") return true;
  }
  return words < 3;
}

std::vector<MethodRecord> filter_corpus(std::vector<MethodRecord> records, FilterStats* stats) {
  FilterStats local;
  std::set<TokenSeq> seen;
  std::vector<MethodRecord> kept;
  kept.reserve(records.size());
  for (auto& rec : records) {
    if (rec.has_summary()) {
      if (is_non_descriptive(rec.features.summary)) {
        ++local.non_descriptive;
        continue;
      }
      if (!seen.insert(rec.features.summary).second) {
        ++local.duplicates;
        continue;
      }
    }
    kept.push_back(std::move(rec));
  }
  if (stats) *stats = local;
  return kept;
}

std::string to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "val";
    case Split::Test: return "test";
  }
  return "train";
}

std::optional<Split> parse_split(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "val" || s == "validation") return Split::Validation;
  if (s == "test") return Split::Test;
  return std::nullopt;
}

std::optional<Split> SplitAssignment::split_of_method(const std::string& id) const {
  const auto it = method_split.find(id);
  if (it == method_split.end()) return std::nullopt;
  return it->second;
}

SplitAssignment split_corpus(const std::vector<MethodRecord>& records, SplitRatios ratios, std::uint64_t seed) {
  std::map<std::string, std::size_t> sizes;
  for (const auto& rec : records) ++sizes[rec.project];
  if (sizes.size() < 3) {
    throw Error(ErrorKind::TooFewProjects,
                "need at least 3 projects for a project-disjoint split, got " + std::to_string(sizes.size()));
  }
  std::vector<std::string> projects;
  for (const auto& [name, n] : sizes) projects.push_back(name);
  Rng rng = Rng::derive(seed, "split");
  rng.shuffle(projects);

  const double total = static_cast<double>(records.size());
  const std::array<double, 3> targets = {ratios.train * total, ratios.validation * total, ratios.test * total};
  std::array<double, 3> counts{};
  std::array<std::vector<std::string>, 3> members;
  for (const auto& p : projects) {
    std::size_t best = 0;
    for (std::size_t s = 1; s < 3; ++s) {
      if (targets[s] - counts[s] > targets[best] - counts[best]) best = s;
    }
    counts[best] += static_cast<double>(sizes[p]);
    members[best].push_back(p);
  }
  // Every split gets at least one project.
  for (std::size_t s = 0; s < 3; ++s) {
    if (!members[s].empty()) continue;
    std::size_t donor = 0;
    for (std::size_t d = 1; d < 3; ++d) {
      if (members[d].size() > members[donor].size()) donor = d;
    }
    auto smallest = std::min_element(members[donor].begin(), members[donor].end(),
                                     [&](const auto& a, const auto& b) { return sizes[a] < sizes[b]; });
    members[s].push_back(*smallest);
    members[donor].erase(smallest);
  }

  SplitAssignment out;
  for (std::size_t s = 0; s < 3; ++s) {
    for (const auto& p : members[s]) out.project_split[p] = static_cast<Split>(s);
  }
  for (const auto& rec : records) {
    const Split s = out.project_split.at(rec.project);
    out.method_split[rec.id] = s;
    ++out.method_counts[static_cast<std::size_t>(s)];
  }
  return out;
}

std::string format_split(const std::vector<MethodRecord>& records, const SplitAssignment& split) {
  std::string out;
  for (const auto& rec : records) {
    out += rec.id + '\t' + rec.project + '\t' + to_string(split.method_split.at(rec.id)) + '\n';
  }
  return out;
}

SplitAssignment parse_split_file(const std::string& text) {
  SplitAssignment out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto a = line.find('\t');
    const auto b = line.find('\t', a + 1);
    if (a == std::string::npos || b == std::string::npos) {
      throw Error(ErrorKind::Io, "bad split line: " + line);
    }
    const auto split = parse_split(line.substr(b + 1));
    if (!split) throw Error(ErrorKind::Io, "bad split name: " + line);
    out.method_split[line.substr(0, a)] = *split;
    out.project_split[line.substr(a + 1, b - a - 1)] = *split;
    ++out.method_counts[static_cast<std::size_t>(*split)];
  }
  return out;
}

std::string tuple_line(const QATuple& t) {
  nlohmann::ordered_json j;
  j["qtype"] = code(t.qtype);
  j["question"] = detokenize(t.question);
  j["answer"] = detokenize(t.answer);
  j["context"] = detokenize(t.context);
  j["method_id"] = t.method_id;
  j["template_id"] = t.template_id;
  j["is_negative"] = t.is_negative;
  return j.dump();
}

QATuple parse_tuple_line(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  QATuple t;
  t.qtype = parse_question_type(j.at("qtype").get<std::string>());
  t.question = tokenize(j.at("question").get<std::string>());
  t.answer = tokenize(j.at("answer").get<std::string>());
  t.context = tokenize(j.at("context").get<std::string>());
  t.method_id = j.at("method_id").get<std::string>();
  t.template_id = j.at("template_id").get<int>();
  t.is_negative = j.at("is_negative").get<bool>();
  return t;
}

std::string format_tuples(const std::vector<QATuple>& tuples) {
  std::string out;
  for (const auto& t : tuples) {
    out += tuple_line(t);
    out.push_back('\n');
  }
  return out;
}

std::vector<QATuple> parse_tuples(const std::string& text) {
  std::vector<QATuple> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(parse_tuple_line(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Io, std::string("bad tuple line: ") + e.what());
    }
  }
  return out;
}

}  // namespace codeqa
