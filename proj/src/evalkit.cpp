#include "codeqa/evalkit.hpp"

#include <algorithm>
#include <atomic>
#include <iomanip>
#include <sstream>
#include <thread>

#include "codeqa/common.hpp"

namespace codeqa {

namespace {

TokenSeq strip_sentinels(const TokenSeq& answer) {
  TokenSeq out;
  for (const auto& t : answer) {
    if (t != tok::kStart && t != tok::kEnd) out.push_back(t);
  }
  return out;
}

bool contains_token(const TokenSeq& seq, std::string_view token) {
  return std::find(seq.begin(), seq.end(), token) != seq.end();
}

using Json = nlohmann::ordered_json;

Json span_json(const std::optional<std::pair<std::size_t, std::size_t>>& span) {
  if (!span) return nullptr;
  return Json::array({span->first, span->second});
}

std::optional<std::pair<std::size_t, std::size_t>> span_from(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return std::make_pair(j.at(0).get<std::size_t>(), j.at(1).get<std::size_t>());
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from(const nlohmann::json& j, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols) throw Error(ErrorKind::Io, "heatmap row width mismatch");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

}  // namespace

bool contains_run(const TokenSeq& haystack, const TokenSeq& needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

TokenSeq slot_tokens(QuestionType q, const MethodRecord& rec) {
  const auto& f = rec.features;
  switch (q) {
    case QuestionType::ReturnType:
      return f.is_constructor ? TokenSeq{"constructor"} : f.return_type;
    case QuestionType::Parameters: {
      if (f.params.empty()) return {"no", "parameters"};
      TokenSeq out;
      for (const auto& p : f.params) {
        out.insert(out.end(), p.type.begin(), p.type.end());
        out.push_back(p.name);
      }
      return out;
    }
    case QuestionType::Signature:
      return f.signature_tokens;
    case QuestionType::Description:
      return summary_phrase(f.summary);
    case QuestionType::Definition:
    case QuestionType::Capability:
      break;
  }
  return {};
}

double token_f1(const TokenSeq& produced, const TokenSeq& gold) {
  if (produced.empty() || gold.empty()) return 0.0;
  std::map<std::string_view, long> counts;
  for (const auto& t : gold) ++counts[t];
  std::size_t overlap = 0;
  for (const auto& t : produced) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  return 2.0 * static_cast<double>(overlap) / static_cast<double>(produced.size() + gold.size());
}

bool score_answer(QuestionType q, const TokenSeq& produced, const MethodRecord& rec, const QATuple& gold) {
  const auto& f = rec.features;
  switch (q) {
    case QuestionType::ReturnType:
    case QuestionType::Signature:
      return contains_run(produced, slot_tokens(q, rec));
    case QuestionType::Parameters:
      if (f.params.empty()) return contains_run(produced, {"no", "parameters"});
      return std::all_of(f.params.begin(), f.params.end(), [&](const Parameter& p) {
        return contains_run(produced, p.type) && contains_token(produced, p.name);
      });
    case QuestionType::Definition:
      return contains_token(produced, tok::kFuncode);
    case QuestionType::Description:
      return token_f1(produced, summary_phrase(f.summary)) >= kDescriptionF1Threshold;
    case QuestionType::Capability:
      return produced == strip_sentinels(gold.answer);
  }
  return false;
}

bool attention_focus(const AttentionTrace& trace, std::pair<std::size_t, std::size_t> span) {
  const auto& m = trace.code_attn;
  if (m.rows() == 0 || m.cols() == 0) return false;
  const Eigen::Index last = m.rows() - 1;
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < m.cols(); ++j) {
    if (m(last, j) > m(last, best)) best = j;
  }
  const auto pos = static_cast<std::size_t>(best);
  return pos >= span.first && pos < span.second;
}

std::size_t CorrectnessReport::n() const {
  std::size_t total = 0;
  for (const auto& t : per_type) total += t.n;
  return total;
}

std::size_t CorrectnessReport::n_correct() const {
  std::size_t total = 0;
  for (const auto& t : per_type) total += t.n_correct;
  return total;
}

double CorrectnessReport::overall_rate() const {
  const auto total = n();
  return total == 0 ? 0.0 : static_cast<double>(n_correct()) / static_cast<double>(total);
}

double CorrectnessReport::unk_answer_failure_fraction() const {
  std::size_t failures = 0, unk = 0;
  for (const auto& t : per_type) {
    failures += t.n - t.n_correct;
    unk += t.failures_unk_answer;
  }
  return failures == 0 ? 0.0 : static_cast<double>(unk) / static_cast<double>(failures);
}

double CorrectnessReport::unk_question_failure_fraction() const {
  std::size_t failures = 0, unk = 0;
  for (const auto& t : per_type) {
    failures += t.n - t.n_correct;
    unk += t.failures_unk_question;
  }
  return failures == 0 ? 0.0 : static_cast<double>(unk) / static_cast<double>(failures);
}

bool has_expected_ordering(const CorrectnessReport& report) {
  // Q3 is scored on emitting the constant `<funcode>` answer, so it is left
  // out of the ranking.
  const std::array<QuestionType, 5> ranked = {QuestionType::ReturnType, QuestionType::Parameters,
                                              QuestionType::Signature, QuestionType::Description,
                                              QuestionType::Capability};
  std::vector<double> distinct;
  for (auto q : ranked) distinct.push_back(report[q].rate());
  std::sort(distinct.begin(), distinct.end(), std::greater<>());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  auto dense_rank = [&](QuestionType q) {
    return std::find(distinct.begin(), distinct.end(), report[q].rate()) - distinct.begin();
  };
  if (dense_rank(QuestionType::ReturnType) > 1 || dense_rank(QuestionType::Signature) > 1) return false;
  const double q5 = report[QuestionType::Description].rate();
  return std::all_of(ranked.begin(), ranked.end(), [&](QuestionType q) { return q5 <= report[q].rate(); });
}

CorrectnessReport evaluate_split(const Answerer& answerer, const std::vector<QATuple>& tuples,
                                 const std::map<std::string, const MethodRecord*>& records,
                                 const EvalOptions& options) {
  struct Job {
    const QATuple* tuple;
    const MethodRecord* rec;
  };
  CorrectnessReport report;
  std::vector<Job> jobs;
  for (const auto& t : tuples) {
    auto it = records.find(t.method_id);
    if (it == records.end()) continue;
    if (options.in_vocab_filter) {
      const TokenSeq slot = slot_tokens(t.qtype, *it->second);
      const bool in_vocab = std::all_of(slot.begin(), slot.end(),
                                        [&](const std::string& s) { return options.in_vocab_filter->contains(s); });
      if (!in_vocab) {
        ++report.per_type[index(t.qtype)].excluded;
        continue;
      }
    }
    jobs.push_back({&t, it->second});
  }

  std::vector<Answer> answers(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) answers[i] = answerer(*jobs[i].tuple);
  };
  const unsigned threads = std::max(1u, options.threads);
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const QATuple& t = *jobs[i].tuple;
    const MethodRecord& rec = *jobs[i].rec;
    const Answer& a = answers[i];
    TypeReport& tr = report.per_type[index(t.qtype)];
    ++tr.n;
    const bool correct = score_answer(t.qtype, a.tokens, rec, t);
    if (correct) {
      ++tr.n_correct;
    } else {
      FailureSample s;
      s.method_id = t.method_id;
      s.question = t.question;
      s.expected_slot = t.qtype == QuestionType::Capability ? strip_sentinels(t.answer) : slot_tokens(t.qtype, rec);
      s.produced = a.tokens;
      s.unk_in_answer = contains_token(a.tokens, tok::kUnk);
      s.unk_in_question = a.unk_in_question;
      tr.failures_unk_answer += s.unk_in_answer;
      tr.failures_unk_question += s.unk_in_question;
      if (tr.failure_samples.size() < options.max_failure_samples) tr.failure_samples.push_back(std::move(s));
    }
    if (t.qtype == QuestionType::ReturnType && !rec.features.is_constructor && a.trace) {
      ++report.focus_n;
      report.focus_hits += attention_focus(*a.trace, rec.return_type_span());
    }
  }
  return report;
}

nlohmann::ordered_json report_to_json(const CorrectnessReport& report) {
  Json types = Json::object();
  for (auto q : kAllQuestionTypes) {
    const TypeReport& t = report[q];
    Json samples = Json::array();
    for (const auto& s : t.failure_samples) {
      samples.push_back({{"method_id", s.method_id},
                         {"question", detokenize(s.question)},
                         {"expected_slot", detokenize(s.expected_slot)},
                         {"produced", detokenize(s.produced)},
                         {"unk_in_answer", s.unk_in_answer},
                         {"unk_in_question", s.unk_in_question}});
    }
    types[code(q)] = {{"n", t.n},
                      {"n_correct", t.n_correct},
                      {"rate", t.rate()},
                      {"excluded", t.excluded},
                      {"failures_unk_answer", t.failures_unk_answer},
                      {"failures_unk_question", t.failures_unk_question},
                      {"failure_samples", std::move(samples)}};
  }
  return {{"per_type", std::move(types)},
          {"n", report.n()},
          {"n_correct", report.n_correct()},
          {"overall_rate", report.overall_rate()},
          {"unk_answer_failure_fraction", report.unk_answer_failure_fraction()},
          {"unk_question_failure_fraction", report.unk_question_failure_fraction()},
          {"attention_focus", {{"n", report.focus_n}, {"hits", report.focus_hits}, {"rate", report.focus_rate()}}},
          {"expected_ordering", has_expected_ordering(report)}};
}

std::string report_table(const CorrectnessReport& report) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << "type      n  correct   rate  excluded  unk_ans\n";
  for (auto q : kAllQuestionTypes) {
    const TypeReport& t = report[q];
    os << std::left << std::setw(5) << code(q) << std::right << std::setw(6) << t.n << std::setw(9) << t.n_correct
       << std::setw(7) << t.rate() << std::setw(10) << t.excluded << std::setw(9) << t.failures_unk_answer << "\n";
  }
  os << "all  " << std::setw(6) << report.n() << std::setw(9) << report.n_correct() << std::setw(7)
     << report.overall_rate() << "\n";
  os << "attention focus (Q1): " << report.focus_hits << "/" << report.focus_n << " = " << report.focus_rate() << "\n";
  os << "ordering Q1/Q4 top, Q5 last: " << (has_expected_ordering(report) ? "yes" : "no") << "\n";
  return os.str();
}

HeatmapExport make_heatmap(const InferResult& result, const QATuple& tuple, const MethodRecord& rec) {
  HeatmapExport h;
  h.method_id = tuple.method_id;
  h.qtype = code(tuple.qtype);
  h.question = tuple.question;
  h.answer = result.answer;
  h.context = result.context;
  h.code_attn = result.trace.code_attn;
  h.q_attn = result.trace.q_attn;
  auto clip = [&](std::pair<std::size_t, std::size_t> s) -> std::optional<std::pair<std::size_t, std::size_t>> {
    if (s.second > h.context.size() || s.first >= s.second) return std::nullopt;
    return s;
  };
  if (!rec.features.is_constructor) h.return_type_span = clip(rec.return_type_span());
  h.signature_span = clip(rec.signature_span());
  return h;
}

nlohmann::ordered_json heatmap_to_json(const HeatmapExport& h) {
  return {{"method_id", h.method_id},
          {"qtype", h.qtype},
          {"question", h.question},
          {"answer", h.answer},
          {"context", h.context},
          {"code_attn", matrix_json(h.code_attn)},
          {"q_attn", matrix_json(h.q_attn)},
          {"spans", {{"return_type", span_json(h.return_type_span)}, {"signature", span_json(h.signature_span)}}}};
}

HeatmapExport heatmap_from_json(const nlohmann::json& j) {
  HeatmapExport h;
  h.method_id = j.at("method_id").get<std::string>();
  h.qtype = j.at("qtype").get<std::string>();
  h.question = j.at("question").get<TokenSeq>();
  h.answer = j.at("answer").get<TokenSeq>();
  h.context = j.at("context").get<TokenSeq>();
  h.code_attn = matrix_from(j.at("code_attn"), static_cast<Eigen::Index>(h.context.size()));
  const auto& q = j.at("q_attn");
  h.q_attn = matrix_from(q, q.empty() ? 0 : static_cast<Eigen::Index>(q.at(0).size()));
  h.return_type_span = span_from(j.at("spans").at("return_type"));
  h.signature_span = span_from(j.at("spans").at("signature"));
  return h;
}

void export_heatmap(const HeatmapExport& h, const std::string& path) {
  write_file(path, heatmap_to_json(h).dump(1) + "\n");
}

HeatmapExport read_heatmap(const std::string& path) {
  try {
    return heatmap_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Io, path + ": " + e.what());
  }
}

}  // namespace codeqa
