#include "codeqa/service.hpp"

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include <httplib.h>

#include "codeqa/common.hpp"

namespace codeqa {

namespace {

using Json = nlohmann::ordered_json;

HttpResult error(int status, const std::string& message) {
  return {status, Json{{"error", message}}.dump(), 0};
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

Json span_json(std::pair<std::size_t, std::size_t> span, std::size_t limit) {
  if (span.first >= span.second || span.second > limit) return nullptr;
  return Json::array({span.first, span.second});
}

}  // namespace

ServiceState::ServiceState(Model m, std::vector<MethodRecord> r, std::optional<SplitAssignment> s)
    : model(std::move(m)), records(std::move(r)), split(std::move(s)) {
  by_id = record_index(records);
}

QaService::QaService(std::string static_dir, unsigned threads)
    : static_dir_(std::move(static_dir)), server_(std::make_unique<httplib::Server>()) {
  server_->new_task_queue = [threads] { return new httplib::ThreadPool(std::max(1u, threads)); };
  auto reply = [](httplib::Response& res, const HttpResult& r) {
    res.status = r.status;
    std::ostringstream elapsed;
    elapsed << std::fixed << std::setprecision(3) << r.elapsed_ms;
    res.set_header("X-Elapsed-Ms", elapsed.str());
    res.set_content(r.body, "application/json");
  };
  server_->Post("/api/ask", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, ask(req.body));
  });
  server_->Get("/api/methods", [this, reply](const httplib::Request& req, httplib::Response& res) {
    const std::string debug = req.get_param_value("debug");
    reply(res, methods(req.get_param_value("split"), debug == "1" || debug == "true"));
  });
  server_->Get("/api/health", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, health()); });
  if (!static_dir_.empty() && std::filesystem::is_directory(static_dir_)) server_->set_mount_point("/", static_dir_);
}

QaService::~QaService() { stop(); }

void QaService::set_state(std::shared_ptr<const ServiceState> state) {
  std::lock_guard lock(mutex_);
  state_ = std::move(state);
}

std::shared_ptr<const ServiceState> QaService::state() const {
  std::lock_guard lock(mutex_);
  return state_;
}

bool QaService::ready() const { return state() != nullptr; }

HttpResult QaService::ask(const std::string& body) const {
  const auto start = std::chrono::steady_clock::now();
  const auto st = state();
  if (!st) return error(503, "model is still loading");

  nlohmann::json req;
  try {
    req = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception&) {
    return error(400, "request body is not valid JSON");
  }
  if (!req.is_object()) return error(400, "request body must be an object");
  const bool has_id = req.contains("method_id");
  const bool has_source = req.contains("source");
  if (has_id == has_source) return error(400, "give exactly one of method_id and source");
  if (!req.contains("question") || !req["question"].is_string()) return error(400, "question must be a string");
  const TokenSeq question = tokenize(req["question"].get<std::string>());
  if (question.empty()) return error(400, "question is empty");

  MethodRecord adhoc;
  const MethodRecord* rec = nullptr;
  if (has_id) {
    if (!req["method_id"].is_string()) return error(400, "method_id must be a string");
    auto it = st->by_id.find(req["method_id"].get<std::string>());
    if (it == st->by_id.end()) return error(400, "unknown method_id");
    rec = it->second;
  } else {
    if (!req["source"].is_string()) return error(400, "source must be a string");
    std::string summary;
    if (req.contains("summary")) {
      if (!req["summary"].is_string()) return error(400, "summary must be a string");
      summary = req["summary"].get<std::string>();
    }
    try {
      adhoc = make_record("adhoc", "adhoc", req["source"].get<std::string>(), summary);
    } catch (const Error& e) {
      return error(400, std::string("cannot parse method: ") + e.what());
    }
    rec = &adhoc;
  }

  const InferResult r = infer(st->model, question, rec->context_tokens, st->model.dims.max_a_len);
  Json spans = {{"return_type", rec->features.is_constructor ? Json(nullptr)
                                                              : span_json(rec->return_type_span(), r.context.size())},
                {"signature", span_json(rec->signature_span(), r.context.size())}};
  Json out = {{"answer", detokenize(r.answer)},
              {"answer_tokens", r.answer},
              {"question_tokens", question},
              {"context_tokens", r.context},
              {"code_attn", matrix_json(r.trace.code_attn)},
              {"q_attn", matrix_json(r.trace.q_attn)},
              {"question_unk_fraction", r.unk_fraction},
              {"low_confidence", r.low_confidence},
              {"spans", std::move(spans)}};
  if (has_id) out["method_id"] = rec->id;
  HttpResult result{200, out.dump(), 0};
  result.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

HttpResult QaService::methods(const std::string& split, bool debug) const {
  const auto start = std::chrono::steady_clock::now();
  const auto st = state();
  if (!st) return error(503, "model is still loading");
  std::optional<Split> filter;
  if (!split.empty()) {
    filter = parse_split(split);
    if (!filter) return error(400, "unknown split " + split);
    if (!st->split) return error(400, "no split assignment loaded");
  }
  Json list = Json::array();
  for (const auto& rec : st->records) {
    if (filter && st->split->split_of_method(rec.id) != filter) continue;
    Json item = {{"id", rec.id}, {"name", rec.features.name}, {"project", rec.project}, {"has_summary", rec.has_summary()}};
    if (debug) {
      item["source"] = rec.raw_source;
      item["summary"] = rec.summary_raw;
    }
    list.push_back(std::move(item));
  }
  HttpResult result{200, Json{{"methods", std::move(list)}}.dump(), 0};
  result.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

HttpResult QaService::health() const {
  const auto st = state();
  Json out = {{"status", st ? "ok" : "loading"}, {"model_loaded", st != nullptr}};
  if (st) {
    out["methods"] = st->records.size();
    out["input_vocab"] = st->model.input_vocab.size();
    out["output_vocab"] = st->model.output_vocab.size();
  }
  return {200, out.dump(), 0};
}

int QaService::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  if (!server_->bind_to_port(host, port)) throw Error(ErrorKind::Io, "cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void QaService::listen() { server_->listen_after_bind(); }

void QaService::stop() {
  if (server_) server_->stop();
}

}  // namespace codeqa
