#include "codeqa/config.hpp"

#include <cstdlib>

#include "codeqa/common.hpp"

namespace codeqa {

namespace {

using Json = nlohmann::ordered_json;

template <typename T>
void read_field(const nlohmann::json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::Config, "bad value for " + where + "." + key);
  }
}

void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> known, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorKind::Config, where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw Error(ErrorKind::Config, "unknown config key " + where + "." + key);
  }
}

template <typename T>
T parse_number(const char* name, const char* text) {
  try {
    std::size_t used = 0;
    const long double v = std::stold(text, &used);
    if (used != std::string_view(text).size() || v < 0) throw std::invalid_argument(text);
    return static_cast<T>(v);
  } catch (const std::exception&) {
    throw Error(ErrorKind::Config, std::string("bad value for ") + name + ": " + text);
  }
}

}  // namespace

nlohmann::ordered_json to_json(const RunConfig& c) {
  return {{"seed", c.seed},
          {"paths",
           {{"corpus", c.paths.corpus},
            {"templates", c.paths.templates},
            {"tuples", c.paths.tuples},
            {"split", c.paths.split},
            {"checkpoint", c.paths.checkpoint},
            {"report", c.paths.report},
            {"heatmaps", c.paths.heatmaps}}},
          {"model",
           {{"d_emb", c.model.d_emb},
            {"d_hid", c.model.d_hid},
            {"max_q_len", c.model.max_q_len},
            {"max_c_len", c.model.max_c_len},
            {"max_a_len", c.model.max_a_len},
            {"vocab_in", c.model.vocab_in},
            {"vocab_out", c.model.vocab_out}}},
          {"train",
           {{"epochs", c.train.epochs},
            {"batch_size", c.train.batch_size},
            {"learning_rate", c.train.learning_rate},
            {"clip_norm", c.train.clip_norm}}},
          {"generation",
           {{"negatives", c.generation.negatives},
            {"filter", c.generation.filter},
            {"train_ratio", c.generation.train_ratio},
            {"validation_ratio", c.generation.validation_ratio},
            {"test_ratio", c.generation.test_ratio}}},
          {"service",
           {{"host", c.service.host},
            {"port", c.service.port},
            {"static_dir", c.service.static_dir},
            {"threads", c.service.threads}}}};
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  reject_unknown(j, {"seed", "paths", "model", "train", "generation", "service"}, "config");
  read_field(j, "seed", c.seed, "config");
  if (j.contains("paths")) {
    const auto& p = j["paths"];
    reject_unknown(p, {"corpus", "templates", "tuples", "split", "checkpoint", "report", "heatmaps"}, "paths");
    read_field(p, "corpus", c.paths.corpus, "paths");
    read_field(p, "templates", c.paths.templates, "paths");
    read_field(p, "tuples", c.paths.tuples, "paths");
    read_field(p, "split", c.paths.split, "paths");
    read_field(p, "checkpoint", c.paths.checkpoint, "paths");
    read_field(p, "report", c.paths.report, "paths");
    read_field(p, "heatmaps", c.paths.heatmaps, "paths");
  }
  if (j.contains("model")) {
    const auto& m = j["model"];
    reject_unknown(m, {"d_emb", "d_hid", "max_q_len", "max_c_len", "max_a_len", "vocab_in", "vocab_out"}, "model");
    read_field(m, "d_emb", c.model.d_emb, "model");
    read_field(m, "d_hid", c.model.d_hid, "model");
    read_field(m, "max_q_len", c.model.max_q_len, "model");
    read_field(m, "max_c_len", c.model.max_c_len, "model");
    read_field(m, "max_a_len", c.model.max_a_len, "model");
    read_field(m, "vocab_in", c.model.vocab_in, "model");
    read_field(m, "vocab_out", c.model.vocab_out, "model");
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    reject_unknown(t, {"epochs", "batch_size", "learning_rate", "clip_norm"}, "train");
    read_field(t, "epochs", c.train.epochs, "train");
    read_field(t, "batch_size", c.train.batch_size, "train");
    read_field(t, "learning_rate", c.train.learning_rate, "train");
    read_field(t, "clip_norm", c.train.clip_norm, "train");
  }
  if (j.contains("generation")) {
    const auto& g = j["generation"];
    reject_unknown(g, {"negatives", "filter", "train_ratio", "validation_ratio", "test_ratio"}, "generation");
    read_field(g, "negatives", c.generation.negatives, "generation");
    read_field(g, "filter", c.generation.filter, "generation");
    read_field(g, "train_ratio", c.generation.train_ratio, "generation");
    read_field(g, "validation_ratio", c.generation.validation_ratio, "generation");
    read_field(g, "test_ratio", c.generation.test_ratio, "generation");
  }
  if (j.contains("service")) {
    const auto& s = j["service"];
    reject_unknown(s, {"host", "port", "static_dir", "threads"}, "service");
    read_field(s, "host", c.service.host, "service");
    read_field(s, "port", c.service.port, "service");
    read_field(s, "static_dir", c.service.static_dir, "service");
    read_field(s, "threads", c.service.threads, "service");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  try {
    return config_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, path + ": " + e.what());
  }
}

void apply_env(RunConfig& c, const std::function<const char*(const char*)>& lookup) {
  auto get = [&](const char* name) -> const char* {
    const std::string key = std::string(kEnvPrefix) + name;
    const char* v = lookup(key.c_str());
    return v && *v ? v : nullptr;
  };
  if (const char* v = get("SEED")) c.seed = parse_number<std::uint64_t>("SEED", v);
  if (const char* v = get("EPOCHS")) c.train.epochs = parse_number<int>("EPOCHS", v);
  if (const char* v = get("BATCH_SIZE")) c.train.batch_size = parse_number<int>("BATCH_SIZE", v);
  if (const char* v = get("VOCAB_IN")) c.model.vocab_in = parse_number<std::size_t>("VOCAB_IN", v);
  if (const char* v = get("VOCAB_OUT")) c.model.vocab_out = parse_number<std::size_t>("VOCAB_OUT", v);
  if (const char* v = get("MAX_CONTEXT")) c.model.max_c_len = parse_number<int>("MAX_CONTEXT", v);
  if (const char* v = get("D_EMB")) c.model.d_emb = parse_number<int>("D_EMB", v);
  if (const char* v = get("D_HID")) c.model.d_hid = parse_number<int>("D_HID", v);
  if (const char* v = get("PORT")) c.service.port = parse_number<int>("PORT", v);
}

void apply_env(RunConfig& c) {
  apply_env(c, [](const char* name) { return std::getenv(name); });
}

std::string manifest_path(const std::string& artifact) { return artifact + ".manifest.json"; }

nlohmann::ordered_json to_json(const Manifest& m) {
  Json inputs = Json::object();
  for (const auto& [name, sum] : m.inputs) inputs[name] = sum;
  return {{"kind", m.kind},
          {"artifact", m.artifact},
          {"checksum", m.checksum},
          {"seed", m.seed},
          {"template_checksum", m.template_checksum},
          {"inputs", std::move(inputs)},
          {"stats", m.stats},
          {"config", m.config}};
}

Manifest manifest_from_json(const nlohmann::json& j) {
  Manifest m;
  m.kind = j.at("kind").get<std::string>();
  m.artifact = j.at("artifact").get<std::string>();
  m.checksum = j.at("checksum").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.template_checksum = j.value("template_checksum", "");
  if (j.contains("inputs")) m.inputs = j["inputs"].get<std::map<std::string, std::string>>();
  if (j.contains("stats")) m.stats = j["stats"];
  if (j.contains("config")) m.config = j["config"];
  return m;
}

void write_manifest(const Manifest& m) { write_file(manifest_path(m.artifact), to_json(m).dump(2) + "\n"); }

Manifest read_manifest(const std::string& artifact) {
  std::string text;
  try {
    text = read_file(manifest_path(artifact));
  } catch (const Error&) {
    throw Error(ErrorKind::ManifestMismatch, "missing manifest for " + artifact);
  }
  try {
    return manifest_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ManifestMismatch, "unreadable manifest for " + artifact + ": " + e.what());
  }
}

Manifest verify_artifact(const std::string& artifact, const std::string& kind, std::uint64_t seed, bool force) {
  Manifest m = read_manifest(artifact);
  if (m.kind != kind) {
    throw Error(ErrorKind::ManifestMismatch, artifact + " is a " + m.kind + " artifact, expected " + kind);
  }
  const std::string actual = file_checksum(artifact);
  if (actual != m.checksum) {
    throw Error(ErrorKind::ManifestMismatch, artifact + " does not match its manifest checksum");
  }
  if (m.seed != seed && !force) {
    throw Error(ErrorKind::ManifestMismatch, artifact + " was produced with seed " + std::to_string(m.seed) +
                                                 ", this run uses " + std::to_string(seed) + " (use --force)");
  }
  return m;
}

}  // namespace codeqa
