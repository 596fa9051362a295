#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include <json.hpp>

#include "codeqa/seq2seq.hpp"

namespace codeqa {

struct PathConfig {
  std::string corpus = "corpus.jsonl";
  std::string templates;  // empty: bundled template file
  std::string tuples = "tuples.jsonl";
  std::string split = "split.tsv";
  std::string checkpoint = "model.ckpt";
  std::string report = "report.json";
  std::string heatmaps;  // directory; empty disables heatmap export
};

struct ModelConfig {
  int d_emb = 128;
  int d_hid = 256;
  int max_q_len = 20;
  int max_c_len = 200;
  int max_a_len = 30;
  std::size_t vocab_in = 10000;
  std::size_t vocab_out = 5000;

  ModelDims dims() const { return {d_emb, d_hid, max_q_len, max_c_len, max_a_len}; }
};

struct TrainConfig {
  int epochs = 30;
  int batch_size = 64;
  double learning_rate = 1e-3;
  double clip_norm = 5.0;
};

struct GenerationConfig {
  bool negatives = true;
  bool filter = true;
  double train_ratio = 0.90;
  double validation_ratio = 0.05;
  double test_ratio = 0.05;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir = "webchat/dist";
  unsigned threads = 8;
};

/// Everything a pipeline run depends on. Serialized with a fixed key order.
struct RunConfig {
  std::uint64_t seed = 7;
  PathConfig paths;
  ModelConfig model;
  TrainConfig train;
  GenerationConfig generation;
  ServiceConfig service;
};

nlohmann::ordered_json to_json(const RunConfig& config);
/// Missing keys keep their defaults; unknown keys throw Error(Config).
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

inline constexpr const char* kEnvPrefix = "CODEQA_";

/// Applies CODEQA_SEED, CODEQA_EPOCHS, CODEQA_VOCAB_IN, CODEQA_VOCAB_OUT,
/// CODEQA_MAX_CONTEXT, CODEQA_PORT, CODEQA_BATCH_SIZE, CODEQA_D_EMB and
/// CODEQA_D_HID when set.
void apply_env(RunConfig& config, const std::function<const char*(const char*)>& lookup);
void apply_env(RunConfig& config);

/// Provenance record written next to every artifact as `<artifact>.manifest.json`.
struct Manifest {
  std::string kind;      // corpus, tuples, split, checkpoint, report
  std::string artifact;  // path as written
  std::string checksum;  // of the artifact bytes
  std::uint64_t seed = 0;
  std::string template_checksum;
  /// Input name -> checksum of the input artifact.
  std::map<std::string, std::string> inputs;
  nlohmann::ordered_json stats = nlohmann::ordered_json::object();
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
};

std::string manifest_path(const std::string& artifact);
nlohmann::ordered_json to_json(const Manifest& m);
Manifest manifest_from_json(const nlohmann::json& j);
void write_manifest(const Manifest& m);
/// Throws Error(ManifestMismatch) when the manifest is missing or unreadable.
Manifest read_manifest(const std::string& artifact);

/// Reads the manifest of `artifact` and checks that it describes the file on
/// disk, has the expected kind and was produced with `seed`. With `force`,
/// a seed mismatch is tolerated; a stale checksum never is.
Manifest verify_artifact(const std::string& artifact, const std::string& kind, std::uint64_t seed, bool force);

}  // namespace codeqa
