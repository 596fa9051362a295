#include "codeqa/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <sstream>

#include "codeqa/checkpoint.hpp"
#include "codeqa/common.hpp"
#include "codeqa/vocab.hpp"

namespace codeqa {

namespace {

void say(const PipelineOptions& options, const std::string& line) {
  if (options.log) options.log(line);
}

TemplateSet templates_for(const RunConfig& config) {
  return load_templates(config.paths.templates.empty() ? default_templates_path() : config.paths.templates);
}

SplitAssignment read_split(const std::string& path) { return parse_split_file(read_file(path)); }

}  // namespace

LoadedCorpus prepare_corpus(Corpus corpus, bool filter, std::string checksum) {
  LoadedCorpus out;
  out.ingest = corpus.stats;
  out.checksum = std::move(checksum);
  out.records = filter ? filter_corpus(std::move(corpus.records), &out.filter) : std::move(corpus.records);
  return out;
}

LoadedCorpus load_corpus(const RunConfig& config) {
  return prepare_corpus(read_corpus(config.paths.corpus), config.generation.filter,
                        file_checksum(config.paths.corpus));
}

std::map<std::string, const MethodRecord*> record_index(const std::vector<MethodRecord>& records) {
  std::map<std::string, const MethodRecord*> index;
  for (const auto& r : records) index.emplace(r.id, &r);
  return index;
}

Partition partition_tuples(const std::vector<QATuple>& tuples, const SplitAssignment& split) {
  Partition p;
  for (const auto& t : tuples) {
    const auto s = split.split_of_method(t.method_id);
    if (!s) continue;
    switch (*s) {
      case Split::Train: p.train.push_back(t); break;
      case Split::Validation: p.validation.push_back(t); break;
      case Split::Test: p.test.push_back(t); break;
    }
  }
  return p;
}

Model make_model(const std::vector<QATuple>& train, const ModelConfig& config, std::uint64_t seed) {
  auto [in, out] = build_vocab(train, config.vocab_in, config.vocab_out);
  Model model(std::move(in), std::move(out), config.dims());
  Rng rng = Rng::derive(seed, "init");
  model.init_random(rng);
  return model;
}

std::vector<EncodedExample> encode_tuples(const Model& model, const std::vector<QATuple>& tuples) {
  std::vector<EncodedExample> out;
  out.reserve(tuples.size());
  for (const auto& t : tuples) out.push_back(encode_example(model, t.question, t.context, t.answer));
  return out;
}

std::vector<EpochMetrics> train_model(Model& model, const std::vector<QATuple>& train, const TrainConfig& config,
                                      std::uint64_t seed, const std::function<void(const EpochLog&)>& on_epoch) {
  OptimizerConfig opt;
  opt.learning_rate = config.learning_rate;
  opt.clip_norm = config.clip_norm;
  opt.batch_size = config.batch_size;
  Adam<float> adam(model, opt);
  Rng rng = Rng::derive(seed, "train");
  const auto examples = encode_tuples(model, train);
  std::vector<EpochMetrics> history;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    history.push_back(train_epoch(model, examples, adam, rng));
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_epoch) on_epoch({epoch, history.back(), seconds});
  }
  return history;
}

Manifest run_gen(const RunConfig& config, const PipelineOptions& options) {
  const LoadedCorpus corpus = load_corpus(config);
  if (corpus.records.empty()) throw Error(ErrorKind::EmptyCorpus, "no usable methods in " + config.paths.corpus);
  const TemplateSet templates = templates_for(config);
  const CorpusGeneration gen = generate_corpus(corpus.records, templates, config.seed, config.generation.negatives);
  write_file(config.paths.tuples, format_tuples(gen.tuples));

  Manifest m;
  m.kind = "tuples";
  m.artifact = config.paths.tuples;
  m.checksum = file_checksum(config.paths.tuples);
  m.seed = config.seed;
  m.template_checksum = templates.checksum;
  m.inputs["corpus"] = corpus.checksum;
  nlohmann::ordered_json per_type = nlohmann::ordered_json::object();
  for (auto q : kAllQuestionTypes) per_type[code(q)] = gen.per_type[index(q)];
  nlohmann::ordered_json skips = nlohmann::ordered_json::object();
  for (const auto& [k, v] : gen.skips) skips[k] = v;
  m.stats = {{"methods", corpus.records.size()},
             {"tuples", gen.tuples.size()},
             {"per_type", per_type},
             {"q6_yes", gen.q6_yes},
             {"q6_no", gen.q6_no},
             {"skips", skips},
             {"malformed_lines", corpus.ingest.malformed_lines},
             {"malformed_methods", corpus.ingest.malformed_methods},
             {"dropped_duplicates", corpus.filter.duplicates},
             {"dropped_non_descriptive", corpus.filter.non_descriptive}};
  m.config = to_json(config);
  write_manifest(m);
  say(options, "gen: " + std::to_string(gen.tuples.size()) + " tuples from " + std::to_string(corpus.records.size()) +
                   " methods -> " + config.paths.tuples);
  return m;
}

Manifest run_split(const RunConfig& config, const PipelineOptions& options) {
  const LoadedCorpus corpus = load_corpus(config);
  const SplitRatios ratios{config.generation.train_ratio, config.generation.validation_ratio,
                           config.generation.test_ratio};
  const SplitAssignment split = split_corpus(corpus.records, ratios, config.seed);
  write_file(config.paths.split, format_split(corpus.records, split));

  Manifest m;
  m.kind = "split";
  m.artifact = config.paths.split;
  m.checksum = file_checksum(config.paths.split);
  m.seed = config.seed;
  m.inputs["corpus"] = corpus.checksum;
  const double total = static_cast<double>(corpus.records.size());
  m.stats = {{"methods", corpus.records.size()},
             {"projects", split.project_split.size()},
             {"train", split.method_counts[0]},
             {"validation", split.method_counts[1]},
             {"test", split.method_counts[2]},
             {"train_fraction", total > 0 ? static_cast<double>(split.method_counts[0]) / total : 0.0}};
  m.config = to_json(config);
  write_manifest(m);
  say(options, "split: " + std::to_string(split.method_counts[0]) + "/" + std::to_string(split.method_counts[1]) +
                   "/" + std::to_string(split.method_counts[2]) + " methods -> " + config.paths.split);
  return m;
}

Manifest run_train(const RunConfig& config, const PipelineOptions& options) {
  const Manifest tuples_m = verify_artifact(config.paths.tuples, "tuples", config.seed, options.force);
  const Manifest split_m = verify_artifact(config.paths.split, "split", config.seed, options.force);
  if (tuples_m.inputs.at("corpus") != split_m.inputs.at("corpus") && !options.force) {
    throw Error(ErrorKind::ManifestMismatch, "tuples and split were derived from different corpora");
  }
  const auto tuples = parse_tuples(read_file(config.paths.tuples));
  const Partition part = partition_tuples(tuples, read_split(config.paths.split));
  if (part.train.empty()) throw Error(ErrorKind::EmptyCorpus, "no training tuples");

  Model model = make_model(part.train, config.model, config.seed);
  say(options, "train: " + std::to_string(part.train.size()) + " tuples, vocab " +
                   std::to_string(model.input_vocab.size()) + "/" + std::to_string(model.output_vocab.size()) +
                   ", " + std::to_string(model.params.parameter_count()) + " parameters");
  nlohmann::ordered_json trajectory = nlohmann::ordered_json::array();
  train_model(model, part.train, config.train, config.seed, [&](const EpochLog& e) {
    std::ostringstream os;
    os << "epoch " << e.epoch << " loss " << e.metrics.mean_loss << " token_acc " << e.metrics.token_accuracy << " ("
       << e.seconds << " s)";
    say(options, os.str());
    trajectory.push_back({{"epoch", e.epoch}, {"loss", e.metrics.mean_loss}, {"token_accuracy", e.metrics.token_accuracy}});
  });

  Manifest m;
  m.kind = "checkpoint";
  m.artifact = config.paths.checkpoint;
  m.seed = config.seed;
  m.template_checksum = tuples_m.template_checksum;
  m.inputs["corpus"] = tuples_m.inputs.at("corpus");
  m.inputs["tuples"] = tuples_m.checksum;
  m.inputs["split"] = split_m.checksum;
  m.stats = {{"train_tuples", part.train.size()},
             {"input_vocab", model.input_vocab.size()},
             {"output_vocab", model.output_vocab.size()},
             {"parameters", model.params.parameter_count()},
             {"trajectory", trajectory}};
  m.config = to_json(config);
  save_checkpoint(model, config.paths.checkpoint,
                  {{"seed", config.seed}, {"inputs", {{"tuples", tuples_m.checksum}, {"split", split_m.checksum}}}});
  m.checksum = file_checksum(config.paths.checkpoint);
  write_manifest(m);
  say(options, "train: checkpoint -> " + config.paths.checkpoint);
  return m;
}

Manifest run_eval(const RunConfig& config, const PipelineOptions& options) {
  const Manifest ckpt_m = verify_artifact(config.paths.checkpoint, "checkpoint", config.seed, options.force);
  const Manifest tuples_m = verify_artifact(config.paths.tuples, "tuples", config.seed, options.force);
  const Manifest split_m = verify_artifact(config.paths.split, "split", config.seed, options.force);
  if (ckpt_m.inputs.at("tuples") != tuples_m.checksum || ckpt_m.inputs.at("split") != split_m.checksum) {
    throw Error(ErrorKind::ManifestMismatch, "checkpoint was trained on different tuples or split");
  }
  const LoadedCorpus corpus = load_corpus(config);
  if (corpus.checksum != tuples_m.inputs.at("corpus")) {
    throw Error(ErrorKind::ManifestMismatch, "corpus changed since tuples were generated");
  }

  const Model model = load_checkpoint<float>(config.paths.checkpoint);
  const auto tuples = parse_tuples(read_file(config.paths.tuples));
  const Partition part = partition_tuples(tuples, read_split(config.paths.split));
  const auto records = record_index(corpus.records);

  EvalOptions eval;
  eval.in_vocab_filter = &model.output_vocab;
  const CorrectnessReport report = evaluate_split(model_answerer(model), part.test, records, eval);
  const std::string json = report_to_json(report).dump(2) + "\n";
  write_file(config.paths.report, json);
  write_file(config.paths.report + ".txt", report_table(report));

  if (!config.paths.heatmaps.empty()) {
    std::filesystem::create_directories(config.paths.heatmaps);
    std::size_t written = 0;
    for (const auto& t : part.test) {
      if (t.qtype != QuestionType::ReturnType || written == 20) continue;
      const MethodRecord& rec = *records.at(t.method_id);
      const InferResult r = infer(model, t.question, t.context, model.dims.max_a_len);
      export_heatmap(make_heatmap(r, t, rec), config.paths.heatmaps + "/" + t.method_id + ".json");
      ++written;
    }
  }

  Manifest m;
  m.kind = "report";
  m.artifact = config.paths.report;
  m.checksum = file_checksum(config.paths.report);
  m.seed = config.seed;
  m.template_checksum = tuples_m.template_checksum;
  m.inputs["checkpoint"] = ckpt_m.checksum;
  m.inputs["tuples"] = tuples_m.checksum;
  m.inputs["split"] = split_m.checksum;
  m.inputs["corpus"] = corpus.checksum;
  m.stats = {{"test_tuples", part.test.size()}, {"overall_rate", report.overall_rate()}};
  m.config = to_json(config);
  write_manifest(m);
  say(options, report_table(report));
  return m;
}

}  // namespace codeqa
