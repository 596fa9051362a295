#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "codeqa/config.hpp"
#include "codeqa/corpus.hpp"
#include "codeqa/evalkit.hpp"
#include "codeqa/qagen.hpp"
#include "codeqa/seq2seq.hpp"
#include "codeqa/train.hpp"

namespace codeqa {

/// The model type trained and served by the pipeline.
using Model = Seq2SeqModel<float>;

struct LoadedCorpus {
  std::vector<MethodRecord> records;
  IngestStats ingest;
  FilterStats filter;
  std::string checksum;
};

/// Reads the corpus file and, when enabled, applies filter_corpus.
LoadedCorpus load_corpus(const RunConfig& config);
LoadedCorpus prepare_corpus(Corpus corpus, bool filter, std::string checksum = {});

std::map<std::string, const MethodRecord*> record_index(const std::vector<MethodRecord>& records);

struct Partition {
  std::vector<QATuple> train;
  std::vector<QATuple> validation;
  std::vector<QATuple> test;
};

/// Routes tuples to the split of their method; tuples of unassigned methods
/// are dropped.
Partition partition_tuples(const std::vector<QATuple>& tuples, const SplitAssignment& split);

/// Vocabularies from `train` and freshly initialized parameters.
Model make_model(const std::vector<QATuple>& train, const ModelConfig& config, std::uint64_t seed);

std::vector<EncodedExample> encode_tuples(const Model& model, const std::vector<QATuple>& tuples);

struct EpochLog {
  int epoch = 0;
  EpochMetrics metrics;
  double seconds = 0;
};

/// Runs config.epochs teacher-forced epochs with Adam; `on_epoch` sees each
/// epoch's metrics.
std::vector<EpochMetrics> train_model(Model& model, const std::vector<QATuple>& train, const TrainConfig& config,
                                      std::uint64_t seed, const std::function<void(const EpochLog&)>& on_epoch = {});

struct PipelineOptions {
  /// Accept input artifacts produced with a different seed.
  bool force = false;
  std::function<void(const std::string&)> log;
};

/// gen: corpus -> tuple file.
Manifest run_gen(const RunConfig& config, const PipelineOptions& options = {});
/// split: corpus -> project-disjoint split file.
Manifest run_split(const RunConfig& config, const PipelineOptions& options = {});
/// train: tuples + split -> checkpoint.
Manifest run_train(const RunConfig& config, const PipelineOptions& options = {});
/// eval: checkpoint + tuples + split + corpus -> report (JSON, plus a text
/// table next to it).
Manifest run_eval(const RunConfig& config, const PipelineOptions& options = {});

}  // namespace codeqa
