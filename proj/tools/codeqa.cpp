// Command-line front end for the question-answering pipeline.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "codeqa/checkpoint.hpp"
#include "codeqa/common.hpp"
#include "codeqa/config.hpp"
#include "codeqa/gradcheck.hpp"
#include "codeqa/pipeline.hpp"
#include "codeqa/service.hpp"
#include "codeqa/synth.hpp"

using namespace codeqa;

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<std::size_t> vocab_in;
  std::optional<std::size_t> vocab_out;
  std::optional<int> max_context;
  std::optional<int> port;
  std::optional<int> d_emb;
  std::optional<int> d_hid;
  std::optional<int> batch_size;
  std::optional<std::string> corpus, templates, tuples, split, checkpoint, report, heatmaps;
  bool force = false;
};

RunConfig effective_config(const Overrides& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  apply_env(c);
  if (o.seed) c.seed = *o.seed;
  if (o.epochs) c.train.epochs = *o.epochs;
  if (o.batch_size) c.train.batch_size = *o.batch_size;
  if (o.vocab_in) c.model.vocab_in = *o.vocab_in;
  if (o.vocab_out) c.model.vocab_out = *o.vocab_out;
  if (o.max_context) c.model.max_c_len = *o.max_context;
  if (o.d_emb) c.model.d_emb = *o.d_emb;
  if (o.d_hid) c.model.d_hid = *o.d_hid;
  if (o.port) c.service.port = *o.port;
  if (o.corpus) c.paths.corpus = *o.corpus;
  if (o.templates) c.paths.templates = *o.templates;
  if (o.tuples) c.paths.tuples = *o.tuples;
  if (o.split) c.paths.split = *o.split;
  if (o.checkpoint) c.paths.checkpoint = *o.checkpoint;
  if (o.report) c.paths.report = *o.report;
  if (o.heatmaps) c.paths.heatmaps = *o.heatmaps;
  return c;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return 2;
    case ErrorKind::ManifestMismatch: return 3;
    case ErrorKind::Io: return 4;
    case ErrorKind::CorruptCheckpoint: return 5;
    case ErrorKind::NonFiniteLoss: return 6;
    default: return 7;
  }
}

void log_line(const std::string& s) { std::cerr << s << (s.empty() || s.back() != '\n' ? "\n" : ""); }

void print_attention_strip(const InferResult& r) {
  for (Eigen::Index i = 0; i < r.trace.code_attn.rows(); ++i) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(r.trace.code_attn.cols()));
    for (Eigen::Index j = 0; j < r.trace.code_attn.cols(); ++j) order[static_cast<std::size_t>(j)] = j;
    const auto k = std::min<std::size_t>(3, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](Eigen::Index a, Eigen::Index b) { return r.trace.code_attn(i, a) > r.trace.code_attn(i, b); });
    std::cout << std::setw(16) << r.answer[static_cast<std::size_t>(i)] << "  <-";
    for (std::size_t n = 0; n < k; ++n) {
      const auto j = order[n];
      std::cout << "  " << r.context[static_cast<std::size_t>(j)] << "@" << j << " " << std::fixed
                << std::setprecision(2) << r.trace.code_attn(i, j);
    }
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Question answering about Java methods with an attentional encoder-decoder"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  app.add_option("--config", o.config_path, "Run configuration (JSON)");
  app.add_option("--seed", o.seed, "Global seed");
  app.add_option("--epochs", o.epochs, "Training epochs");
  app.add_option("--batch-size", o.batch_size, "Training batch size");
  app.add_option("--vocab-in", o.vocab_in, "Input vocabulary size");
  app.add_option("--vocab-out", o.vocab_out, "Output vocabulary size");
  app.add_option("--max-context", o.max_context, "Context tokens kept");
  app.add_option("--d-emb", o.d_emb, "Embedding width");
  app.add_option("--d-hid", o.d_hid, "Hidden width");
  app.add_option("--port", o.port, "Service port");
  app.add_option("--corpus", o.corpus, "Corpus file (JSON lines)");
  app.add_option("--templates", o.templates, "Template file");
  app.add_option("--tuples", o.tuples, "Tuple file");
  app.add_option("--split-file", o.split, "Split assignment file");
  app.add_option("--checkpoint", o.checkpoint, "Checkpoint file");
  app.add_option("--report", o.report, "Evaluation report");
  app.add_option("--heatmaps", o.heatmaps, "Directory for heatmap exports");
  app.add_flag("--force", o.force, "Accept artifacts produced with another seed");

  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus");
  SynthOptions synth_opts;
  std::string synth_out;
  synth->add_option("--methods", synth_opts.methods, "Number of methods")->capture_default_str();
  synth->add_option("--projects", synth_opts.projects, "Number of projects (0: automatic)");
  synth->add_option("--summary-rate", synth_opts.summary_rate, "Fraction of methods with a summary");
  synth->add_option("--out", synth_out, "Output corpus path (default: configured corpus path)");

  auto* gen = app.add_subcommand("gen", "Generate question/answer/context tuples");
  auto* split = app.add_subcommand("split", "Assign projects to train/validation/test");
  auto* train = app.add_subcommand("train", "Train a model on the train split");
  auto* eval = app.add_subcommand("eval", "Score the model on the test split");

  auto* ask = app.add_subcommand("ask", "Answer one question about a method");
  std::string question, method_id, source_file, summary;
  bool show_attention = false;
  ask->add_option("question", question, "Question text")->required();
  ask->add_option("--method-id", method_id, "Method from the corpus");
  ask->add_option("--source-file", source_file, "File holding a Java method");
  ask->add_option("--summary", summary, "Summary for --source-file");
  ask->add_flag("--attention", show_attention, "Print the top attended context tokens per answer token");

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API and chat UI");
  std::string host_override, static_override;
  serve->add_option("--host", host_override, "Bind address");
  serve->add_option("--static-dir", static_override, "Chat UI bundle directory");

  auto* gradcheck = app.add_subcommand("gradcheck", "Check backpropagation against finite differences");
  int gc_models = 3;
  double gc_eps = 1e-5;
  bool gc_padded = false;
  gradcheck->add_option("--models", gc_models, "Random tiny models to check")->capture_default_str();
  gradcheck->add_option("--epsilon", gc_eps, "Finite-difference step")->capture_default_str();
  gradcheck->add_flag("--padded", gc_padded, "Use a two-example padded batch");

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig config = effective_config(o);
    PipelineOptions popts;
    popts.force = o.force;
    popts.log = log_line;

    if (*synth) {
      synth_opts.seed = config.seed;
      const std::string out = synth_out.empty() ? config.paths.corpus : synth_out;
      const auto methods = synthesize_corpus(synth_opts);
      write_file(out, format_synth_corpus(methods));
      std::cerr << "synth: " << methods.size() << " methods -> " << out << "\n";
    } else if (*gen) {
      run_gen(config, popts);
    } else if (*split) {
      run_split(config, popts);
    } else if (*train) {
      run_train(config, popts);
    } else if (*eval) {
      run_eval(config, popts);
    } else if (*ask) {
      if (method_id.empty() == source_file.empty()) {
        throw Error(ErrorKind::Config, "give exactly one of --method-id and --source-file");
      }
      verify_artifact(config.paths.checkpoint, "checkpoint", config.seed, o.force);
      const Model model = load_checkpoint<float>(config.paths.checkpoint);
      MethodRecord rec;
      if (!method_id.empty()) {
        const LoadedCorpus corpus = load_corpus(config);
        const auto index = record_index(corpus.records);
        auto it = index.find(method_id);
        if (it == index.end()) throw Error(ErrorKind::Config, "unknown method id " + method_id);
        rec = *it->second;
      } else {
        rec = make_record("adhoc", "adhoc", read_file(source_file), summary);
      }
      const InferResult r = infer(model, tokenize(question), rec.context_tokens, model.dims.max_a_len);
      std::cout << detokenize(r.answer) << "\n";
      if (r.low_confidence) std::cerr << "warning: most of the question is out of vocabulary\n";
      if (show_attention) print_attention_strip(r);
    } else if (*serve) {
      const std::string host = host_override.empty() ? config.service.host : host_override;
      QaService service(static_override.empty() ? config.service.static_dir : static_override, config.service.threads);
      const int port = service.bind(host, config.service.port);
      std::cerr << "serve: listening on " << host << ":" << port << "\n";
      std::thread loader([&] {
        try {
          verify_artifact(config.paths.checkpoint, "checkpoint", config.seed, o.force);
          Model model = load_checkpoint<float>(config.paths.checkpoint);
          LoadedCorpus corpus = load_corpus(config);
          std::optional<SplitAssignment> assignment;
          if (std::filesystem::exists(config.paths.split)) assignment = parse_split_file(read_file(config.paths.split));
          service.set_state(
              std::make_shared<const ServiceState>(std::move(model), std::move(corpus.records), std::move(assignment)));
          std::cerr << "serve: model loaded\n";
        } catch (const std::exception& e) {
          std::cerr << "serve: loading failed: " << e.what() << "\n";
          service.stop();
        }
      });
      service.listen();
      loader.join();
    } else if (*gradcheck) {
      double worst = 0;
      for (int k = 1; k <= gc_models; ++k) {
        auto fixture = make_gradcheck_fixture(static_cast<std::uint64_t>(k), gc_padded);
        const GradCheckResult r = grad_check(fixture.model, fixture.batch, gc_eps);
        std::cout << "model " << k << ": " << r.parameters_checked << " parameters, max relative error "
                  << std::scientific << std::setprecision(3) << r.max_relative_error << " (max abs "
                  << r.max_abs_error << ")\n";
        for (const auto& t : r.tensors) {
          std::cout << "  " << std::setw(8) << t.name << "  rel " << t.max_elementwise_relative_error << "  abs "
                    << t.max_abs_error << "\n";
        }
        worst = std::max(worst, r.max_relative_error);
      }
      std::cout << (worst < 1e-4 ? "gradcheck passed" : "gradcheck FAILED") << "\n";
      return worst < 1e-4 ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
