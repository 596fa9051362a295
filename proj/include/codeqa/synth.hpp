#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace codeqa {

/// One generated Java method in the corpus input format.
struct SynthMethod {
  std::string id;
  std::string project;
  std::string source;
  std::string summary;
};

struct SynthOptions {
  std::size_t methods = 1000;
  /// 0 picks roughly one project per 20 methods (at least 3).
  std::size_t projects = 0;
  std::uint64_t seed = 7;
  /// Fraction of methods that carry a summary.
  double summary_rate = 1.0;
};

/// Deterministic synthetic corpus of small Java methods: accessors,
/// predicates, collection helpers, generic and array returns, varargs,
/// constructors, throws clauses and annotated overrides, grouped into
/// projects that each model one class. Summaries are unique across the corpus
/// and every project holds methods with distinct names, so each method can
/// get a negative summary.
std::vector<SynthMethod> synthesize_corpus(const SynthOptions& options);

/// The corpus as line-delimited records.
std::string format_synth_corpus(const std::vector<SynthMethod>& methods);

}  // namespace codeqa
