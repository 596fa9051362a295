#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "codeqa/javatok.hpp"

namespace codeqa {

struct IngestStats {
  std::size_t lines = 0;
  std::size_t accepted = 0;
  std::size_t malformed_lines = 0;    // not a JSON object with the four fields
  std::size_t malformed_methods = 0;  // extract_features rejected the source
};

struct Corpus {
  std::vector<MethodRecord> records;
  IngestStats stats;

  /// Index of each record id. Built on demand by index().
  std::unordered_map<std::string, std::size_t> by_id;
  void index();
  const MethodRecord* find(const std::string& id) const;
};

/// Reads a line-delimited record file with fields id, project, source,
/// summary. Malformed lines are counted and skipped.
Corpus read_corpus(const std::string& path);
Corpus parse_corpus(const std::string& text);

/// Serializes raw records back to the line-delimited input format.
std::string corpus_line(const std::string& id, const std::string& project,
                        const std::string& source, const std::string& summary);

}  // namespace codeqa
