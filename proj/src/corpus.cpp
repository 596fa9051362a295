#include "codeqa/corpus.hpp"

#include <json.hpp>
#include <sstream>

#include "codeqa/common.hpp"

namespace codeqa {

void Corpus::index() {
  by_id.clear();
  for (std::size_t i = 0; i < records.size(); ++i) by_id.emplace(records[i].id, i);
}

const MethodRecord* Corpus::find(const std::string& id) const {
  const auto it = by_id.find(id);
  return it == by_id.end() ? nullptr : &records[it->second];
}

Corpus parse_corpus(const std::string& text) {
  Corpus corpus;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++corpus.stats.lines;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      ++corpus.stats.malformed_lines;
      continue;
    }
    const auto field = [&](const char* key) -> const nlohmann::json* {
      const auto it = j.find(key);
      return (it != j.end() && it->is_string()) ? &*it : nullptr;
    };
    const auto* id = field("id");
    const auto* project = field("project");
    const auto* source = field("source");
    const auto* summary = field("summary");
    if (!id || !project || !source) {
      ++corpus.stats.malformed_lines;
      continue;
    }
    try {
      corpus.records.push_back(make_record(id->get<std::string>(), project->get<std::string>(),
                                           source->get<std::string>(),
                                           summary ? summary->get<std::string>() : ""));
      ++corpus.stats.accepted;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::MalformedMethod) throw;
      ++corpus.stats.malformed_methods;
    }
  }
  corpus.index();
  return corpus;
}

Corpus read_corpus(const std::string& path) { return parse_corpus(read_file(path)); }

std::string corpus_line(const std::string& id, const std::string& project,
                        const std::string& source, const std::string& summary) {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["project"] = project;
  j["source"] = source;
  j["summary"] = summary;
  return j.dump();
}

}  // namespace codeqa
