#include "codeqa/vocab.hpp"

#include <algorithm>
#include <stdexcept>

#include "codeqa/common.hpp"
#include "codeqa/qagen.hpp"

namespace codeqa {
namespace {

const std::vector<std::string>& reserved() {
  static const std::vector<std::string> r = {std::string(tok::kPad),     std::string(tok::kUnk),
                                             std::string(tok::kStart),   std::string(tok::kEnd),
                                             std::string(tok::kFuncode), std::string(tok::kNewline)};
  return r;
}

}  // namespace

Vocabulary::Vocabulary() : Vocabulary(reserved()) {}

Vocabulary::Vocabulary(std::vector<std::string> id_to_token) : id_to_token_(std::move(id_to_token)) {
  const auto& r = reserved();
  if (id_to_token_.size() < r.size() || !std::equal(r.begin(), r.end(), id_to_token_.begin())) {
    throw std::invalid_argument("vocabulary must start with the reserved tokens");
  }
  token_to_id_.reserve(id_to_token_.size());
  for (std::size_t i = 0; i < id_to_token_.size(); ++i) {
    if (!token_to_id_.emplace(id_to_token_[i], static_cast<int>(i)).second) {
      throw std::invalid_argument("duplicate vocabulary token '" + id_to_token_[i] + "'");
    }
  }
}

Vocabulary Vocabulary::build(const std::vector<const TokenSeq*>& sequences, std::size_t max_size) {
  if (max_size < kReserved) {
    throw std::invalid_argument("vocabulary size must be at least " + std::to_string(kReserved));
  }
  const auto& r = reserved();
  std::unordered_map<std::string, std::size_t> freq;
  for (const auto* seq : sequences) {
    for (const auto& t : *seq) ++freq[t];
  }
  for (const auto& t : r) freq.erase(t);

  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> tokens = r;
  for (const auto& [t, n] : ranked) {
    if (tokens.size() >= max_size) break;
    tokens.push_back(t);
  }
  return Vocabulary(std::move(tokens));
}

int Vocabulary::id(std::string_view token) const {
  const auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return token_to_id_.count(std::string(token)) > 0;
}

std::vector<int> Vocabulary::encode(const TokenSeq& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

TokenSeq Vocabulary::decode(const std::vector<int>& ids) const {
  TokenSeq out;
  out.reserve(ids.size());
  for (int i : ids) out.push_back(token(i));
  return out;
}

std::string Vocabulary::checksum() const {
  std::string joined;
  for (const auto& t : id_to_token_) {
    joined += t;
    joined.push_back('\n');
  }
  return checksum_hex(joined);
}

std::pair<Vocabulary, Vocabulary> build_vocab(const std::vector<QATuple>& train, std::size_t max_in,
                                              std::size_t max_out) {
  if (train.empty()) throw Error(ErrorKind::EmptyCorpus, "cannot build vocabularies from an empty split");
  std::vector<const TokenSeq*> in, out;
  for (const auto& t : train) {
    in.push_back(&t.question);
    in.push_back(&t.context);
    out.push_back(&t.answer);
  }
  return {Vocabulary::build(in, max_in), Vocabulary::build(out, max_out)};
}

}  // namespace codeqa
