#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "codeqa/javatok.hpp"

namespace codeqa {

struct QATuple;

/// Token <-> id bijection. Ids 0..5 are reserved:
///   0 <pad>, 1 <unk>, 2 <st>, 3 </s>, 4 <funcode>, 5 nl
/// Remaining tokens are admitted by descending frequency, ties broken
/// lexicographically.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kStart = 2;
  static constexpr int kEnd = 3;
  static constexpr int kFuncode = 4;
  static constexpr int kNewline = 5;
  static constexpr std::size_t kReserved = 6;

  Vocabulary();
  /// Throws std::invalid_argument unless the list starts with the reserved
  /// tokens and has no duplicates.
  explicit Vocabulary(std::vector<std::string> id_to_token);

  /// max_size counts the reserved entries and must be >= kReserved.
  static Vocabulary build(const std::vector<const TokenSeq*>& sequences, std::size_t max_size);

  int id(std::string_view token) const;
  const std::string& token(int id) const { return id_to_token_.at(static_cast<std::size_t>(id)); }
  bool contains(std::string_view token) const;
  std::size_t size() const { return id_to_token_.size(); }
  const std::vector<std::string>& tokens() const { return id_to_token_; }

  std::vector<int> encode(const TokenSeq& tokens) const;
  TokenSeq decode(const std::vector<int>& ids) const;
  std::string checksum() const;

  bool operator==(const Vocabulary& other) const { return id_to_token_ == other.id_to_token_; }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, int> token_to_id_;
};

/// Input vocabulary from question and context tokens, output vocabulary from
/// answer tokens. Throws Error(EmptyCorpus) on an empty training split.
std::pair<Vocabulary, Vocabulary> build_vocab(const std::vector<QATuple>& train, std::size_t max_in,
                                              std::size_t max_out);

}  // namespace codeqa
