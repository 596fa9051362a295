#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "codeqa/seq2seq.hpp"

namespace codeqa {

/// Checkpoint layout:
///
///   8 bytes   magic "CQACKPT\0"
///   u32 LE    format version
///   u64 LE    header length
///   header    JSON text: dims, both vocabularies with checksums, the tensor
///             list (name, rows, cols) and the payload checksum
///   payload   every tensor as little-endian float32, column-major, in the
///             declared tensor order
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointTensor {
  std::string name;
  std::vector<float> values;
  long rows = 0;
  long cols = 0;
};

struct CheckpointData {
  ModelDims dims;
  std::vector<std::string> input_tokens;
  std::vector<std::string> output_tokens;
  std::vector<CheckpointTensor> tensors;
  nlohmann::ordered_json metadata;  // free-form, e.g. training manifest
};

std::string encode_checkpoint(const CheckpointData& data);
/// Throws Error(CorruptCheckpoint) on bad magic, truncation, checksum or shape
/// mismatch.
CheckpointData decode_checkpoint(const std::string& bytes);

template <typename Scalar>
CheckpointData to_checkpoint(const Seq2SeqModel<Scalar>& model, nlohmann::ordered_json metadata = {}) {
  CheckpointData data;
  data.dims = model.dims;
  data.input_tokens = model.input_vocab.tokens();
  data.output_tokens = model.output_vocab.tokens();
  data.metadata = std::move(metadata);
  model.params.for_each([&](const char* name, const Matrix<Scalar>& m) {
    CheckpointTensor t;
    t.name = name;
    t.rows = static_cast<long>(m.rows());
    t.cols = static_cast<long>(m.cols());
    t.values.resize(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.size(); ++i) t.values[static_cast<std::size_t>(i)] = static_cast<float>(m.data()[i]);
    data.tensors.push_back(std::move(t));
  });
  return data;
}

template <typename Scalar>
Seq2SeqModel<Scalar> from_checkpoint(const CheckpointData& data) {
  Seq2SeqModel<Scalar> model(Vocabulary(data.input_tokens), Vocabulary(data.output_tokens), data.dims);
  std::size_t k = 0;
  model.params.for_each([&](const char* name, Matrix<Scalar>& m) {
    if (k >= data.tensors.size()) throw Error(ErrorKind::CorruptCheckpoint, "missing tensor " + std::string(name));
    const auto& t = data.tensors[k++];
    if (t.name != name || t.rows != m.rows() || t.cols != m.cols()) {
      throw Error(ErrorKind::CorruptCheckpoint, "tensor " + t.name + " does not match model shape for " + name);
    }
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<Scalar>(t.values[static_cast<std::size_t>(i)]);
  });
  if (k != data.tensors.size()) throw Error(ErrorKind::CorruptCheckpoint, "unexpected extra tensors");
  return model;
}

template <typename Scalar>
void save_checkpoint(const Seq2SeqModel<Scalar>& model, const std::string& path, nlohmann::ordered_json metadata = {}) {
  write_file(path, encode_checkpoint(to_checkpoint(model, std::move(metadata))));
}

template <typename Scalar>
Seq2SeqModel<Scalar> load_checkpoint(const std::string& path, nlohmann::ordered_json* metadata = nullptr) {
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::CorruptCheckpoint, e.what());
  }
  const CheckpointData data = decode_checkpoint(bytes);
  if (metadata) *metadata = data.metadata;
  return from_checkpoint<Scalar>(data);
}

}  // namespace codeqa
