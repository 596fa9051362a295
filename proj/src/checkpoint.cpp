#include "codeqa/checkpoint.hpp"

#include <cstring>

namespace codeqa {
namespace {

constexpr char kMagic[8] = {'C', 'Q', 'A', 'C', 'K', 'P', 'T', '\0'};

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(const std::string& in, std::size_t pos) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  return value;
}

[[noreturn]] void corrupt(const std::string& why) { throw Error(ErrorKind::CorruptCheckpoint, "corrupt checkpoint: " + why); }

std::string payload_of(const std::vector<CheckpointTensor>& tensors) {
  std::string out;
  for (const auto& t : tensors) {
    for (float v : t.values) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      put_le(out, bits);
    }
  }
  return out;
}

nlohmann::ordered_json vocab_json(const std::vector<std::string>& tokens) {
  nlohmann::ordered_json j;
  j["size"] = tokens.size();
  j["checksum"] = Vocabulary(tokens).checksum();
  j["tokens"] = tokens;
  return j;
}

}  // namespace

std::string encode_checkpoint(const CheckpointData& data) {
  const std::string payload = payload_of(data.tensors);
  nlohmann::ordered_json header;
  header["format"] = "codeqa-seq2seq";
  header["dims"] = {{"d_emb", data.dims.d_emb},
                    {"d_hid", data.dims.d_hid},
                    {"max_q_len", data.dims.max_q_len},
                    {"max_c_len", data.dims.max_c_len},
                    {"max_a_len", data.dims.max_a_len}};
  header["input_vocab"] = vocab_json(data.input_tokens);
  header["output_vocab"] = vocab_json(data.output_tokens);
  auto tensors = nlohmann::ordered_json::array();
  for (const auto& t : data.tensors) tensors.push_back({{"name", t.name}, {"rows", t.rows}, {"cols", t.cols}});
  header["tensors"] = tensors;
  header["payload_bytes"] = payload.size();
  header["payload_checksum"] = checksum_hex(payload);
  header["metadata"] = data.metadata.is_null() ? nlohmann::ordered_json::object() : data.metadata;
  const std::string text = header.dump(1);

  std::string out(kMagic, sizeof kMagic);
  put_le(out, kCheckpointVersion);
  put_le(out, static_cast<std::uint64_t>(text.size()));
  out += text;
  out += payload;
  return out;
}

CheckpointData decode_checkpoint(const std::string& bytes) {
  constexpr std::size_t prefix = sizeof kMagic + 4 + 8;
  if (bytes.size() < prefix) corrupt("truncated preamble");
  if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) corrupt("bad magic");
  const auto version = get_le<std::uint32_t>(bytes, sizeof kMagic);
  if (version != kCheckpointVersion) corrupt("unsupported version " + std::to_string(version));
  const auto header_len = get_le<std::uint64_t>(bytes, sizeof kMagic + 4);
  if (header_len > bytes.size() - prefix) corrupt("truncated header");

  nlohmann::ordered_json header =
      nlohmann::ordered_json::parse(bytes.begin() + prefix, bytes.begin() + static_cast<std::ptrdiff_t>(prefix + header_len),
                                    nullptr, false);
  if (header.is_discarded()) corrupt("unreadable header");

  CheckpointData data;
  try {
    const auto& d = header.at("dims");
    data.dims.d_emb = d.at("d_emb").get<int>();
    data.dims.d_hid = d.at("d_hid").get<int>();
    data.dims.max_q_len = d.at("max_q_len").get<int>();
    data.dims.max_c_len = d.at("max_c_len").get<int>();
    data.dims.max_a_len = d.at("max_a_len").get<int>();
    data.input_tokens = header.at("input_vocab").at("tokens").get<std::vector<std::string>>();
    data.output_tokens = header.at("output_vocab").at("tokens").get<std::vector<std::string>>();
    for (const char* key : {"input_vocab", "output_vocab"}) {
      const auto& v = header.at(key);
      const auto& tokens = std::string(key) == "input_vocab" ? data.input_tokens : data.output_tokens;
      if (v.at("size").get<std::size_t>() != tokens.size() ||
          v.at("checksum").get<std::string>() != Vocabulary(tokens).checksum()) {
        corrupt(std::string(key) + " checksum mismatch");
      }
    }
    data.metadata = header.value("metadata", nlohmann::ordered_json::object());

    const std::size_t payload_begin = prefix + header_len;
    const auto payload_bytes = header.at("payload_bytes").get<std::size_t>();
    if (bytes.size() - payload_begin != payload_bytes) corrupt("payload size mismatch");
    const std::string payload = bytes.substr(payload_begin);
    if (checksum_hex(payload) != header.at("payload_checksum").get<std::string>()) corrupt("payload checksum mismatch");

    std::size_t pos = 0;
    for (const auto& t : header.at("tensors")) {
      CheckpointTensor tensor;
      tensor.name = t.at("name").get<std::string>();
      tensor.rows = t.at("rows").get<long>();
      tensor.cols = t.at("cols").get<long>();
      if (tensor.rows < 0 || tensor.cols < 0) corrupt("negative shape");
      const auto count = static_cast<std::size_t>(tensor.rows * tensor.cols);
      if (pos + count * 4 > payload.size()) corrupt("tensor " + tensor.name + " exceeds payload");
      tensor.values.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        const auto bits = get_le<std::uint32_t>(payload, pos + 4 * i);
        std::memcpy(&tensor.values[i], &bits, sizeof bits);
      }
      pos += count * 4;
      data.tensors.push_back(std::move(tensor));
    }
    if (pos != payload.size()) corrupt("trailing payload bytes");
  } catch (const nlohmann::json::exception& e) {
    corrupt(std::string("bad header: ") + e.what());
  } catch (const std::invalid_argument& e) {
    corrupt(e.what());
  }
  return data;
}

}  // namespace codeqa
