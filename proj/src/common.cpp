#include "codeqa/common.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace codeqa {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedMethod: return "MalformedMethod";
    case ErrorKind::MissingSummary: return "MissingSummary";
    case ErrorKind::NoNegativeAvailable: return "NoNegativeAvailable";
    case ErrorKind::TooFewProjects: return "TooFewProjects";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::CorruptCheckpoint: return "CorruptCheckpoint";
    case ErrorKind::BadTemplates: return "BadTemplates";
    case ErrorKind::ManifestMismatch: return "ManifestMismatch";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

std::string checksum_hex(std::string_view bytes) { return hex64(fnv1a64(bytes)); }

std::string file_checksum(const std::string& path) {
  return checksum_hex(read_file(path));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

Rng Rng::derive(std::uint64_t seed, std::string_view key) {
  std::string mixed = std::to_string(seed);
  mixed.push_back('\x1f');
  mixed.append(key);
  return Rng(fnv1a64(mixed));
}

std::size_t Rng::below(std::size_t n) {
  // Rejection sampling keeps draws unbiased and identical on every platform.
  const std::uint64_t bound = n;
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

double Rng::unit() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

}  // namespace codeqa
