#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace codeqa {

/// Error categories surfaced by the pipeline. The CLI maps these to exit codes.
enum class ErrorKind {
  MalformedMethod,
  MissingSummary,
  NoNegativeAvailable,
  TooFewProjects,
  EmptyCorpus,
  ShapeMismatch,
  NonFiniteLoss,
  CorruptCheckpoint,
  BadTemplates,
  ManifestMismatch,
  Config,
  Io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// 64-bit FNV-1a. Used for artifact checksums and RNG stream derivation.
std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);
std::string checksum_hex(std::string_view bytes);
std::string file_checksum(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

/// Seeded random stream with platform-independent bounded draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Stream for one item, derived from a global seed and a stable key.
  static Rng derive(std::uint64_t seed, std::string_view key);

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, n). n must be > 0.
  std::size_t below(std::size_t n);
  /// Uniform in [0, 1) with 53 random bits.
  double unit();

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace codeqa
