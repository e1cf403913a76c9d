#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace edgeflow::util {

// Streaming FNV-1a (64-bit). The transfer service's integrity digest; the
// algorithm name travels in reports so a stronger one can replace it
// without a wire change.
class Fnv64 {
public:
  static constexpr std::uint64_t kBasis = 0xcbf29ce484222325ULL;
  static constexpr std::uint64_t kPrime = 0x100000001b3ULL;

  void update(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      state_ ^= p[i];
      state_ *= kPrime;
    }
  }

  std::uint64_t value() const { return state_; }
  std::string hex() const;

private:
  std::uint64_t state_ = kBasis;
};

inline constexpr const char* kDigestAlgorithm = "fnv1a-64";

// Digest of a whole file; throws NetError if the file cannot be read.
std::string digest_file_hex(const std::string& path);

std::string digest_bytes_hex(const void* data, std::size_t len);

}  // namespace edgeflow::util
