#pragma once

#include <cstdint>
#include <mutex>
#include <random>
#include <string>

namespace edgeflow::util {

// Opaque id generation. Seeded construction gives reproducible ids, which
// the simulator needs for byte-identical replays; default construction
// seeds from the OS.
class IdGen {
public:
  IdGen() : rng_(std::random_device{}()) {}
  explicit IdGen(std::uint64_t seed) : rng_(seed) {}

  // "<prefix>-0123456789abcdef"
  std::string next(const std::string& prefix) {
    std::lock_guard<std::mutex> lock(mu_);
    std::uint64_t v = rng_();
    static const char* hex = "0123456789abcdef";
    std::string s = prefix + "-";
    for (int i = 60; i >= 0; i -= 4) s.push_back(hex[(v >> i) & 0xf]);
    return s;
  }

private:
  std::mutex mu_;
  std::mt19937_64 rng_;
};

}  // namespace edgeflow::util
