#include "edgeflow/util/digest.hpp"

#include <cstdio>
#include <fstream>
#include <vector>

#include "edgeflow/util/errors.hpp"

namespace edgeflow::util {

std::string Fnv64::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(state_));
  return buf;
}

std::string digest_file_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NetError("cannot open file for digest: " + path);
  Fnv64 d;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    d.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return d.hex();
}

std::string digest_bytes_hex(const void* data, std::size_t len) {
  Fnv64 d;
  d.update(data, len);
  return d.hex();
}

}  // namespace edgeflow::util
