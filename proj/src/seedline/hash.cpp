#include "seedline/hash.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "seedline/error.hpp"

namespace seedline {

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return std::string(buf);
}

std::string hash_bytes(std::string_view data) { return "fnv1a64:" + hex64(fnv1a64(data)); }

std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for hashing");
  std::uint64_t h = kFnvOffset;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= kFnvPrime;
    }
  }
  return "fnv1a64:" + hex64(h);
}

} // namespace seedline
