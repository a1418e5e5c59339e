#include "roadrecon/util/hash.h"

#include <cstdio>
#include <fstream>
#include <iterator>

#include "roadrecon/errors.h"

namespace roadrecon {

std::string Fnv1a64::HexDigest() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(state_));
  return buf;
}

std::string HashBytes(std::string_view bytes) {
  Fnv1a64 h;
  h.Update(bytes);
  return h.HexDigest();
}

std::string HashFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return HashBytes(data);
}

}  // namespace roadrecon
