#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace roadrecon {

// 64-bit FNV-1a. Used for output manifests, not for security.
class Fnv1a64 {
 public:
  void Update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
  }
  uint64_t Digest() const { return state_; }
  std::string HexDigest() const;

 private:
  uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string HashBytes(std::string_view bytes);
// Throws IoError when the file cannot be read.
std::string HashFile(const std::string& path);

}  // namespace roadrecon
