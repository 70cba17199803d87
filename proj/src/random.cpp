#include "sbfe/random.hpp"

namespace sbfe {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t StreamSplitter::derive(std::string_view purpose, std::uint64_t index) const {
  // FNV-1a over the purpose name, then mixed with seed and index.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : purpose) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(seed_ ^ h) + index);
}

}  // namespace sbfe
