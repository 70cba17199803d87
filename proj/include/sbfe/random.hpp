#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sbfe {

/// Derives independent, reproducible random streams from one master seed.
///
/// Each consumer asks for a stream by purpose name (and an optional index), so
/// adding a new consumer never shifts the numbers any existing one sees.
class StreamSplitter {
 public:
  explicit StreamSplitter(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t derive(std::string_view purpose, std::uint64_t index = 0) const;
  std::mt19937_64 stream(std::string_view purpose, std::uint64_t index = 0) const {
    return std::mt19937_64(derive(purpose, index));
  }

 private:
  std::uint64_t seed_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace sbfe
