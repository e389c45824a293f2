#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rmtfree {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t label_hash(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : label) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Every random stream is keyed by (master seed, purpose label, counter), so
// trials can run in any order on any thread and still draw the same numbers.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                                 std::uint64_t counter) {
  return splitmix64(splitmix64(master ^ label_hash(label)) + counter);
}

inline Engine make_engine(std::uint64_t master, std::string_view label,
                          std::uint64_t counter) {
  std::seed_seq seq{derive_seed(master, label, counter)};
  return Engine(seq);
}

}  // namespace rmtfree
