#include "pdmp/random.hpp"

#include <cmath>

namespace pdmp {

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream RandomStream::indexed(std::uint64_t base_seed, std::uint64_t tag,
                                   std::uint64_t index) {
  const std::uint64_t s = mix_seed(mix_seed(mix_seed(base_seed) ^ tag) + index);
  return RandomStream(s);
}

double RandomStream::exp1() { return -std::log(uniform_open()); }

}  // namespace pdmp
