#include "colorref/rng.hpp"

#include "colorref/error.hpp"

namespace colorref {

Rng Rng::derive(std::initializer_list<std::uint64_t> keys) {
  // splitmix64 folding of the keys into a single seed
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  for (auto k : keys) {
    state ^= k + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    state = z ^ (z >> 31);
  }
  return Rng(state);
}

std::uint64_t Rng::uniform_int(std::uint64_t n) {
  if (n == 0) throw ContractError("Rng::uniform_int: n must be positive");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return x % n;
}

}  // namespace colorref
