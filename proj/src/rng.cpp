#include "opl/rng.hpp"

#include <cmath>

namespace opl {

std::uint64_t Rng::uniform_below(std::uint64_t n) {
  if (n == 0) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v = next_u64();
  while (v >= limit) v = next_u64();
  return v % n;
}

double Rng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * scale;
  has_spare_ = true;
  return u * scale;
}

int Rng::categorical(std::span<const double> probs) {
  const double u = uniform01();
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < probs.size(); ++j) {
    acc += probs[j];
    if (u < acc) return static_cast<int>(j);
  }
  return static_cast<int>(probs.size()) - 1;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  return splitmix64(base ^ splitmix64(fnv1a(tag)));
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index) {
  return splitmix64(derive_seed(base, tag) ^ splitmix64(index + 1));
}

}  // namespace opl
