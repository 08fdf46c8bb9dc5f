#include "sdcluster/digest.hpp"

#include <bit>
#include <cstdio>

namespace sdclust {

namespace {
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;
}

Fnv1a& Fnv1a::add(std::string_view bytes) noexcept {
  for (unsigned char c : bytes) {
    h_ ^= c;
    h_ *= kFnvPrime;
  }
  return *this;
}

Fnv1a& Fnv1a::add(std::uint64_t v) noexcept {
  for (int i = 0; i < 8; ++i) {
    h_ ^= (v >> (8 * i)) & 0xffU;
    h_ *= kFnvPrime;
  }
  return *this;
}

Fnv1a& Fnv1a::add(double v) noexcept { return add(std::bit_cast<std::uint64_t>(v)); }

Fnv1a& Fnv1a::add(std::span<const double> values) noexcept {
  for (double v : values) add(v);
  return *this;
}

std::string Fnv1a::hex() const { return to_hex(h_); }

std::uint64_t fnv1a(std::string_view bytes) noexcept { return Fnv1a{}.add(bytes).value(); }

std::string to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t h = splitmix64(root);
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

}  // namespace sdclust
