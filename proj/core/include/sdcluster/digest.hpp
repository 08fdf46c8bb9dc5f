#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>

namespace sdclust {

/// FNV-1a, 64 bit. Stable across platforms; used for content digests and seed keys.
class Fnv1a {
 public:
  Fnv1a& add(std::string_view bytes) noexcept;
  Fnv1a& add(std::uint64_t v) noexcept;
  Fnv1a& add(double v) noexcept;  // bit pattern
  Fnv1a& add(std::span<const double> values) noexcept;
  std::uint64_t value() const noexcept { return h_; }
  std::string hex() const;

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::uint64_t fnv1a(std::string_view bytes) noexcept;
std::string to_hex(std::uint64_t v);

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Derives an independent stream seed from a root seed and a key path.
/// Order of `parts` matters; equal inputs give equal seeds on every platform.
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> parts) noexcept;

}  // namespace sdclust
