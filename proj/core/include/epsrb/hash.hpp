#pragma once

#include "epsrb/linalg.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace epsrb {

/// 64-bit FNV-1a, fed with little-endian IEEE-754 bytes so digests are
/// identical across platforms. Used to tie basis archives to the family
/// they were trained on.
class Fnv1a {
 public:
  Fnv1a& bytes(std::span<const unsigned char> data);
  Fnv1a& value(double x);
  Fnv1a& value(std::uint64_t x);
  Fnv1a& values(std::span<const double> xs);
  Fnv1a& matrix(const Matrix& m);  // dimensions, then row-major entries
  Fnv1a& text(std::string_view s);

  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string to_hex(std::uint64_t digest);

}  // namespace epsrb
