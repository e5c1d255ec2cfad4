#include "epsrb/hash.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>

namespace epsrb {

Fnv1a& Fnv1a::bytes(std::span<const unsigned char> data) {
  for (unsigned char c : data) {
    state_ ^= c;
    state_ *= 0x100000001b3ULL;
  }
  return *this;
}

Fnv1a& Fnv1a::value(std::uint64_t x) {
  std::array<unsigned char, 8> le{};
  for (std::size_t i = 0; i < 8; ++i) le[i] = static_cast<unsigned char>((x >> (8 * i)) & 0xffU);
  return bytes(le);
}

Fnv1a& Fnv1a::value(double x) {
  if (x == 0.0) x = 0.0;  // fold -0.0
  return value(std::bit_cast<std::uint64_t>(x));
}

Fnv1a& Fnv1a::values(std::span<const double> xs) {
  for (double x : xs) value(x);
  return *this;
}

Fnv1a& Fnv1a::matrix(const Matrix& m) {
  value(static_cast<std::uint64_t>(m.rows()));
  value(static_cast<std::uint64_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) value(m(i, j));
  }
  return *this;
}

Fnv1a& Fnv1a::text(std::string_view s) {
  value(static_cast<std::uint64_t>(s.size()));
  return bytes({reinterpret_cast<const unsigned char*>(s.data()), s.size()});
}

std::string to_hex(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

}  // namespace epsrb
