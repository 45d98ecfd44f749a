#include "fpwb/float_bits.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>

#include "fpwb/error.hpp"

namespace fpwb {

std::int64_t to_ordinal(double x) {
  if (x == 0.0) return 0;
  auto raw = std::bit_cast<std::uint64_t>(std::fabs(x));
  auto mag = static_cast<std::int64_t>(raw);
  return std::signbit(x) ? -mag : mag;
}

double from_ordinal(std::int64_t ordinal) {
  if (ordinal < 0) {
    return -std::bit_cast<double>(static_cast<std::uint64_t>(-ordinal));
  }
  return std::bit_cast<double>(static_cast<std::uint64_t>(ordinal));
}

std::uint64_t ulps(double a, double b) {
  bool na = std::isnan(a);
  bool nb = std::isnan(b);
  if (na && nb) return 0;
  if (na || nb) return std::numeric_limits<std::uint64_t>::max();
  std::int64_t oa = to_ordinal(a);
  std::int64_t ob = to_ordinal(b);
  // The difference of two ordinals always fits in 64 unsigned bits.
  return oa > ob ? static_cast<std::uint64_t>(oa) - static_cast<std::uint64_t>(ob)
                 : static_cast<std::uint64_t>(ob) - static_cast<std::uint64_t>(oa);
}

double bits_from_ulps(std::uint64_t distance) {
  if (distance == 0) return 0.0;
  double b = std::log2(1.0 + static_cast<double>(distance));
  return b > 64.0 ? 64.0 : b;
}

double bits(double a, double b) { return bits_from_ulps(ulps(a, b)); }

std::string to_hex(double value) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx",
                static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(value)));
  return buf;
}

double from_hex(std::string_view text) {
  if (text.size() != 18 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X')) {
    throw Error(ErrorCode::BadRequest,
                "expected a 0x-prefixed 16-digit bit pattern, got '" + std::string(text) + "'");
  }
  std::uint64_t v = 0;
  for (char c : text.substr(2)) {
    v <<= 4;
    if (c >= '0' && c <= '9') {
      v |= static_cast<std::uint64_t>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      v |= static_cast<std::uint64_t>(c - 'a' + 10);
    } else if (c >= 'A' && c <= 'F') {
      v |= static_cast<std::uint64_t>(c - 'A' + 10);
    } else {
      throw Error(ErrorCode::BadRequest, "bad hex digit in '" + std::string(text) + "'");
    }
  }
  return std::bit_cast<double>(v);
}

int binade(double x) {
  int e = 0;
  std::frexp(x, &e);
  return e - 1;
}

}  // namespace fpwb
