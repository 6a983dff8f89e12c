#include "wbsg/csv.hpp"

#include <fmt/format.h>

namespace wbsg {

std::string format_real(double value) { return fmt::format("{:.17g}", value); }

void Fnv1a::add(std::string_view bytes) {
  for (unsigned char c : bytes) {
    state_ ^= c;
    state_ *= 0x100000001b3ULL;
  }
}

void Fnv1a::add(std::uint64_t value) {
  for (int k = 0; k < 8; ++k) {
    state_ ^= (value >> (8 * k)) & 0xffU;
    state_ *= 0x100000001b3ULL;
  }
}

}  // namespace wbsg
