#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace wbsg {

// Shortest form that round-trips a double: 17 significant digits.
std::string format_real(double value);

// 64-bit FNV-1a, used for stable digests that do not depend on the
// standard library's std::hash.
class Fnv1a {
 public:
  void add(std::string_view bytes);
  void add(std::uint64_t value);
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace wbsg
