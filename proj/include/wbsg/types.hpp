#pragma once

#include <cstddef>

namespace wbsg {

// Dense internal node index, 0..n-1.
using NodeId = std::size_t;

}  // namespace wbsg
