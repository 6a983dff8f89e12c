// Compiles the node-side kernel header on its own. If node_actor.hpp pulled
// in the graph type, DiGraph below would be found and the build would fail.
#include "wbsg/node_actor.hpp"

#include <cstdio>
#include <type_traits>

namespace wbsg {
struct DiGraph {
  int marker = 0;
};
}  // namespace wbsg

static_assert(std::is_same_v<decltype(&wbsg::node_round),
                             wbsg::NodeRoundOutput (*)(const wbsg::NodeActor&, const wbsg::Inbox&,
                                                       double)>,
              "node_round sees only the actor, its inbox and the step size");

int main() {
  wbsg::DiGraph probe;
  std::puts(probe.marker == 0 ? "node boundary ok" : "unexpected");
  return probe.marker;
}
