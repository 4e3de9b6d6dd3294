#include "mif/core.hpp"

#include <cmath>

#include "mif/automaton.hpp"

namespace mif {

std::string to_string(Output o) { return o.is_abort() ? "ABORT" : std::to_string(o.item()); }

void Instance::validate() const {
  if (n < 1) throw PreconditionError("instance: n must be at least 1");
  if (ell < 1 || ell > n) throw PreconditionError("instance: need 1 <= ell <= n");
  if (!(delta >= 0.0 && delta <= 1.0)) throw PreconditionError("instance: delta must lie in [0,1]");
}

std::size_t encoded_width(const AutomatonState& s) {
  BitSink sink;
  s.encode(sink);
  return sink.size();
}

}  // namespace mif
