#pragma once

#include "qwp/protocol.hpp"
#include "qwp/rng.hpp"

namespace qwp::gen {

struct ProtocolOptions {
  bool allow_catalytic = false;
  bool allow_collapse = false;
  std::size_t max_measures = 4;
};

// Random runnable protocol on three or four subsystems of dimension two or
// three.  The result is always expressible in the text form: every step
// references a declared basis, observers record into their first declared
// basis, and every observer is prepared ready and observes at most once.
Protocol random_protocol(SplitMix64& rng, const ProtocolOptions& options = {});

}  // namespace qwp::gen
