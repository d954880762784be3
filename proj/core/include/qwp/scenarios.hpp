#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "qwp/protocol.hpp"

namespace qwp {

enum class Scenario { cat, dog, pet };

std::optional<Scenario> scenario_from_name(std::string_view name);
std::string_view scenario_name(Scenario scenario);

// The built-in protocols.  `builtin_protocol` constructs the Protocol value
// directly; `scenario_source` is the same protocol in .qwp form (identical to
// the bundled protocol files), so both routes must run state-for-state equal.
Protocol builtin_protocol(Scenario scenario);
std::string_view scenario_source(Scenario scenario);

// Cat: spin prepared along +x, observer A measures it in z, super-observer B
// then measures A in the record-superposing (cat) basis.
Trace run_cat();

// Dog: the deduced process of an observer who saw "up" -- spin up, A holding
// record U -- followed by B's catalytic measurement of A.
Trace run_dog();

// Pet: spin along +x, A records the z outcome, B measures the *spin* in x,
// leaving A's records alone.
Trace run_pet();

Trace run_scenario(Scenario scenario);

// Cat extended by a second look: A's later z-measurement of the spin,
// recorded into the fresh register A2.
Protocol cat_second_look_protocol();

}  // namespace qwp
