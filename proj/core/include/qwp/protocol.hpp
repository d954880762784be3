#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qwp/basis.hpp"
#include "qwp/layout.hpp"
#include "qwp/measurement.hpp"
#include "qwp/state.hpp"

namespace qwp {

struct PrepareStep {
  std::string subsystem;
  std::vector<cplx> state;

  bool operator==(const PrepareStep&) const = default;
};

struct PremeasureStep {
  std::string target;
  Basis basis;
  ObserverRegister observer;

  bool operator==(const PremeasureStep&) const = default;
};

struct CatalyticPremeasureStep {
  std::string agent;
  Basis cat_basis;
  ObserverRegister observer;

  bool operator==(const CatalyticPremeasureStep&) const = default;
};

struct CollapseStep {
  std::string target;
  Basis basis;

  bool operator==(const CollapseStep&) const = default;
};

struct ReportRequest {
  std::string subsystem;
  Basis basis;

  bool operator==(const ReportRequest&) const = default;
};

struct ReportStep {
  std::vector<ReportRequest> requests;

  bool operator==(const ReportStep&) const = default;
};

using Step = std::variant<PrepareStep, PremeasureStep, CatalyticPremeasureStep,
                          CollapseStep, ReportStep>;

enum class StepKind { prepare, premeasure, catalytic_premeasure, collapse, report };

StepKind step_kind(const Step& step);
std::string describe(const Step& step);

struct Protocol {
  SystemLayout layout;
  // Declared bases, in declaration order.  The first basis declared for a
  // subsystem doubles as its record basis when that subsystem observes.
  std::vector<Basis> bases;
  std::vector<Step> steps;

  bool operator==(const Protocol&) const = default;
};

// Structural problems that make a protocol unrunnable; empty means valid.
// Checks: names resolve, dimensions agree, prepares precede measurement
// steps, no subsystem prepared twice, observers distinct from targets.
std::vector<std::string> validate_protocol(const Protocol& protocol);

struct ReportTable {
  std::string subsystem;
  std::string basis;
  OutcomeDistribution distribution;
};

struct TraceEntry {
  std::string description;
  StepKind kind;
  StateVector state;
  std::vector<ReportTable> reports;
  std::optional<std::string> outcome;  // collapse steps only
};

struct Trace {
  std::vector<TraceEntry> entries;

  const StateVector& final_state() const { return entries.back().state; }
};

// Runs the protocol: leading Prepare steps define the initial product state
// (unprepared subsystems start in their first computational state), recorded
// as the trace's first entry; every later step appends one entry with the
// post-step state.  `seed` drives Collapse sampling and is required exactly
// when the protocol contains a Collapse step.
Trace run_protocol(const Protocol& protocol,
                   std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace qwp
