#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qwp/basis.hpp"
#include "qwp/measurement.hpp"
#include "qwp/protocol.hpp"
#include "qwp/state.hpp"
#include "qwp/types.hpp"

namespace qwp {

struct PredictionTarget {
  std::string subsystem;
  Basis basis;

  bool operator==(const PredictionTarget&) const = default;
};

// What an agent knows at prediction time: the state it believes describes
// the full system, the steps it knows will run before the target is read
// out, and where the readout happens.  The agent's own records live in
// `agent_record_basis` (computational if unset).
struct KnowledgeModel {
  std::string agent;
  StateVector believed_state;
  std::vector<Step> known_future_steps;
  PredictionTarget target;
  std::optional<Basis> agent_record_basis;
};

struct Prediction {
  PredictionTarget target;
  bool valid = true;
  // Nonempty exactly when not valid.
  std::optional<std::string> invalid_reason;
  // Present exactly when valid.
  std::optional<OutcomeDistribution> distribution;
  // Present when valid and some outcome carries probability at least
  // 1 - kCertaintyTolerance.
  std::optional<std::string> certain_outcome;
};

inline constexpr std::string_view kCatalyticInvalidReason =
    "catalytic measurement on agent in interval";

// Plain quantum prediction: evolve the believed state through the known
// steps (all must be unitary; prepare or collapse steps in the interval are
// errors) and take Born probabilities at the target.  Deliberately ignores
// catalytic steps aimed at the agent itself.
Prediction predict_q(const KnowledgeModel& model);

// True when no catalytic step in `actual_steps` measures the agent in a
// basis that superposes the agent's records, i.e. one that fails to be
// diagonal in the agent's record basis within `diagonality_tolerance`.
bool catalytic_interval_check(
    const KnowledgeModel& model, const std::vector<Step>& actual_steps,
    double diagonality_tolerance = kDiagonalityTolerance);

// Modified prediction rule: refuses to predict (valid = false, no
// distribution, no certain outcome) when the interval tampers with the
// agent's own records, otherwise defers to predict_q.
Prediction predict_q_star(
    const KnowledgeModel& model, const std::vector<Step>& actual_steps,
    double diagonality_tolerance = kDiagonalityTolerance);

enum class Verdict { agreement, contradiction, abstained };

std::string_view verdict_name(Verdict verdict);

struct ValidationReport {
  Verdict verdict;
  // Absent when the prediction abstained.
  std::optional<double> total_variation;

  bool operator==(const ValidationReport&) const = default;
};

// Half the L1 distance between two distributions, keyed by label; a label
// missing from one side counts as probability zero there.
double total_variation(const OutcomeDistribution& a,
                       const OutcomeDistribution& b);

// Confronts a prediction with observed statistics over the same outcome
// labels.  Invalid predictions abstain.  A certain prediction whose outcome
// falls below 1 - kCertaintyTolerance in `actual` is a contradiction;
// anything else agrees, with the total variation distance attached.
ValidationReport validate(const Prediction& prediction,
                          const OutcomeDistribution& actual);

}  // namespace qwp
