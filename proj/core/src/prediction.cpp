#include "qwp/prediction.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <variant>

namespace qwp {

namespace {

Basis agent_record_basis_of(const KnowledgeModel& model) {
  if (model.agent_record_basis) return *model.agent_record_basis;
  const SystemLayout& layout = model.believed_state.layout();
  if (!layout.has(model.agent)) {
    throw std::invalid_argument("knowledge model agent '" + model.agent +
                                "' is not part of the believed state");
  }
  return Basis::computational(model.agent, layout.dimension_of(model.agent));
}

}  // namespace

Prediction predict_q(const KnowledgeModel& model) {
  StateVector state = model.believed_state;
  for (const Step& step : model.known_future_steps) {
    if (std::holds_alternative<PrepareStep>(step)) {
      throw std::invalid_argument(
          "prediction interval cannot contain prepare steps");
    }
    if (std::holds_alternative<CollapseStep>(step)) {
      throw std::invalid_argument(
          "prediction interval cannot contain collapse steps");
    }
    if (const auto* pm = std::get_if<PremeasureStep>(&step)) {
      state = premeasure(state, pm->target, pm->basis, pm->observer);
    } else if (const auto* cm = std::get_if<CatalyticPremeasureStep>(&step)) {
      state =
          catalytic_premeasure(state, cm->agent, cm->cat_basis, cm->observer);
    }
    // Report steps read nothing out and are skipped.
  }

  Prediction prediction{model.target, true, std::nullopt, std::nullopt,
                        std::nullopt};
  prediction.distribution =
      born(state, model.target.subsystem, model.target.basis);
  double best = -1.0;
  const std::string* best_label = nullptr;
  for (const auto& [label, probability] : prediction.distribution->entries()) {
    if (probability > best) {
      best = probability;
      best_label = &label;
    }
  }
  if (best_label != nullptr && best >= 1.0 - kCertaintyTolerance) {
    prediction.certain_outcome = *best_label;
  }
  return prediction;
}

bool catalytic_interval_check(const KnowledgeModel& model,
                              const std::vector<Step>& actual_steps,
                              double diagonality_tolerance) {
  const Basis record = agent_record_basis_of(model);
  for (const Step& step : actual_steps) {
    const auto* cm = std::get_if<CatalyticPremeasureStep>(&step);
    if (cm == nullptr || cm->agent != model.agent) continue;
    if (!cm->cat_basis.is_diagonal_in(record, diagonality_tolerance)) {
      return false;
    }
  }
  return true;
}

Prediction predict_q_star(const KnowledgeModel& model,
                          const std::vector<Step>& actual_steps,
                          double diagonality_tolerance) {
  if (!catalytic_interval_check(model, actual_steps, diagonality_tolerance)) {
    return Prediction{model.target, false,
                      std::string(kCatalyticInvalidReason), std::nullopt,
                      std::nullopt};
  }
  return predict_q(model);
}

std::string_view verdict_name(Verdict verdict) {
  switch (verdict) {
    case Verdict::agreement: return "AGREEMENT";
    case Verdict::contradiction: return "CONTRADICTION";
    case Verdict::abstained: return "ABSTAINED";
  }
  throw std::logic_error("unreachable");
}

double total_variation(const OutcomeDistribution& a,
                       const OutcomeDistribution& b) {
  std::map<std::string, double> diff;
  for (const auto& [label, probability] : a.entries()) {
    diff[label] += probability;
  }
  for (const auto& [label, probability] : b.entries()) {
    diff[label] -= probability;
  }
  double sum = 0.0;
  for (const auto& [label, delta] : diff) sum += std::abs(delta);
  return 0.5 * sum;
}

ValidationReport validate(const Prediction& prediction,
                          const OutcomeDistribution& actual) {
  for (const auto& vec : prediction.target.basis.vectors()) {
    if (!actual.has(vec.label)) {
      throw std::invalid_argument(
          "observed distribution is missing outcome '" + vec.label +
          "' of the prediction target");
    }
  }
  if (!prediction.valid) {
    return ValidationReport{Verdict::abstained, std::nullopt};
  }
  if (!prediction.distribution) {
    throw std::invalid_argument("valid prediction carries no distribution");
  }
  const double tv = total_variation(*prediction.distribution, actual);
  Verdict verdict = Verdict::agreement;
  if (prediction.certain_outcome &&
      actual.probability(*prediction.certain_outcome) <
          1.0 - kCertaintyTolerance) {
    verdict = Verdict::contradiction;
  }
  return ValidationReport{verdict, tv};
}

}  // namespace qwp
