#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "qwp/measurement.hpp"
#include "qwp/prediction.hpp"
#include "qwp/scenarios.hpp"

using namespace qwp;

namespace {

constexpr double kTol = 1e-12;

Basis find_basis(const Protocol& p, const std::string& subsystem,
                 const std::string& name) {
  for (const Basis& b : p.bases) {
    if (b.subsystem() == subsystem && b.name() == name) return b;
  }
  throw std::logic_error("basis not found in test fixture");
}

// The up-branch friend's view: it saw up, so it believes |up, U, Y>, knows
// the record-superposing step is coming, and predicts the spin readout.
KnowledgeModel friend_model() {
  const Protocol p = builtin_protocol(Scenario::dog);
  std::vector<Step> future;
  for (const Step& step : p.steps) {
    const StepKind kind = step_kind(step);
    if (kind != StepKind::prepare && kind != StepKind::report) {
      future.push_back(step);
    }
  }
  const Trace begun = run_protocol(Protocol{p.layout, p.bases,
                                            {p.steps[0], p.steps[1], p.steps[2]}});
  return KnowledgeModel{"A", begun.final_state(), std::move(future),
                        PredictionTarget{"spin", find_basis(p, "spin", "z")},
                        find_basis(p, "A", "rec")};
}

}  // namespace

TEST_CASE("plain rule: the friend stays certain of up") {
  const Prediction prediction = predict_q(friend_model());
  CHECK(prediction.valid);
  REQUIRE(prediction.distribution.has_value());
  CHECK(prediction.distribution->probability("up") == doctest::Approx(1.0));
  REQUIRE(prediction.certain_outcome.has_value());
  CHECK(*prediction.certain_outcome == "up");
}

TEST_CASE("the certain prediction contradicts the scrambled statistics") {
  const Prediction prediction = predict_q(friend_model());
  OutcomeDistribution scrambled({{"up", 0.5}, {"down", 0.5}});
  const ValidationReport report = validate(prediction, scrambled);
  CHECK(report.verdict == Verdict::contradiction);
  REQUIRE(report.total_variation.has_value());
  CHECK(*report.total_variation == doctest::Approx(0.5).epsilon(kTol));
}

TEST_CASE("modified rule: the friend abstains when its records are touched") {
  const KnowledgeModel model = friend_model();
  CHECK(!catalytic_interval_check(model, model.known_future_steps));
  const Prediction prediction =
      predict_q_star(model, model.known_future_steps);
  CHECK(!prediction.valid);
  REQUIRE(prediction.invalid_reason.has_value());
  CHECK(*prediction.invalid_reason == kCatalyticInvalidReason);
  CHECK(!prediction.distribution.has_value());
  CHECK(!prediction.certain_outcome.has_value());

  OutcomeDistribution scrambled({{"up", 0.5}, {"down", 0.5}});
  const ValidationReport report = validate(prediction, scrambled);
  CHECK(report.verdict == Verdict::abstained);
  CHECK(!report.total_variation.has_value());
}

TEST_CASE("ordinary measurements never trigger an abstention") {
  const Protocol p = builtin_protocol(Scenario::pet);
  std::vector<Step> future;
  for (const Step& step : p.steps) {
    const StepKind kind = step_kind(step);
    if (kind != StepKind::prepare && kind != StepKind::report) {
      future.push_back(step);
    }
  }
  const Protocol prefix{p.layout, p.bases, {p.steps[0], p.steps[1], p.steps[2]}};
  const KnowledgeModel model{
      "A", run_protocol(prefix).final_state(), future,
      PredictionTarget{"spin", find_basis(p, "spin", "z")},
      find_basis(p, "A", "rec")};

  CHECK(catalytic_interval_check(model, future));
  const Prediction q = predict_q(model);
  const Prediction q_star = predict_q_star(model, future);
  CHECK(q_star.valid);
  REQUIRE(q.distribution.has_value());
  REQUIRE(q_star.distribution.has_value());
  CHECK(total_variation(*q.distribution, *q_star.distribution) < kTol);
  CHECK(q.distribution->probability("up") == doctest::Approx(0.5));

  const Trace actual_run = run_protocol(p);
  const OutcomeDistribution actual = born(
      actual_run.final_state(), "spin", find_basis(p, "spin", "z"));
  const ValidationReport report = validate(predict_q(model), actual);
  CHECK(report.verdict == Verdict::agreement);
  REQUIRE(report.total_variation.has_value());
  CHECK(*report.total_variation <= 1e-12);
}

TEST_CASE("catalytic steps on other agents pass the interval check") {
  KnowledgeModel model = friend_model();
  std::vector<Step> steps = model.known_future_steps;
  for (Step& step : steps) {
    if (step_kind(step) == StepKind::catalytic_premeasure) {
      std::get<CatalyticPremeasureStep>(step).agent = "B";
    }
  }
  // Nothing touches A's records anymore, so the modified rule predicts.
  model.agent = "A";
  CHECK(catalytic_interval_check(model, steps));
}

TEST_CASE("a diagonal cat basis does not count as tampering") {
  KnowledgeModel model = friend_model();
  std::vector<Step> steps = model.known_future_steps;
  const Basis relabeled("shuffled", "A",
                        {{"second", {cplx(0.0, 0.0), cplx(1.0, 0.0)}},
                         {"first", {cplx(0.0, 1.0), cplx(0.0, 0.0)}}});
  for (Step& step : steps) {
    if (step_kind(step) == StepKind::catalytic_premeasure) {
      std::get<CatalyticPremeasureStep>(step).cat_basis = relabeled;
    }
  }
  // Permuted and rephased records are still the same records.
  CHECK(catalytic_interval_check(model, steps));
}

TEST_CASE("the record basis defaults to computational when unset") {
  KnowledgeModel model = friend_model();
  model.agent_record_basis.reset();
  CHECK(!catalytic_interval_check(model, model.known_future_steps));
}

TEST_CASE("prepare and collapse steps invalidate a prediction interval") {
  KnowledgeModel model = friend_model();
  model.known_future_steps.push_back(
      PrepareStep{"spin", {cplx(1.0, 0.0), cplx(0.0, 0.0)}});
  CHECK_THROWS_AS(predict_q(model), std::invalid_argument);

  KnowledgeModel with_collapse = friend_model();
  with_collapse.known_future_steps.push_back(
      CollapseStep{"spin", with_collapse.target.basis});
  CHECK_THROWS_AS(predict_q(with_collapse), std::invalid_argument);
}

TEST_CASE("report steps inside the interval are skipped") {
  KnowledgeModel model = friend_model();
  model.known_future_steps.push_back(
      ReportStep{{ReportRequest{"spin", model.target.basis}}});
  const Prediction prediction = predict_q(model);
  CHECK(prediction.valid);
  CHECK(prediction.distribution->probability("up") == doctest::Approx(1.0));
}

TEST_CASE("total variation distance") {
  OutcomeDistribution a({{"x", 0.5}, {"y", 0.5}});
  OutcomeDistribution b({{"x", 1.0}, {"y", 0.0}});
  CHECK(total_variation(a, b) == doctest::Approx(0.5).epsilon(kTol));
  CHECK(total_variation(a, a) == 0.0);
  // Labels missing on one side count as zero there.
  OutcomeDistribution c({{"x", 1.0}});
  CHECK(total_variation(b, c) == 0.0);
  CHECK(total_variation(a, c) == doctest::Approx(0.5).epsilon(kTol));
}

TEST_CASE("validate requires the actual statistics to cover the outcome") {
  const Prediction prediction = predict_q(friend_model());
  OutcomeDistribution wrong_labels({{"left", 0.5}, {"right", 0.5}});
  CHECK_THROWS_AS(validate(prediction, wrong_labels), std::invalid_argument);
}

TEST_CASE("verdict names") {
  CHECK(verdict_name(Verdict::agreement) == "AGREEMENT");
  CHECK(verdict_name(Verdict::contradiction) == "CONTRADICTION");
  CHECK(verdict_name(Verdict::abstained) == "ABSTAINED");
}

TEST_CASE("an uncertain prediction always agrees, with the distance attached") {
  const Protocol p = builtin_protocol(Scenario::cat);
  std::vector<Step> future;
  for (const Step& step : p.steps) {
    const StepKind kind = step_kind(step);
    if (kind != StepKind::prepare && kind != StepKind::report) {
      future.push_back(step);
    }
  }
  const Protocol prefix{p.layout, p.bases, {p.steps[0], p.steps[1], p.steps[2]}};
  const KnowledgeModel model{
      "B", run_protocol(prefix).final_state(), future,
      PredictionTarget{"spin", find_basis(p, "spin", "z")},
      find_basis(p, "B", "rec")};
  const Prediction prediction = predict_q(model);
  CHECK(prediction.valid);
  CHECK(!prediction.certain_outcome.has_value());
  CHECK(prediction.distribution->probability("up") == doctest::Approx(0.5));

  OutcomeDistribution lopsided({{"up", 0.9}, {"down", 0.1}});
  const ValidationReport report = validate(prediction, lopsided);
  CHECK(report.verdict == Verdict::agreement);
  CHECK(*report.total_variation == doctest::Approx(0.4).epsilon(kTol));
}
