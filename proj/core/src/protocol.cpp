#include "qwp/protocol.hpp"

#include <cmath>
#include <stdexcept>

namespace qwp {

namespace {

struct KindVisitor {
  StepKind operator()(const PrepareStep&) const { return StepKind::prepare; }
  StepKind operator()(const PremeasureStep&) const {
    return StepKind::premeasure;
  }
  StepKind operator()(const CatalyticPremeasureStep&) const {
    return StepKind::catalytic_premeasure;
  }
  StepKind operator()(const CollapseStep&) const { return StepKind::collapse; }
  StepKind operator()(const ReportStep&) const { return StepKind::report; }
};

struct DescribeVisitor {
  std::string operator()(const PrepareStep& s) const {
    return "prepare " + s.subsystem;
  }
  std::string operator()(const PremeasureStep& s) const {
    return "measure " + s.target + " in " + s.basis.name() + " -> " +
           s.observer.subsystem();
  }
  std::string operator()(const CatalyticPremeasureStep& s) const {
    return "catmeasure " + s.agent + " in " + s.cat_basis.name() + " -> " +
           s.observer.subsystem();
  }
  std::string operator()(const CollapseStep& s) const {
    return "collapse " + s.target + " in " + s.basis.name();
  }
  std::string operator()(const ReportStep& s) const {
    std::string out = "report";
    for (const ReportRequest& r : s.requests) {
      out += " " + r.subsystem + ":" + r.basis.name();
    }
    return out;
  }
};

void check_measure_like(const Protocol& protocol, const std::string& target,
                        const Basis& basis, const ObserverRegister& observer,
                        const char* what, std::vector<std::string>& problems) {
  const SystemLayout& layout = protocol.layout;
  if (!layout.has(target)) {
    problems.push_back(std::string(what) + " targets unknown subsystem '" +
                       target + "'");
    return;
  }
  if (basis.subsystem() != target) {
    problems.push_back(std::string(what) + " basis '" + basis.name() +
                       "' does not belong to '" + target + "'");
  } else if (basis.dimension() != layout.dimension_of(target)) {
    problems.push_back(std::string(what) + " basis '" + basis.name() +
                       "' has wrong dimension for '" + target + "'");
  }
  if (!layout.has(observer.subsystem())) {
    problems.push_back(std::string(what) + " records into unknown subsystem '" +
                       observer.subsystem() + "'");
    return;
  }
  if (observer.subsystem() == target) {
    problems.push_back(std::string(what) + " observer '" +
                       observer.subsystem() + "' cannot record itself");
  }
  if (observer.record_basis().dimension() !=
      layout.dimension_of(observer.subsystem())) {
    problems.push_back("record basis of observer '" + observer.subsystem() +
                       "' has wrong dimension");
  }
  if (basis.subsystem() == target &&
      observer.record_indices().size() != basis.dimension()) {
    problems.push_back("observer '" + observer.subsystem() +
                       "' must hold one record per outcome of basis '" +
                       basis.name() + "'");
  }
}

}  // namespace

StepKind step_kind(const Step& step) { return std::visit(KindVisitor{}, step); }

std::string describe(const Step& step) {
  return std::visit(DescribeVisitor{}, step);
}

std::vector<std::string> validate_protocol(const Protocol& protocol) {
  std::vector<std::string> problems;
  const SystemLayout& layout = protocol.layout;
  if (layout.empty()) {
    problems.push_back("protocol declares no subsystem");
    return problems;
  }
  for (const Basis& b : protocol.bases) {
    if (!layout.has(b.subsystem())) {
      problems.push_back("basis '" + b.name() +
                         "' declared on unknown subsystem '" + b.subsystem() +
                         "'");
    } else if (b.dimension() != layout.dimension_of(b.subsystem())) {
      problems.push_back("basis '" + b.name() + "' on '" + b.subsystem() +
                         "' has wrong dimension");
    }
  }

  bool prefix_ended = false;
  std::vector<std::string> prepared;
  for (const Step& step : protocol.steps) {
    switch (step_kind(step)) {
      case StepKind::prepare: {
        const auto& s = std::get<PrepareStep>(step);
        if (prefix_ended) {
          problems.push_back("prepare " + s.subsystem +
                             " appears after a non-prepare step (prepares must form a prefix)");
        }
        if (!layout.has(s.subsystem)) {
          problems.push_back("prepare targets unknown subsystem '" +
                             s.subsystem + "'");
          break;
        }
        if (s.state.size() != layout.dimension_of(s.subsystem)) {
          problems.push_back("prepared state for '" + s.subsystem +
                             "' has wrong dimension");
        }
        double nrm = 0.0;
        for (const cplx& a : s.state) nrm += std::norm(a);
        if (nrm < 1e-24) {
          problems.push_back("prepared state for '" + s.subsystem +
                             "' is zero");
        }
        for (const std::string& p : prepared) {
          if (p == s.subsystem) {
            problems.push_back("subsystem '" + s.subsystem +
                               "' prepared twice");
          }
        }
        prepared.push_back(s.subsystem);
        break;
      }
      case StepKind::premeasure: {
        prefix_ended = true;
        const auto& s = std::get<PremeasureStep>(step);
        check_measure_like(protocol, s.target, s.basis, s.observer, "measure",
                           problems);
        break;
      }
      case StepKind::catalytic_premeasure: {
        prefix_ended = true;
        const auto& s = std::get<CatalyticPremeasureStep>(step);
        check_measure_like(protocol, s.agent, s.cat_basis, s.observer,
                           "catmeasure", problems);
        break;
      }
      case StepKind::collapse: {
        prefix_ended = true;
        const auto& s = std::get<CollapseStep>(step);
        if (!layout.has(s.target)) {
          problems.push_back("collapse targets unknown subsystem '" +
                             s.target + "'");
        } else if (s.basis.subsystem() != s.target) {
          problems.push_back("collapse basis '" + s.basis.name() +
                             "' does not belong to '" + s.target + "'");
        } else if (s.basis.dimension() != layout.dimension_of(s.target)) {
          problems.push_back("collapse basis '" + s.basis.name() +
                             "' has wrong dimension for '" + s.target + "'");
        }
        break;
      }
      case StepKind::report: {
        prefix_ended = true;
        const auto& s = std::get<ReportStep>(step);
        for (const ReportRequest& r : s.requests) {
          if (!layout.has(r.subsystem)) {
            problems.push_back("report names unknown subsystem '" +
                               r.subsystem + "'");
          } else if (r.basis.subsystem() != r.subsystem) {
            problems.push_back("report basis '" + r.basis.name() +
                               "' does not belong to '" + r.subsystem + "'");
          } else if (r.basis.dimension() != layout.dimension_of(r.subsystem)) {
            problems.push_back("report basis '" + r.basis.name() +
                               "' has wrong dimension for '" + r.subsystem +
                               "'");
          }
        }
        break;
      }
    }
  }
  return problems;
}

Trace run_protocol(const Protocol& protocol,
                   std::optional<std::uint64_t> seed) {
  std::vector<std::string> problems = validate_protocol(protocol);
  if (!problems.empty()) {
    std::string message = "invalid protocol:";
    for (const std::string& p : problems) message += "\n  " + p;
    throw std::invalid_argument(message);
  }

  bool has_collapse = false;
  for (const Step& step : protocol.steps) {
    if (step_kind(step) == StepKind::collapse) has_collapse = true;
  }
  if (has_collapse && !seed.has_value()) {
    throw std::invalid_argument(
        "protocol contains collapse steps and needs a seed");
  }

  // Initial product state from the Prepare prefix.
  std::vector<std::vector<cplx>> factors;
  factors.reserve(protocol.layout.size());
  for (const Subsystem& s : protocol.layout.subsystems()) {
    std::vector<cplx> e0(s.dimension, cplx{0.0, 0.0});
    e0[0] = cplx{1.0, 0.0};
    factors.push_back(std::move(e0));
  }
  std::size_t first_action = 0;
  while (first_action < protocol.steps.size() &&
         step_kind(protocol.steps[first_action]) == StepKind::prepare) {
    const auto& s = std::get<PrepareStep>(protocol.steps[first_action]);
    factors[protocol.layout.index_of(s.subsystem)] = s.state;
    ++first_action;
  }

  Trace trace;
  trace.entries.push_back(TraceEntry{
      "initial state", StepKind::prepare,
      make_product_state(protocol.layout, factors), {}, std::nullopt});

  SplitMix64 rng(seed.value_or(0));
  for (std::size_t i = first_action; i < protocol.steps.size(); ++i) {
    const Step& step = protocol.steps[i];
    const StateVector& current = trace.entries.back().state;
    switch (step_kind(step)) {
      case StepKind::prepare:
        throw std::logic_error("prepare after measurement slipped validation");
      case StepKind::premeasure: {
        const auto& s = std::get<PremeasureStep>(step);
        StateVector next = premeasure(current, s.target, s.basis, s.observer);
        trace.entries.push_back(TraceEntry{describe(step), StepKind::premeasure,
                                           std::move(next), {}, std::nullopt});
        break;
      }
      case StepKind::catalytic_premeasure: {
        const auto& s = std::get<CatalyticPremeasureStep>(step);
        StateVector next =
            catalytic_premeasure(current, s.agent, s.cat_basis, s.observer);
        trace.entries.push_back(TraceEntry{describe(step),
                                           StepKind::catalytic_premeasure,
                                           std::move(next), {}, std::nullopt});
        break;
      }
      case StepKind::collapse: {
        const auto& s = std::get<CollapseStep>(step);
        CollapseResult result = collapse(current, s.target, s.basis, rng);
        trace.entries.push_back(
            TraceEntry{describe(step) + " => " + result.outcome,
                       StepKind::collapse, std::move(result.state), {},
                       std::move(result.outcome)});
        break;
      }
      case StepKind::report: {
        const auto& s = std::get<ReportStep>(step);
        std::vector<ReportTable> tables;
        tables.reserve(s.requests.size());
        for (const ReportRequest& r : s.requests) {
          tables.push_back(ReportTable{r.subsystem, r.basis.name(),
                                       born(current, r.subsystem, r.basis)});
        }
        trace.entries.push_back(TraceEntry{describe(step), StepKind::report,
                                           current, std::move(tables),
                                           std::nullopt});
        break;
      }
    }
    const StateVector& latest = trace.entries.back().state;
    if (std::abs(norm(latest) - 1.0) > kNormTolerance) {
      throw std::logic_error("trace state drifted off norm");
    }
  }
  return trace;
}

}  // namespace qwp
