#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qwp/basis.hpp"
#include "qwp/rng.hpp"
#include "qwp/state.hpp"

namespace qwp {

// A subsystem acting as a measurement record.  `ready_index` names the state
// the register must hold before recording; `record_indices` name the state it
// is steered to for each outcome of the measured basis, in outcome order.
// All indices refer to vectors of `record_basis`, which must be a basis of
// `subsystem`.  The ready state may coincide with one of the records (the
// usual convention: ready = record 0).
class ObserverRegister {
 public:
  ObserverRegister(std::string subsystem, Basis record_basis,
                   std::size_t ready_index,
                   std::vector<std::size_t> record_indices);

  // Ready state = record 0, records = the first `outcomes` basis vectors.
  static ObserverRegister standard(const Basis& record_basis,
                                   std::size_t outcomes);

  const std::string& subsystem() const { return subsystem_; }
  const Basis& record_basis() const { return record_basis_; }
  std::size_t ready_index() const { return ready_index_; }
  const std::string& ready_label() const {
    return record_basis_.label(ready_index_);
  }
  const std::vector<std::size_t>& record_indices() const {
    return record_indices_;
  }
  const std::string& record_label(std::size_t outcome) const {
    return record_basis_.label(record_indices_.at(outcome));
  }

  bool operator==(const ObserverRegister&) const = default;

 private:
  std::string subsystem_;
  Basis record_basis_;
  std::size_t ready_index_;
  std::vector<std::size_t> record_indices_;
};

// Probability table over outcome labels, in basis order, summing to one
// within kNormTolerance.  Zero-weight outcomes keep their rows.
class OutcomeDistribution {
 public:
  explicit OutcomeDistribution(
      std::vector<std::pair<std::string, double>> entries);

  const std::vector<std::pair<std::string, double>>& entries() const {
    return entries_;
  }
  std::size_t size() const { return entries_.size(); }
  bool has(std::string_view label) const;
  double probability(std::string_view label) const;
  // Label of the most probable outcome.
  const std::string& mode() const;

  bool operator==(const OutcomeDistribution&) const = default;

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

// Unitary on (target (x) observer) that records the outcome of `basis` into
// the observer: |b_k>|ready> -> |b_k>|record_k>, completed by swapping
// ready <-> record_k on each branch.  Exposed so tests can rebuild the
// measurement from an explicit matrix.
Eigen::MatrixXcd dilation_unitary(const Basis& basis,
                                  const ObserverRegister& observer);

// Measurement as entanglement: applies dilation_unitary to (target,
// observer).  The observer must be ready: its marginal weight on the ready
// state must be at least 1 - kReadyTolerance.
StateVector premeasure(const StateVector& state, std::string_view target,
                       const Basis& basis, const ObserverRegister& observer);

// Identical mechanics to premeasure, distinct on purpose: a catalytic
// measurement records a basis that superposes another observer's records,
// and downstream prediction rules must be able to tell the two apart.
StateVector catalytic_premeasure(const StateVector& state,
                                 std::string_view agent, const Basis& cat_basis,
                                 const ObserverRegister& observer);

// Born probabilities of measuring `target` in `basis`, no state change.
OutcomeDistribution born(const StateVector& state, std::string_view target,
                         const Basis& basis);

struct CollapseResult {
  std::string outcome;
  StateVector state;
};

// Samples an outcome from born(state, target, basis) and projects: the result
// is the selected basis vector tensored with the normalized residual branch.
// Deterministic for a fixed generator state.
CollapseResult collapse(const StateVector& state, std::string_view target,
                        const Basis& basis, SplitMix64& rng);
CollapseResult collapse(const StateVector& state, std::string_view target,
                        const Basis& basis, std::uint64_t seed);

}  // namespace qwp
