#include "qwp/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qwp {

ObserverRegister::ObserverRegister(std::string subsystem, Basis record_basis,
                                   std::size_t ready_index,
                                   std::vector<std::size_t> record_indices)
    : subsystem_(std::move(subsystem)),
      record_basis_(std::move(record_basis)),
      ready_index_(ready_index),
      record_indices_(std::move(record_indices)) {
  if (record_basis_.subsystem() != subsystem_) {
    throw std::invalid_argument("record basis does not belong to observer '" +
                                subsystem_ + "'");
  }
  if (ready_index_ >= record_basis_.dimension()) {
    throw std::invalid_argument("observer ready index out of range");
  }
  if (record_indices_.empty()) {
    throw std::invalid_argument("observer needs at least one record state");
  }
  for (std::size_t i = 0; i < record_indices_.size(); ++i) {
    if (record_indices_[i] >= record_basis_.dimension()) {
      throw std::invalid_argument("observer record index out of range");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (record_indices_[j] == record_indices_[i]) {
        throw std::invalid_argument("observer record states must be distinct");
      }
    }
  }
}

ObserverRegister ObserverRegister::standard(const Basis& record_basis,
                                            std::size_t outcomes) {
  std::vector<std::size_t> records(outcomes);
  for (std::size_t k = 0; k < outcomes; ++k) records[k] = k;
  return ObserverRegister(record_basis.subsystem(), record_basis, 0,
                          std::move(records));
}

OutcomeDistribution::OutcomeDistribution(
    std::vector<std::pair<std::string, double>> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) {
    throw std::invalid_argument("distribution must have at least one outcome");
  }
  double sum = 0.0;
  for (const auto& [label, p] : entries_) {
    if (label.empty()) {
      throw std::invalid_argument("distribution label must be nonempty");
    }
    if (p < -kNormTolerance || p > 1.0 + kNormTolerance) {
      throw std::invalid_argument("probability out of range for '" + label +
                                  "'");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kNormTolerance) {
    throw std::invalid_argument("probabilities must sum to one");
  }
}

bool OutcomeDistribution::has(std::string_view label) const {
  for (const auto& [l, p] : entries_) {
    if (l == label) return true;
  }
  return false;
}

double OutcomeDistribution::probability(std::string_view label) const {
  for (const auto& [l, p] : entries_) {
    if (l == label) return p;
  }
  throw std::invalid_argument("distribution has no outcome '" +
                              std::string(label) + "'");
}

const std::string& OutcomeDistribution::mode() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].second > entries_[best].second) best = i;
  }
  return entries_[best].first;
}

Eigen::MatrixXcd dilation_unitary(const Basis& basis,
                                  const ObserverRegister& observer) {
  const std::size_t dt = basis.dimension();
  const std::size_t dobs = observer.record_basis().dimension();
  if (observer.record_indices().size() != dt) {
    throw std::invalid_argument(
        "observer must have one record state per outcome");
  }

  Eigen::MatrixXcd unitary = Eigen::MatrixXcd::Zero(dt * dobs, dt * dobs);
  for (std::size_t k = 0; k < dt; ++k) {
    // Projector onto outcome k of the measured basis.
    Eigen::MatrixXcd projector(dt, dt);
    for (std::size_t r = 0; r < dt; ++r) {
      for (std::size_t c = 0; c < dt; ++c) {
        projector(r, c) = basis.at(k).components[r] *
                          std::conj(basis.at(k).components[c]);
      }
    }
    // Permutation of the observer's record basis swapping ready <-> record_k.
    std::vector<std::size_t> perm(dobs);
    for (std::size_t j = 0; j < dobs; ++j) perm[j] = j;
    std::swap(perm[observer.ready_index()],
              perm[observer.record_indices()[k]]);
    Eigen::MatrixXcd shift = Eigen::MatrixXcd::Zero(dobs, dobs);
    for (std::size_t j = 0; j < dobs; ++j) {
      const std::vector<cplx>& from = observer.record_basis().at(j).components;
      const std::vector<cplx>& to =
          observer.record_basis().at(perm[j]).components;
      for (std::size_t r = 0; r < dobs; ++r) {
        for (std::size_t c = 0; c < dobs; ++c) {
          shift(r, c) += to[r] * std::conj(from[c]);
        }
      }
    }
    // Row-major (target, observer) ordering: kron(projector, shift).
    for (std::size_t tr = 0; tr < dt; ++tr) {
      for (std::size_t tc = 0; tc < dt; ++tc) {
        for (std::size_t orow = 0; orow < dobs; ++orow) {
          for (std::size_t ocol = 0; ocol < dobs; ++ocol) {
            unitary(tr * dobs + orow, tc * dobs + ocol) +=
                projector(tr, tc) * shift(orow, ocol);
          }
        }
      }
    }
  }
  return unitary;
}

StateVector premeasure(const StateVector& state, std::string_view target,
                       const Basis& basis, const ObserverRegister& observer) {
  if (observer.subsystem() == target) {
    throw std::invalid_argument("observer cannot record itself");
  }
  if (basis.subsystem() != target) {
    throw std::invalid_argument("basis '" + basis.name() +
                                "' does not belong to target '" +
                                std::string(target) + "'");
  }
  // Ready precondition: the observer marginal must sit on the ready state.
  std::vector<Branch> marginal =
      branch_decompose(state, observer.subsystem(), observer.record_basis());
  double ready_weight = marginal[observer.ready_index()].weight;
  if (ready_weight < 1.0 - kReadyTolerance) {
    throw std::runtime_error("observer '" + observer.subsystem() +
                             "' is not in its ready state");
  }
  Eigen::MatrixXcd unitary = dilation_unitary(basis, observer);
  return apply_unitary(state, {std::string(target), observer.subsystem()},
                       unitary);
}

StateVector catalytic_premeasure(const StateVector& state,
                                 std::string_view agent, const Basis& cat_basis,
                                 const ObserverRegister& observer) {
  return premeasure(state, agent, cat_basis, observer);
}

OutcomeDistribution born(const StateVector& state, std::string_view target,
                         const Basis& basis) {
  std::vector<Branch> branches = branch_decompose(state, target, basis);
  std::vector<std::pair<std::string, double>> entries;
  entries.reserve(branches.size());
  for (const Branch& b : branches) {
    entries.emplace_back(b.label, b.weight);
  }
  return OutcomeDistribution(std::move(entries));
}

CollapseResult collapse(const StateVector& state, std::string_view target,
                        const Basis& basis, SplitMix64& rng) {
  std::vector<Branch> branches = branch_decompose(state, target, basis);
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t pick = branches.size();
  for (std::size_t k = 0; k < branches.size(); ++k) {
    if (!branches[k].defined) continue;
    cumulative += branches[k].weight;
    if (u < cumulative) {
      pick = k;
      break;
    }
  }
  if (pick == branches.size()) {
    // u landed in the float gap above the last nonzero cumulative weight.
    for (std::size_t k = branches.size(); k-- > 0;) {
      if (branches[k].defined) {
        pick = k;
        break;
      }
    }
  }
  const Branch& chosen = branches[pick];
  StateVector projected =
      compose_branch(state.layout(), target, basis.at(pick).components,
                     chosen.residual);
  return CollapseResult{chosen.label, std::move(projected)};
}

CollapseResult collapse(const StateVector& state, std::string_view target,
                        const Basis& basis, std::uint64_t seed) {
  SplitMix64 rng(seed);
  return collapse(state, target, basis, rng);
}

}  // namespace qwp
