#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qwp/basis.hpp"
#include "qwp/layout.hpp"
#include "qwp/types.hpp"

namespace qwp {

// Immutable normalized state over a SystemLayout, dense row-major amplitudes.
// Constructors normalize (rejecting the zero vector); operations that should
// preserve the norm verify it within kNormTolerance instead of renormalizing.
class StateVector {
 public:
  StateVector(SystemLayout layout, std::vector<cplx> amplitudes);

  const SystemLayout& layout() const { return layout_; }
  std::span<const cplx> amplitudes() const { return amplitudes_; }
  cplx amplitude(std::size_t joint) const { return amplitudes_.at(joint); }
  std::size_t dimension() const { return amplitudes_.size(); }

  bool operator==(const StateVector&) const = default;

 private:
  SystemLayout layout_;
  std::vector<cplx> amplitudes_;
};

struct Branch {
  std::string label;
  double weight = 0.0;
  // State of the remaining subsystems, normalized.  When `defined` is false
  // the branch has (numerically) zero weight and the residual is an arbitrary
  // placeholder kept only so tables retain one row per label.
  StateVector residual;
  bool defined = true;
};

// Tensor product of per-subsystem factors, one per layout entry, in order.
// Factors need not be normalized (each must be nonzero); the product is.
StateVector make_product_state(const SystemLayout& layout,
                               const std::vector<std::vector<cplx>>& factors);

// Applies `matrix` to the listed target subsystems (row-major joint index
// over `targets` in the given order), identity elsewhere.  The matrix must be
// unitary within kUnitaryTolerance.
StateVector apply_unitary(const StateVector& state,
                          const std::vector<std::string>& targets,
                          const Eigen::MatrixXcd& matrix);

// Schmidt-style decomposition of `state` along one subsystem in `basis`:
// |psi> = sum_k sqrt(w_k) |b_k> (x) |residual_k>.  Returns one branch per
// basis label, zero-weight branches flagged undefined.
std::vector<Branch> branch_decompose(const StateVector& state,
                                     std::string_view subsystem,
                                     const Basis& basis);

// Inverse of a single decomposition step: |vector>_subsystem (x) |residual>,
// placed at `subsystem`'s slot of `layout`.
StateVector compose_branch(const SystemLayout& layout,
                           std::string_view subsystem,
                           const std::vector<cplx>& vector,
                           const StateVector& residual);

cplx inner_product(const StateVector& a, const StateVector& b);
double norm(const StateVector& state);
// |<a|b>|^2, clamped to [0, 1].
double fidelity(const StateVector& a, const StateVector& b);

}  // namespace qwp
