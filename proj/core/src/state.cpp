#include "qwp/state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qwp {

namespace {

double vector_norm(std::span<const cplx> v) {
  double sum = 0.0;
  for (const cplx& a : v) sum += std::norm(a);
  return std::sqrt(sum);
}

void check_unitary(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("matrix must be square");
  }
  Eigen::MatrixXcd gram = m.adjoint() * m;
  double defect = (gram - Eigen::MatrixXcd::Identity(m.rows(), m.cols()))
                      .cwiseAbs()
                      .maxCoeff();
  if (defect > kUnitaryTolerance) {
    throw std::invalid_argument("matrix is not unitary");
  }
}

}  // namespace

StateVector::StateVector(SystemLayout layout, std::vector<cplx> amplitudes)
    : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != layout_.total_dimension()) {
    throw std::invalid_argument("amplitude count does not match layout");
  }
  double n = vector_norm(amplitudes_);
  if (n < 1e-12) {
    throw std::invalid_argument("state vector must be nonzero");
  }
  if (std::abs(n - 1.0) > 1e-15) {
    for (cplx& a : amplitudes_) a /= n;
  }
}

StateVector make_product_state(const SystemLayout& layout,
                               const std::vector<std::vector<cplx>>& factors) {
  if (factors.size() != layout.size()) {
    throw std::invalid_argument("need one factor per subsystem");
  }
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].size() != layout.at(i).dimension) {
      throw std::invalid_argument("factor for '" + layout.at(i).name +
                                  "' has wrong dimension");
    }
    if (vector_norm(factors[i]) < 1e-12) {
      throw std::invalid_argument("factor for '" + layout.at(i).name +
                                  "' is zero");
    }
  }
  std::vector<cplx> amps{cplx{1.0, 0.0}};
  for (const std::vector<cplx>& f : factors) {
    std::vector<cplx> next(amps.size() * f.size());
    std::size_t pos = 0;
    for (const cplx& a : amps) {
      for (const cplx& b : f) next[pos++] = a * b;
    }
    amps = std::move(next);
  }
  return StateVector(layout, std::move(amps));
}

StateVector apply_unitary(const StateVector& state,
                          const std::vector<std::string>& targets,
                          const Eigen::MatrixXcd& matrix) {
  if (targets.empty()) {
    throw std::invalid_argument("apply_unitary needs at least one target");
  }
  const SystemLayout& layout = state.layout();
  std::vector<std::size_t> tindex;
  tindex.reserve(targets.size());
  std::size_t block = 1;
  for (const std::string& name : targets) {
    std::size_t i = layout.index_of(name);
    for (std::size_t seen : tindex) {
      if (seen == i) {
        throw std::invalid_argument("duplicate target '" + name + "'");
      }
    }
    tindex.push_back(i);
    block *= layout.at(i).dimension;
  }
  if (static_cast<std::size_t>(matrix.rows()) != block) {
    throw std::invalid_argument("matrix dimension does not match targets");
  }
  check_unitary(matrix);

  // Offsets of every target joint index relative to a base joint index with
  // all target components zero, row-major over `targets` order.
  std::vector<std::size_t> offsets(block, 0);
  {
    std::size_t repeat = block;
    for (std::size_t c = 0; c < tindex.size(); ++c) {
      const std::size_t dim = layout.at(tindex[c]).dimension;
      const std::size_t stride = layout.stride(tindex[c]);
      repeat /= dim;
      for (std::size_t b = 0; b < block; ++b) {
        offsets[b] += ((b / repeat) % dim) * stride;
      }
    }
  }

  std::vector<cplx> out(state.amplitudes().begin(), state.amplitudes().end());
  std::vector<cplx> in(block), res(block);
  const std::size_t total = layout.total_dimension();
  for (std::size_t base = 0; base < total; ++base) {
    bool is_base = true;
    for (std::size_t i : tindex) {
      if (layout.component(base, i) != 0) {
        is_base = false;
        break;
      }
    }
    if (!is_base) continue;
    for (std::size_t b = 0; b < block; ++b) in[b] = out[base + offsets[b]];
    for (std::size_t r = 0; r < block; ++r) {
      cplx sum{0.0, 0.0};
      for (std::size_t c = 0; c < block; ++c) sum += matrix(r, c) * in[c];
      res[r] = sum;
    }
    for (std::size_t b = 0; b < block; ++b) out[base + offsets[b]] = res[b];
  }

  double n = vector_norm(out);
  if (std::abs(n - 1.0) > kNormTolerance) {
    throw std::logic_error("unitary application drifted off norm");
  }
  return StateVector(layout, std::move(out));
}

std::vector<Branch> branch_decompose(const StateVector& state,
                                     std::string_view subsystem,
                                     const Basis& basis) {
  const SystemLayout& layout = state.layout();
  const std::size_t sub = layout.index_of(subsystem);
  const std::size_t dim = layout.at(sub).dimension;
  if (basis.subsystem() != subsystem) {
    throw std::invalid_argument("basis '" + basis.name() +
                                "' does not belong to subsystem '" +
                                std::string(subsystem) + "'");
  }
  if (basis.dimension() != dim) {
    throw std::invalid_argument("basis dimension does not match subsystem");
  }
  const std::size_t stride = layout.stride(sub);
  const std::size_t rest_total = layout.total_dimension() / dim;
  SystemLayout rest_layout = layout.without(subsystem);

  std::vector<Branch> branches;
  branches.reserve(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    const std::vector<cplx>& bv = basis.at(k).components;
    std::vector<cplx> overlap(rest_total, cplx{0.0, 0.0});
    // rest index r sweeps the joint space with the subsystem slot removed.
    std::size_t r = 0;
    for (std::size_t joint = 0; joint < layout.total_dimension(); ++joint) {
      if (layout.component(joint, sub) != 0) continue;
      cplx sum{0.0, 0.0};
      for (std::size_t s = 0; s < dim; ++s) {
        sum += std::conj(bv[s]) * state.amplitude(joint + s * stride);
      }
      overlap[r++] = sum;
    }
    double weight = 0.0;
    for (const cplx& a : overlap) weight += std::norm(a);
    const bool defined = weight > kZeroBranchWeight;
    if (!defined) {
      overlap.assign(rest_total, cplx{0.0, 0.0});
      overlap[0] = cplx{1.0, 0.0};
    }
    branches.push_back(Branch{basis.label(k), weight,
                              StateVector(rest_layout, std::move(overlap)),
                              defined});
  }
  return branches;
}

StateVector compose_branch(const SystemLayout& layout,
                           std::string_view subsystem,
                           const std::vector<cplx>& vector,
                           const StateVector& residual) {
  const std::size_t sub = layout.index_of(subsystem);
  const std::size_t dim = layout.at(sub).dimension;
  if (vector.size() != dim) {
    throw std::invalid_argument("branch vector has wrong dimension");
  }
  if (residual.layout() != layout.without(subsystem)) {
    throw std::invalid_argument("residual layout does not match");
  }
  const std::size_t stride = layout.stride(sub);
  std::vector<cplx> amps(layout.total_dimension(), cplx{0.0, 0.0});
  std::size_t r = 0;
  for (std::size_t joint = 0; joint < layout.total_dimension(); ++joint) {
    if (layout.component(joint, sub) != 0) continue;
    const cplx rest_amp = residual.amplitude(r++);
    for (std::size_t s = 0; s < dim; ++s) {
      amps[joint + s * stride] = vector[s] * rest_amp;
    }
  }
  return StateVector(layout, std::move(amps));
}

cplx inner_product(const StateVector& a, const StateVector& b) {
  if (a.layout() != b.layout()) {
    throw std::invalid_argument("inner product needs identical layouts");
  }
  cplx sum{0.0, 0.0};
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    sum += std::conj(a.amplitude(i)) * b.amplitude(i);
  }
  return sum;
}

double norm(const StateVector& state) { return vector_norm(state.amplitudes()); }

double fidelity(const StateVector& a, const StateVector& b) {
  double f = std::norm(inner_product(a, b));
  return std::clamp(f, 0.0, 1.0);
}

}  // namespace qwp
