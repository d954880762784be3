#include "qwp/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace qwp {

namespace {

cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx sum{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::conj(a[i]) * b[i];
  return sum;
}

}  // namespace

Basis::Basis(std::string name, std::string subsystem,
             std::vector<Vector> vectors)
    : name_(std::move(name)),
      subsystem_(std::move(subsystem)),
      vectors_(std::move(vectors)) {
  if (name_.empty()) throw std::invalid_argument("basis name must be nonempty");
  if (subsystem_.empty()) {
    throw std::invalid_argument("basis subsystem must be nonempty");
  }
  const std::size_t dim = vectors_.size();
  if (dim < 2) {
    throw std::invalid_argument("basis '" + name_ +
                                "' must have at least two vectors");
  }
  for (std::size_t k = 0; k < dim; ++k) {
    const Vector& v = vectors_[k];
    if (v.label.empty()) {
      throw std::invalid_argument("basis '" + name_ + "' has an empty label");
    }
    if (v.components.size() != dim) {
      throw std::invalid_argument(
          "basis '" + name_ + "' vector '" + v.label +
          "' has wrong length (basis must be complete)");
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (vectors_[j].label == v.label) {
        throw std::invalid_argument("basis '" + name_ +
                                    "' has duplicate label '" + v.label + "'");
      }
    }
  }
  // Gram matrix must be the identity within kNormTolerance.
  for (std::size_t k = 0; k < dim; ++k) {
    for (std::size_t j = k; j < dim; ++j) {
      cplx g = dot(vectors_[k].components, vectors_[j].components);
      double expected = (j == k) ? 1.0 : 0.0;
      if (std::abs(g - expected) > kNormTolerance) {
        throw std::invalid_argument("basis '" + name_ +
                                    "' is not orthonormal");
      }
    }
  }
}

Basis Basis::computational(std::string subsystem, std::size_t dimension,
                           std::vector<std::string> labels) {
  if (labels.empty()) {
    for (std::size_t k = 0; k < dimension; ++k) {
      labels.push_back(std::to_string(k));
    }
  }
  if (labels.size() != dimension) {
    throw std::invalid_argument("computational basis needs one label per state");
  }
  std::vector<Vector> vectors;
  vectors.reserve(dimension);
  for (std::size_t k = 0; k < dimension; ++k) {
    std::vector<cplx> components(dimension, cplx{0.0, 0.0});
    components[k] = cplx{1.0, 0.0};
    vectors.push_back(Vector{std::move(labels[k]), std::move(components)});
  }
  return Basis("computational", std::move(subsystem), std::move(vectors));
}

bool Basis::has_label(std::string_view label) const {
  for (const Vector& v : vectors_) {
    if (v.label == label) return true;
  }
  return false;
}

std::size_t Basis::index_of(std::string_view label) const {
  for (std::size_t k = 0; k < vectors_.size(); ++k) {
    if (vectors_[k].label == label) return k;
  }
  throw std::invalid_argument("basis '" + name_ + "' has no label '" +
                              std::string(label) + "'");
}

bool Basis::is_diagonal_in(const Basis& other, double tol) const {
  if (other.dimension() != dimension()) return false;
  std::vector<bool> used(dimension(), false);
  for (const Vector& v : vectors_) {
    bool matched = false;
    for (std::size_t j = 0; j < other.dimension(); ++j) {
      double overlap = std::abs(dot(other.vectors_[j].components, v.components));
      if (overlap >= 1.0 - tol) {
        if (used[j]) return false;
        used[j] = true;
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

}  // namespace qwp
