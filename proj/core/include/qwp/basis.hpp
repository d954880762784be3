#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "qwp/types.hpp"

namespace qwp {

// Complete orthonormal basis of one subsystem, with one label per vector.
// Completeness is part of the contract: the vector count equals the
// subsystem dimension, so projectors over a Basis always resolve the
// identity.
class Basis {
 public:
  struct Vector {
    std::string label;
    std::vector<cplx> components;

    bool operator==(const Vector&) const = default;
  };

  Basis(std::string name, std::string subsystem, std::vector<Vector> vectors);

  // Computational basis with labels "0", "1", ... unless labels are given.
  static Basis computational(std::string subsystem, std::size_t dimension,
                             std::vector<std::string> labels = {});

  const std::string& name() const { return name_; }
  const std::string& subsystem() const { return subsystem_; }
  std::size_t dimension() const { return vectors_.size(); }

  const Vector& at(std::size_t k) const { return vectors_.at(k); }
  const std::vector<Vector>& vectors() const { return vectors_; }
  const std::string& label(std::size_t k) const { return vectors_.at(k).label; }

  bool has_label(std::string_view label) const;
  std::size_t index_of(std::string_view label) const;

  // True when every basis vector coincides, up to phase and within `tol`,
  // with some vector of `other` (i.e. the two bases differ only by a
  // relabeling and per-vector phases, so measuring in one does not superpose
  // records of the other).
  bool is_diagonal_in(const Basis& other, double tol) const;

  bool operator==(const Basis&) const = default;

 private:
  std::string name_;
  std::string subsystem_;
  std::vector<Vector> vectors_;
};

}  // namespace qwp
