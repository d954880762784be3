#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qwp {

struct Subsystem {
  std::string name;
  std::size_t dimension;

  bool operator==(const Subsystem&) const = default;
};

// Ordered collection of named subsystems.  Joint indices are row-major in
// declaration order: the last subsystem varies fastest.  An empty layout is
// the scalar space (total dimension 1); it appears as the residual of
// decomposing a single-subsystem state.
class SystemLayout {
 public:
  SystemLayout() = default;
  explicit SystemLayout(std::vector<Subsystem> subsystems);

  std::size_t size() const { return subsystems_.size(); }
  bool empty() const { return subsystems_.empty(); }
  std::size_t total_dimension() const { return total_; }

  const Subsystem& at(std::size_t i) const { return subsystems_.at(i); }
  std::span<const Subsystem> subsystems() const { return subsystems_; }

  bool has(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;
  std::size_t dimension_of(std::string_view name) const;

  // Row-major stride of subsystem i: the joint index advances by this much
  // when that subsystem's component advances by one.
  std::size_t stride(std::size_t i) const { return strides_.at(i); }

  // Component of `joint` belonging to subsystem i.
  std::size_t component(std::size_t joint, std::size_t i) const {
    return (joint / strides_.at(i)) % subsystems_[i].dimension;
  }

  SystemLayout without(std::string_view name) const;

  bool operator==(const SystemLayout&) const = default;

 private:
  std::vector<Subsystem> subsystems_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 1;
};

}  // namespace qwp
