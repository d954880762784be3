#include "qwp/layout.hpp"

#include <stdexcept>

#include "qwp/types.hpp"

namespace qwp {

SystemLayout::SystemLayout(std::vector<Subsystem> subsystems)
    : subsystems_(std::move(subsystems)) {
  for (std::size_t i = 0; i < subsystems_.size(); ++i) {
    const Subsystem& s = subsystems_[i];
    if (s.name.empty()) {
      throw std::invalid_argument("subsystem name must be nonempty");
    }
    if (s.dimension < 2) {
      throw std::invalid_argument("subsystem '" + s.name +
                                  "' must have dimension >= 2");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (subsystems_[j].name == s.name) {
        throw std::invalid_argument("duplicate subsystem name '" + s.name +
                                    "'");
      }
    }
    if (total_ > kMaxTotalDimension / s.dimension) {
      throw std::invalid_argument("layout dimension exceeds dense limit");
    }
    total_ *= s.dimension;
  }
  strides_.assign(subsystems_.size(), 1);
  for (std::size_t i = subsystems_.size(); i-- > 1;) {
    strides_[i - 1] = strides_[i] * subsystems_[i].dimension;
  }
}

bool SystemLayout::has(std::string_view name) const {
  for (const Subsystem& s : subsystems_) {
    if (s.name == name) return true;
  }
  return false;
}

std::size_t SystemLayout::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < subsystems_.size(); ++i) {
    if (subsystems_[i].name == name) return i;
  }
  throw std::invalid_argument("unknown subsystem '" + std::string(name) + "'");
}

std::size_t SystemLayout::dimension_of(std::string_view name) const {
  return subsystems_[index_of(name)].dimension;
}

SystemLayout SystemLayout::without(std::string_view name) const {
  std::size_t drop = index_of(name);
  std::vector<Subsystem> rest;
  rest.reserve(subsystems_.size() - 1);
  for (std::size_t i = 0; i < subsystems_.size(); ++i) {
    if (i != drop) rest.push_back(subsystems_[i]);
  }
  return SystemLayout(std::move(rest));
}

}  // namespace qwp
