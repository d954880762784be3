#include <stdexcept>

#include "doctest.h"
#include "qwp/layout.hpp"
#include "qwp/types.hpp"

using namespace qwp;

TEST_CASE("layout indexing is row-major with the last subsystem fastest") {
  const SystemLayout layout({{"a", 2}, {"b", 3}, {"c", 2}});
  CHECK(layout.total_dimension() == 12);
  CHECK(layout.size() == 3);
  CHECK(layout.stride(0) == 6);
  CHECK(layout.stride(1) == 2);
  CHECK(layout.stride(2) == 1);
  for (std::size_t ia = 0; ia < 2; ++ia) {
    for (std::size_t ib = 0; ib < 3; ++ib) {
      for (std::size_t ic = 0; ic < 2; ++ic) {
        const std::size_t joint = ia * 6 + ib * 2 + ic;
        CHECK(layout.component(joint, 0) == ia);
        CHECK(layout.component(joint, 1) == ib);
        CHECK(layout.component(joint, 2) == ic);
      }
    }
  }
}

TEST_CASE("layout name lookups") {
  const SystemLayout layout({{"spin", 2}, {"A", 4}});
  CHECK(layout.has("spin"));
  CHECK(layout.has("A"));
  CHECK(!layout.has("B"));
  CHECK(layout.index_of("A") == 1);
  CHECK(layout.dimension_of("A") == 4);
  CHECK(layout.at(0).name == "spin");
  CHECK_THROWS_AS((void)layout.index_of("B"), std::invalid_argument);
  CHECK_THROWS_AS((void)layout.dimension_of("B"), std::invalid_argument);
}

TEST_CASE("layout without removes one subsystem and keeps order") {
  const SystemLayout layout({{"a", 2}, {"b", 3}, {"c", 2}});
  const SystemLayout rest = layout.without("b");
  CHECK(rest.size() == 2);
  CHECK(rest.at(0).name == "a");
  CHECK(rest.at(1).name == "c");
  CHECK(rest.total_dimension() == 4);
  CHECK_THROWS_AS((void)layout.without("zz"), std::invalid_argument);
}

TEST_CASE("layout rejects bad declarations") {
  CHECK_THROWS_AS(SystemLayout({{"a", 2}, {"a", 2}}), std::invalid_argument);
  CHECK_THROWS_AS(SystemLayout({{"a", 1}}), std::invalid_argument);
  CHECK_THROWS_AS(SystemLayout({{"a", 0}}), std::invalid_argument);
  CHECK_THROWS_AS(SystemLayout({{"", 2}}), std::invalid_argument);
}

TEST_CASE("layout enforces the dense total-dimension cap") {
  // 2^23 exceeds the cap of 2^22.
  std::vector<Subsystem> subsystems;
  for (int i = 0; i < 23; ++i) {
    subsystems.push_back(Subsystem{"q" + std::to_string(i), 2});
  }
  CHECK_THROWS_AS(SystemLayout{subsystems}, std::invalid_argument);
  subsystems.pop_back();
  CHECK(SystemLayout(subsystems).total_dimension() == kMaxTotalDimension);
}

TEST_CASE("empty layout is the scalar space") {
  const SystemLayout layout;
  CHECK(layout.empty());
  CHECK(layout.total_dimension() == 1);
}
