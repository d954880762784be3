#include <algorithm>
#include <string>

#include "doctest.h"
#include "generators.hpp"
#include "qwp/dsl.hpp"
#include "qwp/scenarios.hpp"

using namespace qwp;

namespace {

const char* kMinimal =
    "qwp 1\n"
    "system q:2\n"
    "basis z on q = [a: (1,0),(0,0); b: (0,0),(1,0)]\n"
    "prepare q a\n";

ParseError sole_error(std::string_view text) {
  const ParseResult result = parse_protocol(text);
  REQUIRE(!result.ok());
  REQUIRE(result.errors.size() == 1);
  return result.errors[0];
}

}  // namespace

TEST_CASE("a minimal protocol parses") {
  const ParseResult result = parse_protocol(kMinimal);
  REQUIRE(result.ok());
  CHECK(result.errors.empty());
  const Protocol& p = *result.protocol;
  CHECK(p.layout.size() == 1);
  CHECK(p.layout.dimension_of("q") == 2);
  REQUIRE(p.bases.size() == 1);
  CHECK(p.bases[0].name() == "z");
  REQUIRE(p.steps.size() == 1);
  CHECK(step_kind(p.steps[0]) == StepKind::prepare);
}

TEST_CASE("empty input reports exactly one missing-system error") {
  const ParseError error = sole_error("");
  CHECK(error.kind == ParseErrorKind::semantic);
  CHECK(error.span.line == 1);
  CHECK(error.span.column == 1);
  CHECK(error.message == "no system declaration");
}

TEST_CASE("comments and blank lines carry no weight") {
  const ParseResult result = parse_protocol(
      "# leading comment\n\nqwp 1\nsystem q:2  # trailing comment\n\n");
  REQUIRE(result.ok());
  CHECK(result.protocol->layout.size() == 1);
}

TEST_CASE("the header is demanded, checked, and unique") {
  SUBCASE("missing") {
    const ParseError error = sole_error("system q:2\n");
    CHECK(error.kind == ParseErrorKind::syntax);
    CHECK(error.message == "expected a 'qwp 1' header line");
  }
  SUBCASE("late") {
    const ParseResult result = parse_protocol("system q:2\nqwp 1\n");
    REQUIRE(!result.ok());
    const bool flagged = std::any_of(
        result.errors.begin(), result.errors.end(), [](const ParseError& e) {
          return e.message == "the 'qwp' header must be the first statement" &&
                 e.span.line == 2;
        });
    CHECK(flagged);
  }
  SUBCASE("wrong version") {
    const ParseError error = sole_error("qwp 2\nsystem q:2\n");
    CHECK(error.kind == ParseErrorKind::semantic);
    CHECK(error.message == "unsupported protocol version '2'");
  }
  SUBCASE("duplicated") {
    const ParseError error = sole_error("qwp 1\nqwp 1\nsystem q:2\n");
    CHECK(error.message == "duplicate 'qwp' header");
    CHECK(error.span.line == 2);
  }
}

TEST_CASE("error spans point at the offending token") {
  const ParseResult result = parse_protocol(
      "qwp 1\nsystem q:2\nprepare qq (1,0),(0,0)\n");
  REQUIRE(!result.ok());
  REQUIRE(result.errors.size() == 1);
  const ParseError& error = result.errors[0];
  CHECK(error.kind == ParseErrorKind::semantic);
  CHECK(error.span.line == 3);
  CHECK(error.span.column == 9);
  CHECK(error.span.length == 2);
  CHECK(error.message == "prepare targets unknown subsystem 'qq'");
  CHECK(format_parse_error(error) ==
        "3:9: semantic: prepare targets unknown subsystem 'qq'");
}

TEST_CASE("lexical problems") {
  const auto has_lex_error = [](const ParseResult& result,
                                std::string_view message, std::size_t line,
                                std::size_t column) {
    return std::any_of(result.errors.begin(), result.errors.end(),
                       [&](const ParseError& e) {
                         return e.kind == ParseErrorKind::lex &&
                                e.message == message && e.span.line == line &&
                                e.span.column == column;
                       });
  };
  SUBCASE("stray character") {
    const ParseResult result =
        parse_protocol("qwp 1\nsystem q:2\nprepare q $\n");
    REQUIRE(!result.ok());
    CHECK(has_lex_error(result, "unexpected character '$'", 3, 11));
  }
  SUBCASE("malformed number") {
    const ParseResult result =
        parse_protocol("qwp 1\nsystem q:2\nprepare q (1e+,0),(0,0)\n");
    REQUIRE(!result.ok());
    CHECK(has_lex_error(result, "malformed number token '1e+'", 3, 12));
  }
  SUBCASE("bad exact-value token") {
    const ParseResult result =
        parse_protocol("qwp 1\nsystem q:2\nprepare q (1/sqrt3,0),(0,0)\n");
    REQUIRE(!result.ok());
    CHECK(has_lex_error(result, "malformed number token '1/sqrt3'", 3, 12));
  }
}

TEST_CASE("every problem is collected, ordered by position") {
  const ParseResult result = parse_protocol(
      "qwp 1\n"
      "system q:2\n"
      "prepare qq (1,0),(0,0)\n"
      "measure q in nosuch record qq\n"
      "collapse zz in nosuch\n");
  REQUIRE(!result.ok());
  CHECK(result.errors.size() >= 3);
  CHECK(std::is_sorted(result.errors.begin(), result.errors.end(),
                       [](const ParseError& a, const ParseError& b) {
                         if (a.span.line != b.span.line) {
                           return a.span.line < b.span.line;
                         }
                         return a.span.column < b.span.column;
                       }));
}

TEST_CASE("reserved words cannot name subsystems, bases, or labels") {
  SUBCASE("subsystem") {
    const ParseError error = sole_error("qwp 1\nsystem measure:2\n");
    CHECK(error.kind == ParseErrorKind::semantic);
    CHECK(error.message ==
          "subsystem name 'measure' is a reserved keyword");
  }
  SUBCASE("basis name") {
    const ParseError error = sole_error(
        "qwp 1\nsystem q:2\n"
        "basis record on q = [a: (1,0),(0,0); b: (0,0),(1,0)]\n");
    CHECK(error.message == "basis name 'record' is a reserved keyword");
  }
  SUBCASE("label") {
    const ParseError error = sole_error(
        "qwp 1\nsystem q:2\n"
        "basis z on q = [in: (1,0),(0,0); b: (0,0),(1,0)]\n");
    CHECK(error.message == "state label 'in' is a reserved keyword");
  }
}

TEST_CASE("declarations must precede steps") {
  const ParseResult result = parse_protocol(
      "qwp 1\nsystem q:2\nprepare q (1,0),(0,0)\nsystem r:2\n");
  REQUIRE(!result.ok());
  REQUIRE(result.errors.size() == 1);
  CHECK(result.errors[0].span.line == 4);
  CHECK(result.errors[0].message ==
        "subsystem 'r' must be declared before protocol steps");
}

TEST_CASE("semantic catalogue") {
  SUBCASE("duplicate system") {
    const ParseError error = sole_error("qwp 1\nsystem q:2\nsystem q:3\n");
    CHECK(error.message == "subsystem 'q' already declared");
  }
  SUBCASE("dimension too small") {
    const ParseResult result = parse_protocol("qwp 1\nsystem q:1\n");
    REQUIRE(!result.ok());
    const bool flagged = std::any_of(
        result.errors.begin(), result.errors.end(), [](const ParseError& e) {
          return e.message ==
                 "subsystem dimension must be an integer of at least 2, "
                 "got '1'";
        });
    CHECK(flagged);
  }
  SUBCASE("basis on unknown subsystem") {
    const ParseError error = sole_error(
        "qwp 1\nsystem q:2\n"
        "basis z on r = [a: (1,0),(0,0); b: (0,0),(1,0)]\n");
    CHECK(error.message == "basis declared on unknown subsystem 'r'");
  }
  SUBCASE("non-orthonormal basis") {
    const ParseError error = sole_error(
        "qwp 1\nsystem q:2\n"
        "basis z on q = [a: (1,0),(0,0); b: (1,0),(0,0)]\n");
    CHECK(error.kind == ParseErrorKind::semantic);
    CHECK(error.message == "basis 'z' on 'q' is not orthonormal");
  }
  SUBCASE("wrong vector count") {
    const ParseError error = sole_error(
        "qwp 1\nsystem q:2\nbasis z on q = [a: (1,0),(0,0)]\n");
    CHECK(error.message == "basis 'z' declares 1 vectors for dimension 2");
  }
  SUBCASE("unknown prepare label") {
    const ParseError error = sole_error(
        "qwp 1\nsystem q:2\n"
        "basis z on q = [a: (1,0),(0,0); b: (0,0),(1,0)]\n"
        "prepare q c\n");
    CHECK(error.message == "unknown state label 'c' for subsystem 'q'");
  }
  SUBCASE("observer without a basis") {
    const ParseError error = sole_error(
        "qwp 1\nsystem q:2\nsystem a:2\n"
        "basis z on q = [u: (1,0),(0,0); d: (0,0),(1,0)]\n"
        "measure q in z record a\n");
    CHECK(error.message == "observer 'a' declares no basis to record into");
  }
  SUBCASE("observer too small") {
    const ParseError error = sole_error(
        "qwp 1\nsystem q:3\nsystem a:2\n"
        "basis z on q = [u: (1,0),(0,0),(0,0); m: (0,0),(1,0),(0,0); "
        "d: (0,0),(0,0),(1,0)]\n"
        "basis r on a = [x: (1,0),(0,0); y: (0,0),(1,0)]\n"
        "measure q in z record a\n");
    CHECK(error.message == "observer 'a' has 2 states but basis 'z' has 3 outcomes");
  }
  SUBCASE("self measurement") {
    const ParseError error = sole_error(
        "qwp 1\nsystem q:2\n"
        "basis z on q = [u: (1,0),(0,0); d: (0,0),(1,0)]\n"
        "measure q in z record q\n");
    CHECK(error.message ==
          "observer 'q' cannot record a measurement of itself");
  }
  SUBCASE("unknown measurement basis") {
    const ParseError error = sole_error(
        "qwp 1\nsystem q:2\nsystem a:2\n"
        "basis z on q = [u: (1,0),(0,0); d: (0,0),(1,0)]\n"
        "basis r on a = [x: (1,0),(0,0); y: (0,0),(1,0)]\n"
        "measure q in w record a\n");
    CHECK(error.message == "subsystem 'q' has no basis named 'w'");
  }
}

TEST_CASE("exact square-root tokens") {
  const ParseResult result = parse_protocol(
      "qwp 1\nsystem q:2\n"
      "basis x on q = [r: (1/sqrt2,0),(1/sqrt2,0); "
      "l: (1/sqrt2,0),(-1/sqrt2,0)]\n"
      "prepare q r\n");
  REQUIRE(result.ok());
  const Basis& x = result.protocol->bases[0];
  CHECK(x.at(0).components[0].real() == 1.0 / std::sqrt(2.0));
  CHECK(x.at(1).components[1].real() == -1.0 / std::sqrt(2.0));
}

TEST_CASE("bundled scenario sources are serializer fixed points") {
  for (const Scenario s : {Scenario::cat, Scenario::dog, Scenario::pet}) {
    const ParseResult first = parse_protocol(scenario_source(s));
    REQUIRE(first.ok());
    const std::string canonical = serialize_protocol(*first.protocol);
    const ParseResult second = parse_protocol(canonical);
    REQUIRE(second.ok());
    CHECK(*second.protocol == *first.protocol);
    CHECK(serialize_protocol(*second.protocol) == canonical);
  }
}

TEST_CASE("serialization round-trips random protocols bitwise") {
  SplitMix64 rng(20260818);
  gen::ProtocolOptions options;
  options.allow_catalytic = true;
  options.allow_collapse = true;
  for (int trial = 0; trial < 60; ++trial) {
    const Protocol p = gen::random_protocol(rng, options);
    const std::string text = serialize_protocol(p);
    const ParseResult result = parse_protocol(text);
    REQUIRE_MESSAGE(result.ok(), text);
    CHECK(*result.protocol == p);
    CHECK(serialize_protocol(*result.protocol) == text);
  }
}

TEST_CASE("the serializer rejects what the grammar cannot express") {
  const ParseResult base = parse_protocol(kMinimal);
  REQUIRE(base.ok());

  SUBCASE("invalid protocol") {
    Protocol p = *base.protocol;
    p.steps.push_back(PrepareStep{"q", {cplx(1.0, 0.0), cplx(0.0, 0.0)}});
    CHECK_THROWS_AS(serialize_protocol(p), std::invalid_argument);
  }
  SUBCASE("step on an undeclared basis") {
    Protocol p = *base.protocol;
    p.steps.push_back(
        CollapseStep{"q", Basis::computational("q", 2, {"c0", "c1"})});
    CHECK_THROWS_AS(serialize_protocol(p), std::invalid_argument);
  }
  SUBCASE("nonstandard observer") {
    const ParseResult two = parse_protocol(
        "qwp 1\nsystem q:2\nsystem a:2\n"
        "basis z on q = [u: (1,0),(0,0); d: (0,0),(1,0)]\n"
        "basis r on a = [x: (1,0),(0,0); y: (0,0),(1,0)]\n"
        "measure q in z record a\n");
    REQUIRE(two.ok());
    Protocol p = *two.protocol;
    auto& step = std::get<PremeasureStep>(p.steps[0]);
    const Basis r = step.observer.record_basis();
    step.observer = ObserverRegister(step.observer.subsystem(), r, 1, {1, 0});
    CHECK_THROWS_AS(serialize_protocol(p), std::invalid_argument);
  }
}

TEST_CASE("parse errors never throw") {
  // A relic of fuzzing: hostile fragments must come back as error lists.
  const char* fragments[] = {
      "qwp\n", "qwp one\n", "system\n", "system q\n", "system q:\n",
      "system q:x\n", "basis\n", "prepare\n", "measure\n", "report\n",
      "qwp 1\nsystem q:2\nbasis z on q = [\n", "(((\n", "qwp 1\n:::\n",
      "qwp 1\nsystem q:2\nprepare q (1,0)\n",
      "qwp 1\nsystem q:0\n", "qwp 1\nsystem q:-3\n",
      "qwp 1\nsystem q:2\nreport q in\n"};
  for (const char* fragment : fragments) {
    const ParseResult result = parse_protocol(fragment);
    CHECK(!result.ok());
    CHECK(!result.errors.empty());
    for (const ParseError& error : result.errors) {
      CHECK(error.span.line >= 1);
      CHECK(error.span.column >= 1);
      CHECK(!error.message.empty());
    }
  }
}

TEST_CASE("parse error kind names") {
  CHECK(parse_error_kind_name(ParseErrorKind::lex) == "lex");
  CHECK(parse_error_kind_name(ParseErrorKind::syntax) == "syntax");
  CHECK(parse_error_kind_name(ParseErrorKind::semantic) == "semantic");
}
