#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qwp/protocol.hpp"

namespace qwp {

struct SourceSpan {
  std::size_t line = 1;    // 1-based
  std::size_t column = 1;  // 1-based byte offset within the line
  std::size_t length = 1;

  bool operator==(const SourceSpan&) const = default;
};

enum class ParseErrorKind { lex, syntax, semantic };

std::string_view parse_error_kind_name(ParseErrorKind kind);

struct ParseError {
  SourceSpan span;
  ParseErrorKind kind = ParseErrorKind::syntax;
  std::string message;
};

// "line:column: kind: message", the form the CLI prints to stderr.
std::string format_parse_error(const ParseError& error);

struct ParseResult {
  // Present exactly when `errors` is empty.
  std::optional<Protocol> protocol;
  std::vector<ParseError> errors;

  bool ok() const { return protocol.has_value(); }
};

// Parses protocol text.  Line oriented: a leading "qwp 1" header, then one
// statement per line among
//   system <name>:<dim>
//   basis <name> on <subsystem> = [label: (re,im),...; ...]
//   prepare <subsystem> <label-or-vector>
//   measure <target> in <basis> record <observer>
//   catmeasure <agent> in <basis> record <observer>
//   collapse <target> in <basis>
//   report <subsystems...> in <bases...>
// with # comments.  Numbers are decimal literals or the exact-value tokens
// 1/sqrt2 and 1/sqrt8, optionally negated.  An observer records into its
// first declared basis, starting from that basis's first vector.  Bad input
// never throws: every problem is collected into `errors` with the span of
// the offending token, ordered by position.
ParseResult parse_protocol(std::string_view text);

// Canonical rendering: the version header, then system declarations in
// layout order, basis declarations in declaration order, and steps in order,
// one statement per line, lowercase keywords, prepared states in vector form,
// all numbers as shortest round-trip decimals.  parse_protocol of the result
// reproduces `p` structurally.  Throws invalid_argument when `p` does not
// validate or its steps use bases or observer conventions the grammar cannot
// express.
std::string serialize_protocol(const Protocol& p);

}  // namespace qwp
