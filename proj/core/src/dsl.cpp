#include "qwp/dsl.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <variant>

#include "qwp/types.hpp"

namespace qwp {

namespace {

const std::set<std::string_view> kReservedWords = {
    "qwp",        "system",   "basis",  "on",     "prepare", "measure",
    "catmeasure", "collapse", "report", "in",     "record"};

bool is_reserved(std::string_view word) {
  return kReservedWords.count(word) != 0;
}

enum class TokKind { word, number, punct };

struct Token {
  TokKind kind = TokKind::word;
  std::string_view text;
  std::size_t column = 1;  // 1-based
  double value = 0.0;
  bool integral = false;
};

SourceSpan token_span(std::size_t line, const Token& t) {
  return SourceSpan{line, t.column, t.text.size()};
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_word_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_word_char(char c) { return is_word_start(c) || is_digit(c); }

std::vector<Token> lex_line(std::string_view line, std::size_t line_no,
                            std::vector<ParseError>& errors) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '#') break;
    const std::size_t start = i;
    if (is_word_start(c)) {
      while (i < line.size() && is_word_char(line[i])) ++i;
      tokens.push_back(Token{TokKind::word, line.substr(start, i - start),
                             start + 1, 0.0, false});
      continue;
    }
    if (is_digit(c) || (c == '-' && i + 1 < line.size() && is_digit(line[i + 1]))) {
      std::size_t j = i;
      const bool negative = line[j] == '-';
      if (negative) ++j;
      const std::size_t digits_start = j;
      while (j < line.size() && is_digit(line[j])) ++j;
      if (j < line.size() && line[j] == '/') {
        // Exact-value tokens 1/sqrt2 and 1/sqrt8.
        std::size_t k = j + 1;
        while (k < line.size() && is_word_char(line[k])) ++k;
        const std::string_view digits = line.substr(digits_start, j - digits_start);
        const std::string_view tail = line.substr(j + 1, k - j - 1);
        const std::string_view whole = line.substr(start, k - start);
        if (digits != "1" || (tail != "sqrt2" && tail != "sqrt8")) {
          errors.push_back(ParseError{SourceSpan{line_no, start + 1, k - start},
                                      ParseErrorKind::lex,
                                      "malformed number token '" +
                                          std::string(whole) + "'"});
          i = k;
          continue;
        }
        double value = tail == "sqrt2" ? 1.0 / std::sqrt(2.0)
                                       : 1.0 / std::sqrt(8.0);
        if (negative) value = -value;
        tokens.push_back(Token{TokKind::number, whole, start + 1, value, false});
        i = k;
        continue;
      }
      bool malformed = false;
      if (j < line.size() && line[j] == '.') {
        ++j;
        if (j >= line.size() || !is_digit(line[j])) malformed = true;
        while (j < line.size() && is_digit(line[j])) ++j;
      }
      if (!malformed && j < line.size() && (line[j] == 'e' || line[j] == 'E')) {
        ++j;
        if (j < line.size() && (line[j] == '+' || line[j] == '-')) ++j;
        if (j >= line.size() || !is_digit(line[j])) malformed = true;
        while (j < line.size() && is_digit(line[j])) ++j;
      }
      const std::string_view text = line.substr(start, j - start);
      double value = 0.0;
      const auto result =
          std::from_chars(text.data(), text.data() + text.size(), value);
      if (malformed || result.ec != std::errc{} ||
          result.ptr != text.data() + text.size()) {
        errors.push_back(ParseError{SourceSpan{line_no, start + 1, j - start},
                                    ParseErrorKind::lex,
                                    "malformed number token '" +
                                        std::string(text) + "'"});
        i = j;
        continue;
      }
      const bool integral =
          text.find_first_not_of("0123456789") == std::string_view::npos;
      tokens.push_back(
          Token{TokKind::number, text, start + 1, value, integral});
      i = j;
      continue;
    }
    if (c == '(' || c == ')' || c == ',' || c == ';' || c == ':' ||
        c == '=' || c == '[' || c == ']') {
      tokens.push_back(
          Token{TokKind::punct, line.substr(i, 1), i + 1, 0.0, false});
      ++i;
      continue;
    }
    errors.push_back(ParseError{SourceSpan{line_no, i + 1, 1},
                                ParseErrorKind::lex,
                                std::string("unexpected character '") + c +
                                    "'"});
    ++i;
  }
  return tokens;
}

// A name together with where it appeared.
struct Sp {
  std::string text;
  SourceSpan span;
};

struct HeaderStmt {
  SourceSpan span;
  std::string version_text;
  double version = 0.0;
  bool integral = false;
};

struct SystemStmt {
  Sp name;
  std::string dim_text;
  double dim_value = 0.0;
  bool dim_integral = false;
  SourceSpan dim_span;
};

struct BasisRowStmt {
  Sp label;
  std::vector<cplx> comps;
};

struct BasisStmt {
  Sp name;
  Sp subsystem;
  std::vector<BasisRowStmt> rows;
};

struct PrepareStmt {
  Sp subsystem;
  std::optional<Sp> label;
  std::vector<cplx> comps;
  SourceSpan comps_span;
};

struct MeasureStmt {
  bool catalytic = false;
  Sp target;
  Sp basis;
  Sp observer;
};

struct CollapseStmt {
  Sp target;
  Sp basis;
};

struct ReportStmt {
  SourceSpan span;
  std::vector<Sp> subsystems;
  std::vector<Sp> bases;
};

using Stmt = std::variant<HeaderStmt, SystemStmt, BasisStmt, PrepareStmt,
                          MeasureStmt, CollapseStmt, ReportStmt>;

SourceSpan first_span(const HeaderStmt& s) { return s.span; }
SourceSpan first_span(const SystemStmt& s) { return s.name.span; }
SourceSpan first_span(const BasisStmt& s) { return s.name.span; }
SourceSpan first_span(const PrepareStmt& s) { return s.subsystem.span; }
SourceSpan first_span(const MeasureStmt& s) { return s.target.span; }
SourceSpan first_span(const CollapseStmt& s) { return s.target.span; }
SourceSpan first_span(const ReportStmt& s) { return s.span; }

// One statement per line; the first syntax problem poisons the line and the
// rest of it is skipped.
struct LineParser {
  const std::vector<Token>& toks;
  std::size_t line;
  std::vector<ParseError>& errors;
  std::size_t pos = 0;
  bool failed = false;

  const Token* peek() const { return pos < toks.size() ? &toks[pos] : nullptr; }

  SourceSpan here() const {
    if (pos < toks.size()) return token_span(line, toks[pos]);
    if (toks.empty()) return SourceSpan{line, 1, 1};
    const Token& last = toks.back();
    return SourceSpan{line, last.column + last.text.size(), 1};
  }

  void fail(std::string message) {
    if (!failed) {
      errors.push_back(
          ParseError{here(), ParseErrorKind::syntax, std::move(message)});
    }
    failed = true;
  }

  std::optional<Sp> word(const char* what) {
    if (failed) return std::nullopt;
    const Token* t = peek();
    if (t == nullptr || t->kind != TokKind::word) {
      fail(std::string("expected ") + what);
      return std::nullopt;
    }
    ++pos;
    return Sp{std::string(t->text), token_span(line, *t)};
  }

  bool keyword(std::string_view kw) {
    if (failed) return false;
    const Token* t = peek();
    if (t == nullptr || t->kind != TokKind::word || t->text != kw) {
      fail("expected '" + std::string(kw) + "'");
      return false;
    }
    ++pos;
    return true;
  }

  bool punct(char c) {
    if (failed) return false;
    const Token* t = peek();
    if (t == nullptr || t->kind != TokKind::punct || t->text[0] != c) {
      fail(std::string("expected '") + c + "'");
      return false;
    }
    ++pos;
    return true;
  }

  bool peek_punct(char c) const {
    const Token* t = peek();
    return t != nullptr && t->kind == TokKind::punct && t->text[0] == c;
  }

  std::optional<Token> number(const char* what) {
    if (failed) return std::nullopt;
    const Token* t = peek();
    if (t == nullptr || t->kind != TokKind::number) {
      fail(std::string("expected ") + what);
      return std::nullopt;
    }
    ++pos;
    return *t;
  }

  // Parses (re,im),(re,im),... and reports the covered span.
  std::vector<cplx> components(SourceSpan& span_out) {
    std::vector<cplx> comps;
    const SourceSpan start = here();
    while (!failed) {
      punct('(');
      const auto re = number("a real part");
      punct(',');
      const auto im = number("an imaginary part");
      punct(')');
      if (failed) break;
      comps.emplace_back(re->value, im->value);
      if (peek_punct(',')) {
        ++pos;
        continue;
      }
      break;
    }
    if (!failed) {
      const Token& last = toks[pos - 1];
      span_out = SourceSpan{line, start.column,
                            last.column + last.text.size() - start.column};
    }
    return comps;
  }

  void end() {
    if (!failed && pos < toks.size()) fail("unexpected trailing tokens");
  }
};

std::optional<Stmt> parse_line(const std::vector<Token>& toks,
                               std::size_t line_no,
                               std::vector<ParseError>& errors) {
  LineParser p{toks, line_no, errors};
  const Token& head = toks.front();
  if (head.kind != TokKind::word) {
    p.fail("expected a statement keyword");
    return std::nullopt;
  }

  if (head.text == "qwp") {
    ++p.pos;
    const auto version = p.number("a protocol version");
    p.end();
    if (p.failed) return std::nullopt;
    return Stmt{HeaderStmt{token_span(line_no, head),
                           std::string(version->text), version->value,
                           version->integral}};
  }
  if (head.text == "system") {
    ++p.pos;
    auto name = p.word("a subsystem name");
    p.punct(':');
    const auto dim = p.number("a dimension");
    p.end();
    if (p.failed) return std::nullopt;
    return Stmt{SystemStmt{std::move(*name), std::string(dim->text),
                           dim->value, dim->integral,
                           token_span(line_no, *dim)}};
  }
  if (head.text == "basis") {
    ++p.pos;
    auto name = p.word("a basis name");
    p.keyword("on");
    auto sub = p.word("a subsystem name");
    p.punct('=');
    p.punct('[');
    std::vector<BasisRowStmt> rows;
    while (!p.failed) {
      auto label = p.word("a state label");
      p.punct(':');
      SourceSpan comps_span;
      auto comps = p.components(comps_span);
      if (p.failed) break;
      rows.push_back(BasisRowStmt{std::move(*label), std::move(comps)});
      if (p.peek_punct(';')) {
        ++p.pos;
        continue;
      }
      break;
    }
    p.punct(']');
    p.end();
    if (p.failed) return std::nullopt;
    return Stmt{BasisStmt{std::move(*name), std::move(*sub), std::move(rows)}};
  }
  if (head.text == "prepare") {
    ++p.pos;
    auto sub = p.word("a subsystem name");
    if (p.failed) return std::nullopt;
    PrepareStmt stmt;
    stmt.subsystem = std::move(*sub);
    const Token* next = p.peek();
    if (next != nullptr && next->kind == TokKind::word) {
      stmt.label = Sp{std::string(next->text), token_span(line_no, *next)};
      ++p.pos;
    } else if (next != nullptr && p.peek_punct('(')) {
      stmt.comps = p.components(stmt.comps_span);
    } else {
      p.fail("expected a state label or a component list");
    }
    p.end();
    if (p.failed) return std::nullopt;
    return Stmt{std::move(stmt)};
  }
  if (head.text == "measure" || head.text == "catmeasure") {
    ++p.pos;
    auto target = p.word("a subsystem name");
    p.keyword("in");
    auto basis = p.word("a basis name");
    p.keyword("record");
    auto observer = p.word("an observer name");
    p.end();
    if (p.failed) return std::nullopt;
    return Stmt{MeasureStmt{head.text == "catmeasure", std::move(*target),
                            std::move(*basis), std::move(*observer)}};
  }
  if (head.text == "collapse") {
    ++p.pos;
    auto target = p.word("a subsystem name");
    p.keyword("in");
    auto basis = p.word("a basis name");
    p.end();
    if (p.failed) return std::nullopt;
    return Stmt{CollapseStmt{std::move(*target), std::move(*basis)}};
  }
  if (head.text == "report") {
    ++p.pos;
    ReportStmt stmt;
    stmt.span = token_span(line_no, head);
    while (true) {
      const Token* t = p.peek();
      if (t == nullptr || t->kind != TokKind::word || t->text == "in") break;
      stmt.subsystems.push_back(Sp{std::string(t->text), token_span(line_no, *t)});
      ++p.pos;
    }
    if (stmt.subsystems.empty()) {
      p.fail("expected at least one subsystem name");
      return std::nullopt;
    }
    p.keyword("in");
    while (true) {
      const Token* t = p.peek();
      if (t == nullptr || t->kind != TokKind::word) break;
      stmt.bases.push_back(Sp{std::string(t->text), token_span(line_no, *t)});
      ++p.pos;
    }
    if (stmt.bases.empty() && !p.failed) {
      p.fail("expected at least one basis name");
      return std::nullopt;
    }
    p.end();
    if (p.failed) return std::nullopt;
    return Stmt{std::move(stmt)};
  }
  p.fail("unknown statement '" + std::string(head.text) + "'");
  return std::nullopt;
}

// Declarations gathered while walking statements in textual order.
struct Declarations {
  std::vector<Subsystem> subsystems;
  std::map<std::string, std::size_t> dimension_of;
  std::vector<Basis> bases;
  // (subsystem, basis name) -> index into bases
  std::map<std::pair<std::string, std::string>, std::size_t> basis_index;
  // subsystem -> index of its first declared basis
  std::map<std::string, std::size_t> record_basis_of;

  bool has_subsystem(const std::string& name) const {
    return dimension_of.count(name) != 0;
  }
  const Basis* find_basis(const std::string& sub, const std::string& name) const {
    const auto it = basis_index.find({sub, name});
    return it == basis_index.end() ? nullptr : &bases[it->second];
  }
  const Basis* first_basis(const std::string& sub) const {
    const auto it = record_basis_of.find(sub);
    return it == record_basis_of.end() ? nullptr : &bases[it->second];
  }
};

class SemanticPass {
 public:
  explicit SemanticPass(std::vector<ParseError>& errors) : errors_(errors) {}

  void error(const SourceSpan& span, std::string message) {
    errors_.push_back(
        ParseError{span, ParseErrorKind::semantic, std::move(message)});
  }

  void check_name(const Sp& name, const char* what) {
    if (is_reserved(name.text)) {
      error(name.span, std::string(what) + " '" + name.text +
                           "' is a reserved keyword");
    }
  }

  void on_system(const SystemStmt& s) {
    if (steps_started_) {
      error(s.name.span, "subsystem '" + s.name.text +
                             "' must be declared before protocol steps");
      return;
    }
    check_name(s.name, "subsystem name");
    if (decls_.has_subsystem(s.name.text)) {
      error(s.name.span, "subsystem '" + s.name.text + "' already declared");
      return;
    }
    if (!s.dim_integral || s.dim_value < 2.0) {
      error(s.dim_span, "subsystem dimension must be an integer of at least "
                        "2, got '" + s.dim_text + "'");
      return;
    }
    const auto dim = static_cast<std::size_t>(s.dim_value);
    total_dimension_ *= static_cast<double>(dim);
    if (total_dimension_ > static_cast<double>(kMaxTotalDimension)) {
      error(s.dim_span, "total dimension exceeds the dense-state cap of " +
                            std::to_string(kMaxTotalDimension));
      return;
    }
    decls_.subsystems.push_back(Subsystem{s.name.text, dim});
    decls_.dimension_of[s.name.text] = dim;
  }

  void on_basis(const BasisStmt& s) {
    if (steps_started_) {
      error(s.name.span, "basis '" + s.name.text +
                             "' must be declared before protocol steps");
      return;
    }
    check_name(s.name, "basis name");
    if (!decls_.has_subsystem(s.subsystem.text)) {
      error(s.subsystem.span,
            "basis declared on unknown subsystem '" + s.subsystem.text + "'");
      return;
    }
    const std::size_t dim = decls_.dimension_of.at(s.subsystem.text);
    if (decls_.find_basis(s.subsystem.text, s.name.text) != nullptr) {
      error(s.name.span, "basis '" + s.name.text + "' on '" +
                             s.subsystem.text + "' already declared");
      return;
    }
    bool rows_ok = true;
    if (s.rows.size() != dim) {
      error(s.name.span, "basis '" + s.name.text + "' declares " +
                             std::to_string(s.rows.size()) +
                             " vectors for dimension " + std::to_string(dim));
      rows_ok = false;
    }
    std::set<std::string> labels;
    for (const BasisRowStmt& row : s.rows) {
      check_name(row.label, "state label");
      if (!labels.insert(row.label.text).second) {
        error(row.label.span, "state label '" + row.label.text +
                                  "' repeated within basis '" + s.name.text +
                                  "'");
        rows_ok = false;
      }
      if (row.comps.size() != dim) {
        error(row.label.span, "state '" + row.label.text + "' has " +
                                  std::to_string(row.comps.size()) +
                                  " components for dimension " +
                                  std::to_string(dim));
        rows_ok = false;
      }
    }
    if (!rows_ok) return;
    std::vector<Basis::Vector> vectors;
    vectors.reserve(s.rows.size());
    for (const BasisRowStmt& row : s.rows) {
      vectors.push_back(Basis::Vector{row.label.text, row.comps});
    }
    try {
      Basis basis(s.name.text, s.subsystem.text, std::move(vectors));
      decls_.basis_index[{s.subsystem.text, s.name.text}] =
          decls_.bases.size();
      decls_.record_basis_of.emplace(s.subsystem.text, decls_.bases.size());
      decls_.bases.push_back(std::move(basis));
    } catch (const std::exception&) {
      error(s.name.span, "basis '" + s.name.text + "' on '" +
                             s.subsystem.text + "' is not orthonormal");
    }
  }

  void on_prepare(const PrepareStmt& s) {
    mark_step(s.subsystem.span, true);
    if (!decls_.has_subsystem(s.subsystem.text)) {
      error(s.subsystem.span,
            "prepare targets unknown subsystem '" + s.subsystem.text + "'");
      return;
    }
    if (!prepared_.insert(s.subsystem.text).second) {
      error(s.subsystem.span,
            "subsystem '" + s.subsystem.text + "' prepared twice");
      return;
    }
    const std::size_t dim = decls_.dimension_of.at(s.subsystem.text);
    std::vector<cplx> comps;
    if (s.label) {
      const Basis* found = nullptr;
      for (const Basis& b : decls_.bases) {
        if (b.subsystem() == s.subsystem.text && b.has_label(s.label->text)) {
          found = &b;
          break;
        }
      }
      if (found == nullptr) {
        error(s.label->span, "unknown state label '" + s.label->text +
                                 "' for subsystem '" + s.subsystem.text + "'");
        return;
      }
      comps = found->at(found->index_of(s.label->text)).components;
    } else {
      if (s.comps.size() != dim) {
        error(s.comps_span, "prepared state for '" + s.subsystem.text +
                                "' needs " + std::to_string(dim) +
                                " components, got " +
                                std::to_string(s.comps.size()));
        return;
      }
      double norm_sq = 0.0;
      for (const cplx& c : s.comps) norm_sq += std::norm(c);
      if (norm_sq < 1e-24) {
        error(s.comps_span,
              "prepared state for '" + s.subsystem.text + "' is zero");
        return;
      }
      comps = s.comps;
    }
    steps_.push_back(PrepareStep{s.subsystem.text, std::move(comps)});
  }

  void on_measure(const MeasureStmt& s) {
    mark_step(s.target.span, false);
    bool ok = true;
    if (!decls_.has_subsystem(s.target.text)) {
      error(s.target.span, std::string(s.catalytic ? "catmeasure" : "measure") +
                               " targets unknown subsystem '" + s.target.text +
                               "'");
      ok = false;
    }
    if (!decls_.has_subsystem(s.observer.text)) {
      error(s.observer.span,
            "records into unknown subsystem '" + s.observer.text + "'");
      ok = false;
    }
    if (!ok) return;
    if (s.observer.text == s.target.text) {
      error(s.observer.span, "observer '" + s.observer.text +
                                 "' cannot record a measurement of itself");
      return;
    }
    const Basis* basis = decls_.find_basis(s.target.text, s.basis.text);
    if (basis == nullptr) {
      error(s.basis.span, "subsystem '" + s.target.text +
                              "' has no basis named '" + s.basis.text + "'");
      return;
    }
    const Basis* record = decls_.first_basis(s.observer.text);
    if (record == nullptr) {
      error(s.observer.span, "observer '" + s.observer.text +
                                 "' declares no basis to record into");
      return;
    }
    const std::size_t outcomes = basis->dimension();
    if (outcomes > record->dimension()) {
      error(s.observer.span, "observer '" + s.observer.text + "' has " +
                                 std::to_string(record->dimension()) +
                                 " states but basis '" + s.basis.text +
                                 "' has " + std::to_string(outcomes) +
                                 " outcomes");
      return;
    }
    ObserverRegister reg = ObserverRegister::standard(*record, outcomes);
    if (s.catalytic) {
      steps_.push_back(
          CatalyticPremeasureStep{s.target.text, *basis, std::move(reg)});
    } else {
      steps_.push_back(PremeasureStep{s.target.text, *basis, std::move(reg)});
    }
  }

  void on_collapse(const CollapseStmt& s) {
    mark_step(s.target.span, false);
    if (!decls_.has_subsystem(s.target.text)) {
      error(s.target.span,
            "collapse targets unknown subsystem '" + s.target.text + "'");
      return;
    }
    const Basis* basis = decls_.find_basis(s.target.text, s.basis.text);
    if (basis == nullptr) {
      error(s.basis.span, "subsystem '" + s.target.text +
                              "' has no basis named '" + s.basis.text + "'");
      return;
    }
    steps_.push_back(CollapseStep{s.target.text, *basis});
  }

  void on_report(const ReportStmt& s) {
    mark_step(s.span, false);
    if (s.subsystems.size() != s.bases.size()) {
      error(s.span, "report names " + std::to_string(s.subsystems.size()) +
                        " subsystems but " + std::to_string(s.bases.size()) +
                        " bases");
      return;
    }
    std::vector<ReportRequest> requests;
    bool ok = true;
    for (std::size_t i = 0; i < s.subsystems.size(); ++i) {
      const Sp& sub = s.subsystems[i];
      const Sp& name = s.bases[i];
      if (!decls_.has_subsystem(sub.text)) {
        error(sub.span, "report names unknown subsystem '" + sub.text + "'");
        ok = false;
        continue;
      }
      const Basis* basis = decls_.find_basis(sub.text, name.text);
      if (basis == nullptr) {
        error(name.span, "subsystem '" + sub.text + "' has no basis named '" +
                             name.text + "'");
        ok = false;
        continue;
      }
      requests.push_back(ReportRequest{sub.text, *basis});
    }
    if (ok) steps_.push_back(ReportStep{std::move(requests)});
  }

  Declarations decls_;
  std::vector<Step> steps_;

 private:
  void mark_step(const SourceSpan& span, bool is_prepare) {
    if (is_prepare) {
      if (non_prepare_seen_) {
        error(span, "prepare must precede measurement and report steps");
      }
    } else {
      non_prepare_seen_ = true;
    }
    steps_started_ = true;
  }

  std::vector<ParseError>& errors_;
  std::set<std::string> prepared_;
  bool steps_started_ = false;
  bool non_prepare_seen_ = false;
  double total_dimension_ = 1.0;
};

}  // namespace

std::string_view parse_error_kind_name(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::lex: return "lex";
    case ParseErrorKind::syntax: return "syntax";
    case ParseErrorKind::semantic: return "semantic";
  }
  throw std::logic_error("unreachable");
}

std::string format_parse_error(const ParseError& error) {
  return std::to_string(error.span.line) + ":" +
         std::to_string(error.span.column) + ": " +
         std::string(parse_error_kind_name(error.kind)) + ": " + error.message;
}

ParseResult parse_protocol(std::string_view text) {
  ParseResult result;
  std::vector<ParseError>& errors = result.errors;

  std::vector<Stmt> stmts;
  bool header_attempted = false;
  std::size_t line_no = 0;
  std::size_t offset = 0;
  while (offset <= text.size()) {
    const std::size_t newline = text.find('\n', offset);
    const std::string_view line =
        text.substr(offset, newline == std::string_view::npos
                                ? std::string_view::npos
                                : newline - offset);
    ++line_no;
    offset = newline == std::string_view::npos ? text.size() + 1 : newline + 1;

    const std::vector<Token> tokens = lex_line(line, line_no, errors);
    if (tokens.empty()) continue;
    if (stmts.empty() && tokens.front().kind == TokKind::word &&
        tokens.front().text == "qwp") {
      header_attempted = true;
    }
    auto stmt = parse_line(tokens, line_no, errors);
    if (stmt) stmts.push_back(std::move(*stmt));
  }

  if (stmts.empty()) {
    if (errors.empty()) {
      errors.push_back(ParseError{SourceSpan{1, 1, 1},
                                  ParseErrorKind::semantic,
                                  "no system declaration"});
    }
    return result;
  }

  // Version header: required first, exactly once.
  bool header_ok = false;
  for (std::size_t i = 0; i < stmts.size(); ++i) {
    const auto* header = std::get_if<HeaderStmt>(&stmts[i]);
    if (header == nullptr) continue;
    if (i != 0) {
      errors.push_back(ParseError{header->span, ParseErrorKind::syntax,
                                  header_ok
                                      ? "duplicate 'qwp' header"
                                      : "the 'qwp' header must be the first "
                                        "statement"});
      continue;
    }
    if (!header->integral || header->version != 1.0) {
      errors.push_back(ParseError{header->span, ParseErrorKind::semantic,
                                  "unsupported protocol version '" +
                                      header->version_text + "'"});
    }
    header_ok = true;
  }
  if (!header_ok && !header_attempted) {
    const SourceSpan span = std::visit(
        [](const auto& s) { return first_span(s); },
        stmts.front());
    errors.push_back(ParseError{span, ParseErrorKind::syntax,
                                "expected a 'qwp 1' header line"});
  }

  SemanticPass pass(errors);
  for (const Stmt& stmt : stmts) {
    std::visit(
        [&pass](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, HeaderStmt>) {
            // handled above
          } else if constexpr (std::is_same_v<T, SystemStmt>) {
            pass.on_system(s);
          } else if constexpr (std::is_same_v<T, BasisStmt>) {
            pass.on_basis(s);
          } else if constexpr (std::is_same_v<T, PrepareStmt>) {
            pass.on_prepare(s);
          } else if constexpr (std::is_same_v<T, MeasureStmt>) {
            pass.on_measure(s);
          } else if constexpr (std::is_same_v<T, CollapseStmt>) {
            pass.on_collapse(s);
          } else if constexpr (std::is_same_v<T, ReportStmt>) {
            pass.on_report(s);
          }
        },
        stmt);
  }

  if (pass.decls_.subsystems.empty()) {
    errors.push_back(ParseError{SourceSpan{1, 1, 1}, ParseErrorKind::semantic,
                                "no system declaration"});
  }

  std::stable_sort(errors.begin(), errors.end(),
                   [](const ParseError& a, const ParseError& b) {
                     if (a.span.line != b.span.line)
                       return a.span.line < b.span.line;
                     return a.span.column < b.span.column;
                   });
  if (!errors.empty()) return result;

  Protocol protocol{SystemLayout(pass.decls_.subsystems),
                    std::move(pass.decls_.bases), std::move(pass.steps_)};
  const std::vector<std::string> problems = validate_protocol(protocol);
  if (!problems.empty()) {
    for (const std::string& problem : problems) {
      errors.push_back(ParseError{SourceSpan{1, 1, 1},
                                  ParseErrorKind::semantic, problem});
    }
    return result;
  }
  result.protocol = std::move(protocol);
  return result;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt_components(const std::vector<cplx>& comps) {
  std::string out;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    if (i != 0) out += ",";
    out += "(" + fmt_double(comps[i].real()) + "," +
           fmt_double(comps[i].imag()) + ")";
  }
  return out;
}

const Basis* declared_basis(const Protocol& p, const Basis& wanted) {
  for (const Basis& b : p.bases) {
    if (b.subsystem() == wanted.subsystem() && b.name() == wanted.name()) {
      return &b;
    }
  }
  return nullptr;
}

const Basis* first_declared_basis(const Protocol& p, const std::string& sub) {
  for (const Basis& b : p.bases) {
    if (b.subsystem() == sub) return &b;
  }
  return nullptr;
}

void require_expressible_basis(const Protocol& p, const Basis& basis,
                               const char* where) {
  const Basis* declared = declared_basis(p, basis);
  if (declared == nullptr || !(*declared == basis)) {
    throw std::invalid_argument(
        std::string("cannot serialize: ") + where + " uses basis '" +
        basis.name() + "' on '" + basis.subsystem() +
        "' that is not among the protocol's declared bases");
  }
}

void require_expressible_observer(const Protocol& p,
                                  const ObserverRegister& observer,
                                  const char* where) {
  const Basis* first = first_declared_basis(p, observer.subsystem());
  if (first == nullptr || !(observer.record_basis() == *first)) {
    throw std::invalid_argument(
        std::string("cannot serialize: ") + where + " observer '" +
        observer.subsystem() +
        "' does not record into its first declared basis");
  }
  std::vector<std::size_t> expected(observer.record_indices().size());
  std::iota(expected.begin(), expected.end(), std::size_t{0});
  if (observer.ready_index() != 0 || observer.record_indices() != expected) {
    throw std::invalid_argument(
        std::string("cannot serialize: ") + where + " observer '" +
        observer.subsystem() +
        "' does not use the standard ready/record convention");
  }
}

}  // namespace

std::string serialize_protocol(const Protocol& p) {
  const std::vector<std::string> problems = validate_protocol(p);
  if (!problems.empty()) {
    throw std::invalid_argument("cannot serialize an invalid protocol: " +
                                problems.front());
  }
  for (const Step& step : p.steps) {
    if (const auto* s = std::get_if<PremeasureStep>(&step)) {
      require_expressible_basis(p, s->basis, "measure");
      require_expressible_observer(p, s->observer, "measure");
    } else if (const auto* s = std::get_if<CatalyticPremeasureStep>(&step)) {
      require_expressible_basis(p, s->cat_basis, "catmeasure");
      require_expressible_observer(p, s->observer, "catmeasure");
    } else if (const auto* s = std::get_if<CollapseStep>(&step)) {
      require_expressible_basis(p, s->basis, "collapse");
    } else if (const auto* s = std::get_if<ReportStep>(&step)) {
      for (const ReportRequest& r : s->requests) {
        require_expressible_basis(p, r.basis, "report");
      }
    }
  }

  std::string out = "qwp 1\n";
  for (const Subsystem& sub : p.layout.subsystems()) {
    out += "system " + sub.name + ":" + std::to_string(sub.dimension) + "\n";
  }
  for (const Basis& b : p.bases) {
    out += "basis " + b.name() + " on " + b.subsystem() + " = [";
    for (std::size_t k = 0; k < b.dimension(); ++k) {
      if (k != 0) out += "; ";
      out += b.label(k) + ": " + fmt_components(b.at(k).components);
    }
    out += "]\n";
  }
  for (const Step& step : p.steps) {
    if (const auto* s = std::get_if<PrepareStep>(&step)) {
      out += "prepare " + s->subsystem + " " + fmt_components(s->state) + "\n";
    } else if (const auto* s = std::get_if<PremeasureStep>(&step)) {
      out += "measure " + s->target + " in " + s->basis.name() + " record " +
             s->observer.subsystem() + "\n";
    } else if (const auto* s = std::get_if<CatalyticPremeasureStep>(&step)) {
      out += "catmeasure " + s->agent + " in " + s->cat_basis.name() +
             " record " + s->observer.subsystem() + "\n";
    } else if (const auto* s = std::get_if<CollapseStep>(&step)) {
      out += "collapse " + s->target + " in " + s->basis.name() + "\n";
    } else if (const auto* s = std::get_if<ReportStep>(&step)) {
      out += "report";
      for (const ReportRequest& r : s->requests) out += " " + r.subsystem;
      out += " in";
      for (const ReportRequest& r : s->requests) out += " " + r.basis.name();
      out += "\n";
    }
  }
  return out;
}

}  // namespace qwp
