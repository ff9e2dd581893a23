// Logic program syntax: terms, atoms, rules, programs, the `.lp` reader and
// printer, and the normal/plain/propositional classifiers.

#ifndef LPX_SYNTAX_HPP_
#define LPX_SYNTAX_HPP_

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace lpx {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// ---------------------------------------------------------------------------
// Vocabularies
// ---------------------------------------------------------------------------

enum class SymbolKind { kPredicate, kFunction };

inline const char* to_string(SymbolKind k) { return k == SymbolKind::kPredicate ? "predicate" : "function"; }

struct SymbolInfo {
  SymbolKind kind = SymbolKind::kPredicate;
  std::size_t arity = 0;
  friend bool operator==(const SymbolInfo&, const SymbolInfo&) = default;
};

struct Symbol {
  std::string name;
  SymbolKind kind = SymbolKind::kPredicate;
  std::size_t arity = 0;

  friend bool operator==(const Symbol&, const Symbol&) = default;
  friend auto operator<=>(const Symbol& a, const Symbol& b) {
    return std::tie(a.name, a.kind, a.arity) <=> std::tie(b.name, b.kind, b.arity);
  }
};

// Name -> (kind, arity). A name is used with exactly one kind and arity.
class Vocabulary {
 public:
  using Map = std::map<std::string, SymbolInfo>;

  // Returns an error message on clash, nothing on success.
  std::optional<std::string> try_add(const std::string& name, SymbolKind kind, std::size_t arity) {
    auto [it, inserted] = symbols_.emplace(name, SymbolInfo{kind, arity});
    if (inserted) return std::nullopt;
    if (it->second.kind != kind) {
      return "symbol '" + name + "' used both as " + to_string(it->second.kind) + " and " + to_string(kind);
    }
    if (it->second.arity != arity) {
      return "arity clash for '" + name + "': " + std::to_string(it->second.arity) + " vs " + std::to_string(arity);
    }
    return std::nullopt;
  }

  void add(const std::string& name, SymbolKind kind, std::size_t arity) {
    if (auto err = try_add(name, kind, arity)) throw Error(*err);
  }
  void add(const Symbol& s) { add(s.name, s.kind, s.arity); }

  void merge(const Vocabulary& other) {
    for (const auto& [name, info] : other.symbols_) add(name, info.kind, info.arity);
  }

  bool contains(const std::string& name) const { return symbols_.count(name) != 0; }
  const SymbolInfo* find(const std::string& name) const {
    auto it = symbols_.find(name);
    return it == symbols_.end() ? nullptr : &it->second;
  }
  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  Map::const_iterator begin() const { return symbols_.begin(); }
  Map::const_iterator end() const { return symbols_.end(); }

  std::vector<Symbol> symbols() const {
    std::vector<Symbol> out;
    for (const auto& [name, info] : symbols_) out.push_back({name, info.kind, info.arity});
    return out;
  }

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

 private:
  Map symbols_;
};

// ---------------------------------------------------------------------------
// Terms, atoms, literals, rules
// ---------------------------------------------------------------------------

// A variable, a function application (arity 0 = individual constant), or a
// numeral. Numerals are standard names: they denote the domain element with
// the same name and never enter a vocabulary.
struct Term {
  enum class Kind { kVariable, kFunction, kNumber };

  Kind kind = Kind::kVariable;
  std::string name;
  std::vector<Term> args;

  static Term variable(std::string n) { return Term{Kind::kVariable, std::move(n), {}}; }
  static Term function(std::string n, std::vector<Term> a = {}) { return Term{Kind::kFunction, std::move(n), std::move(a)}; }
  static Term constant(std::string n) { return function(std::move(n)); }
  static Term number(std::uint64_t v) { return Term{Kind::kNumber, std::to_string(v), {}}; }

  bool is_variable() const { return kind == Kind::kVariable; }
  bool is_number() const { return kind == Kind::kNumber; }
  bool is_function() const { return kind == Kind::kFunction; }

  bool is_ground() const {
    if (is_variable()) return false;
    return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
  }

  friend bool operator==(const Term& a, const Term& b) {
    return a.kind == b.kind && a.name == b.name && a.args == b.args;
  }
  friend bool operator<(const Term& a, const Term& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.name != b.name) return a.name < b.name;
    return std::lexicographical_compare(a.args.begin(), a.args.end(), b.args.begin(), b.args.end());
  }
};

struct Atom {
  enum class Kind { kPredicate, kEquality };

  Kind kind = Kind::kPredicate;
  std::string predicate;  // empty for equalities
  std::vector<Term> args;  // two terms for equalities

  static Atom pred(std::string p, std::vector<Term> a = {}) { return Atom{Kind::kPredicate, std::move(p), std::move(a)}; }
  static Atom equality(Term l, Term r) { return Atom{Kind::kEquality, {}, {std::move(l), std::move(r)}}; }

  bool is_equality() const { return kind == Kind::kEquality; }

  friend bool operator==(const Atom& a, const Atom& b) {
    return a.kind == b.kind && a.predicate == b.predicate && a.args == b.args;
  }
  friend bool operator<(const Atom& a, const Atom& b) {
    return std::tie(a.kind, a.predicate, a.args) < std::tie(b.kind, b.predicate, b.args);
  }
};

struct Literal {
  Atom atom;
  bool negated = false;

  static Literal pos(Atom a) { return Literal{std::move(a), false}; }
  static Literal neg(Atom a) { return Literal{std::move(a), true}; }

  friend bool operator==(const Literal& a, const Literal& b) { return a.negated == b.negated && a.atom == b.atom; }
  friend bool operator<(const Literal& a, const Literal& b) {
    return std::tie(a.atom, a.negated) < std::tie(b.atom, b.negated);
  }
};

// body -> head_1 v ... v head_n; an empty head is falsity.
struct Rule {
  std::vector<Atom> head;
  std::vector<Literal> body;

  bool is_constraint() const { return head.empty(); }

  friend bool operator==(const Rule& a, const Rule& b) { return a.head == b.head && a.body == b.body; }
  friend bool operator<(const Rule& a, const Rule& b) { return std::tie(a.head, a.body) < std::tie(b.head, b.body); }
};

// ---------------------------------------------------------------------------
// Variable and symbol traversal
// ---------------------------------------------------------------------------

inline void collect_variables(const Term& t, std::vector<std::string>& out) {
  if (t.is_variable()) {
    if (std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
    return;
  }
  for (const auto& a : t.args) collect_variables(a, out);
}

inline void collect_variables(const Atom& a, std::vector<std::string>& out) {
  for (const auto& t : a.args) collect_variables(t, out);
}

// Variables in order of first occurrence: head first, then body.
inline std::vector<std::string> rule_variables(const Rule& r) {
  std::vector<std::string> out;
  for (const auto& a : r.head) collect_variables(a, out);
  for (const auto& l : r.body) collect_variables(l.atom, out);
  return out;
}

inline std::optional<std::string> add_term_symbols(const Term& t, Vocabulary& v) {
  if (t.is_function()) {
    if (auto e = v.try_add(t.name, SymbolKind::kFunction, t.args.size())) return e;
  }
  for (const auto& a : t.args) {
    if (auto e = add_term_symbols(a, v)) return e;
  }
  return std::nullopt;
}

inline std::optional<std::string> add_atom_symbols(const Atom& a, Vocabulary& v) {
  if (!a.is_equality()) {
    if (auto e = v.try_add(a.predicate, SymbolKind::kPredicate, a.args.size())) return e;
  }
  for (const auto& t : a.args) {
    if (auto e = add_term_symbols(t, v)) return e;
  }
  return std::nullopt;
}

inline Term substitute(const Term& t, const std::map<std::string, Term>& sub) {
  if (t.is_variable()) {
    auto it = sub.find(t.name);
    return it == sub.end() ? t : it->second;
  }
  Term out = t;
  for (auto& a : out.args) a = substitute(a, sub);
  return out;
}

inline Atom substitute(const Atom& a, const std::map<std::string, Term>& sub) {
  Atom out = a;
  for (auto& t : out.args) t = substitute(t, sub);
  return out;
}

inline Rule substitute(const Rule& r, const std::map<std::string, Term>& sub) {
  Rule out;
  for (const auto& a : r.head) out.head.push_back(substitute(a, sub));
  for (const auto& l : r.body) out.body.push_back({substitute(l.atom, sub), l.negated});
  return out;
}

// ---------------------------------------------------------------------------
// Programs
// ---------------------------------------------------------------------------

class Program {
 public:
  Program() = default;

  explicit Program(std::vector<Rule> rules) : rules_(std::move(rules)) {
    for (const auto& r : rules_) {
      for (const auto& h : r.head) {
        if (h.is_equality()) throw Error("equality in rule head");
        intensional_.insert(h.predicate);
      }
      for (const auto& h : r.head) {
        if (auto e = add_atom_symbols(h, vocabulary_)) throw Error(*e);
      }
      for (const auto& l : r.body) {
        if (auto e = add_atom_symbols(l.atom, vocabulary_)) throw Error(*e);
      }
    }
  }

  const std::vector<Rule>& rules() const { return rules_; }
  const Vocabulary& vocabulary() const { return vocabulary_; }
  const std::set<std::string>& intensional() const { return intensional_; }
  bool is_intensional(const std::string& p) const { return intensional_.count(p) != 0; }
  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }

  // Predicates in order of first occurrence.
  std::vector<std::string> predicates_in_order() const {
    std::vector<std::string> out;
    auto note = [&](const Atom& a) {
      if (!a.is_equality() && std::find(out.begin(), out.end(), a.predicate) == out.end()) out.push_back(a.predicate);
    };
    for (const auto& r : rules_) {
      for (const auto& h : r.head) note(h);
      for (const auto& l : r.body) note(l.atom);
    }
    return out;
  }

  friend bool operator==(const Program& a, const Program& b) { return a.rules_ == b.rules_; }

 private:
  std::vector<Rule> rules_;
  Vocabulary vocabulary_;
  std::set<std::string> intensional_;
};

inline Program concat(const Program& a, const Program& b) {
  std::vector<Rule> rules = a.rules();
  rules.insert(rules.end(), b.rules().begin(), b.rules().end());
  return Program(std::move(rules));
}

struct Classification {
  bool normal = true;
  bool plain = true;
  bool propositional = true;
  std::set<std::string> intensional;
};

inline Classification classify(const Program& p) {
  Classification c;
  c.intensional = p.intensional();
  for (const auto& r : p.rules()) {
    if (r.head.size() > 1) c.normal = false;
    for (const auto& l : r.body) {
      if (l.negated && !l.atom.is_equality() && p.is_intensional(l.atom.predicate)) c.plain = false;
    }
  }
  for (const auto& [name, info] : p.vocabulary()) {
    if (info.kind == SymbolKind::kPredicate && info.arity > 0) c.propositional = false;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

inline std::string render(const Term& t) {
  if (t.args.empty()) return t.name;
  std::string s = t.name + "(";
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    if (i) s += ",";
    s += render(t.args[i]);
  }
  return s + ")";
}

inline std::string render(const Atom& a) {
  if (a.is_equality()) return render(a.args[0]) + " = " + render(a.args[1]);
  if (a.args.empty()) return a.predicate;
  std::string s = a.predicate + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ",";
    s += render(a.args[i]);
  }
  return s + ")";
}

inline std::string render(const Literal& l) {
  if (l.atom.is_equality() && l.negated) return render(l.atom.args[0]) + " != " + render(l.atom.args[1]);
  return (l.negated ? "not " : "") + render(l.atom);
}

inline std::string render(const Rule& r) {
  std::string s;
  if (r.head.empty()) {
    s = "#false";
  } else {
    for (std::size_t i = 0; i < r.head.size(); ++i) {
      if (i) s += " ; ";
      s += render(r.head[i]);
    }
  }
  if (!r.body.empty()) {
    s += " :- ";
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      if (i) s += ", ";
      s += render(r.body[i]);
    }
  }
  return s + ".";
}

inline std::string render_program(const Program& p) {
  std::string s;
  for (const auto& r : p.rules()) s += render(r) + "\n";
  return s;
}

// ---------------------------------------------------------------------------
// Reader
// ---------------------------------------------------------------------------

namespace detail {

struct Token {
  enum class Kind { kIdent, kVariable, kNumber, kLParen, kRParen, kComma, kSemicolon, kDot, kIf, kEq, kNeq, kFalse, kEnd };
  Kind kind = Kind::kEnd;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_blank();
    Token t;
    t.line = line_;
    t.column = column_;
    if (pos_ >= text_.size()) return t;
    char c = text_[pos_];
    auto single = [&](Token::Kind k) {
      t.kind = k;
      t.text = std::string(1, c);
      advance();
      return t;
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) advance();
      t.text = std::string(text_.substr(start, pos_ - start));
      t.kind = std::isupper(static_cast<unsigned char>(c)) ? Token::Kind::kVariable : Token::Kind::kIdent;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
      t.text = std::string(text_.substr(start, pos_ - start));
      t.kind = Token::Kind::kNumber;
      return t;
    }
    switch (c) {
      case '(': return single(Token::Kind::kLParen);
      case ')': return single(Token::Kind::kRParen);
      case ',': return single(Token::Kind::kComma);
      case ';': return single(Token::Kind::kSemicolon);
      case '.': return single(Token::Kind::kDot);
      case '=': return single(Token::Kind::kEq);
      case ':':
        if (peek(1) == '-') {
          advance();
          advance();
          t.kind = Token::Kind::kIf;
          t.text = ":-";
          return t;
        }
        break;
      case '!':
        if (peek(1) == '=') {
          advance();
          advance();
          t.kind = Token::Kind::kNeq;
          t.text = "!=";
          return t;
        }
        break;
      case '#':
        if (text_.substr(pos_, 6) == "#false") {
          for (int i = 0; i < 6; ++i) advance();
          t.kind = Token::Kind::kFalse;
          t.text = "#false";
          return t;
        }
        break;
      default:
        break;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line_, column_);
  }

 private:
  char peek(std::size_t k) const { return pos_ + k < text_.size() ? text_[pos_ + k] : '\0'; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_blank() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

class ProgramReader {
 public:
  explicit ProgramReader(std::string_view text) : lexer_(text) { shift(); }

  std::vector<Rule> read_all() {
    std::vector<Rule> rules;
    while (tok_.kind != Token::Kind::kEnd) rules.push_back(read_rule());
    return rules;
  }

  // A single term, e.g. for command-line atoms.
  Term read_term_only() {
    Term t = read_term();
    expect(Token::Kind::kEnd, "end of input");
    return t;
  }

  Atom read_atom_only() {
    Token start = tok_;
    Term t = read_term();
    if (tok_.kind == Token::Kind::kDot) shift();
    expect(Token::Kind::kEnd, "end of input");
    return to_predicate_atom(t, start);
  }

 private:
  void shift() { tok_ = lexer_.next(); }

  [[noreturn]] void fail(const std::string& msg, const Token& at) const { throw ParseError(msg, at.line, at.column); }

  void expect(Token::Kind k, const char* what) {
    if (tok_.kind != k) fail(std::string("expected ") + what + (tok_.text.empty() ? "" : ", found '" + tok_.text + "'"), tok_);
    shift();
  }

  void note_symbols(const Atom& a, const Token& at) {
    if (auto e = add_atom_symbols(a, vocabulary_)) fail(*e, at);
  }

  Rule read_rule() {
    Rule r;
    if (tok_.kind == Token::Kind::kFalse) {
      shift();
    } else if (tok_.kind != Token::Kind::kIf) {
      while (true) {
        Token start = tok_;
        if (tok_.kind == Token::Kind::kIdent && tok_.text == "not") fail("negated atom in rule head", tok_);
        Term t = read_term();
        if (tok_.kind == Token::Kind::kEq || tok_.kind == Token::Kind::kNeq) fail("equality in rule head", start);
        Atom a = to_predicate_atom(t, start);
        note_symbols(a, start);
        r.head.push_back(std::move(a));
        if (tok_.kind != Token::Kind::kSemicolon) break;
        shift();
      }
    }
    if (tok_.kind == Token::Kind::kIf) {
      shift();
      while (true) {
        r.body.push_back(read_literal());
        if (tok_.kind != Token::Kind::kComma) break;
        shift();
      }
    } else if (r.head.empty() && tok_.kind != Token::Kind::kDot) {
      fail("expected ':-' or '.'", tok_);
    }
    expect(Token::Kind::kDot, "'.'");
    return r;
  }

  Literal read_literal() {
    bool negated = false;
    if (tok_.kind == Token::Kind::kIdent && tok_.text == "not") {
      negated = true;
      shift();
    }
    Token start = tok_;
    Term t = read_term();
    if (tok_.kind == Token::Kind::kEq || tok_.kind == Token::Kind::kNeq) {
      bool neq = tok_.kind == Token::Kind::kNeq;
      shift();
      Term rhs = read_term();
      Atom a = Atom::equality(std::move(t), std::move(rhs));
      note_symbols(a, start);
      return Literal{std::move(a), negated != neq};
    }
    Atom a = to_predicate_atom(t, start);
    note_symbols(a, start);
    return Literal{std::move(a), negated};
  }

  Atom to_predicate_atom(const Term& t, const Token& at) const {
    if (!t.is_function()) fail("expected an atom", at);
    return Atom::pred(t.name, t.args);
  }

  Term read_term() {
    Token t = tok_;
    switch (t.kind) {
      case Token::Kind::kVariable:
        shift();
        return Term::variable(t.text);
      case Token::Kind::kNumber:
        shift();
        return Term{Term::Kind::kNumber, t.text, {}};
      case Token::Kind::kIdent: {
        if (t.text == "not") fail("unexpected 'not'", t);
        shift();
        Term out = Term::function(t.text);
        if (tok_.kind == Token::Kind::kLParen) {
          shift();
          while (true) {
            out.args.push_back(read_term());
            if (tok_.kind != Token::Kind::kComma) break;
            shift();
          }
          expect(Token::Kind::kRParen, "')'");
        }
        return out;
      }
      default:
        fail(t.kind == Token::Kind::kEnd ? "unexpected end of input" : "unexpected '" + t.text + "'", t);
    }
  }

  Lexer lexer_;
  Token tok_;
  Vocabulary vocabulary_;
};

}  // namespace detail

inline Program parse_program(std::string_view text) {
  detail::ProgramReader reader(text);
  return Program(reader.read_all());
}

inline Atom parse_atom(std::string_view text) { return detail::ProgramReader(text).read_atom_only(); }
inline Term parse_term(std::string_view text) { return detail::ProgramReader(text).read_term_only(); }

}  // namespace lpx

#endif  // LPX_SYNTAX_HPP_
