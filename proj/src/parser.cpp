#include <cctype>
#include <limits>
#include <set>

#include "opcheck/frontend.hpp"

namespace opcheck {

ParseError::ParseError(const std::string& message, SourcePos pos)
    : std::runtime_error(std::to_string(pos.line) + ":" + std::to_string(pos.column) +
                         ": " + message),
      message_(message),
      pos_(pos) {}

namespace {

enum class Tok {
  Ident,
  Number,
  Punct,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.pos = {line_, col_};
      if (i_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[i_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Tok::Ident;
        while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) ||
                                    src_[i_] == '_' || src_[i_] == '$'))
          t.text += advance();
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = Tok::Number;
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_])))
          t.text += advance();
      } else {
        t.kind = Tok::Punct;
        static const char* const multi[] = {"==>", ":=", "==", "!=", "<=", ">=", "&&", "||"};
        bool matched = false;
        for (const char* m : multi) {
          std::string_view mv(m);
          if (src_.substr(i_, mv.size()) == mv) {
            for (std::size_t k = 0; k < mv.size(); ++k) t.text += advance();
            matched = true;
            break;
          }
        }
        if (!matched) {
          static const std::string single = "+-*/%<>!(){}[],;:.";
          if (single.find(c) == std::string::npos)
            throw ParseError(std::string("unexpected character '") + c + "'", t.pos);
          t.text += advance();
        }
      }
      out.push_back(t);
    }
  }

 private:
  char advance() {
    char c = src_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (src_.substr(i_, 2) == "//") {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
      } else if (src_.substr(i_, 2) == "/*") {
        SourcePos start{line_, col_};
        advance();
        advance();
        while (i_ < src_.size() && src_.substr(i_, 2) != "*/") advance();
        if (i_ >= src_.size()) throw ParseError("unterminated comment", start);
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// Intermediate parse result: either a plain expression or a formula
// connective over sub-terms. Conversion happens once the context is known.
struct Term {
  enum Kind { Leaf, And, Or, Not, Implies, Exists, Forall, True, False } kind = Leaf;
  ExprPtr expr;
  std::vector<Term> kids;
  std::vector<BoundVar> vars;
  SourcePos pos;
};

const std::set<std::string> kKeywords = {"var", "proc", "invariant", "if", "else", "return",
                                         "int", "exists", "forall", "true", "false", "store"};

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(Lexer(src).run()) {}

  Library library() {
    Library lib;
    std::set<std::string> names;
    while (!at_end()) {
      if (is_word("var")) {
        auto g = global();
        if (!names.insert(g.name).second)
          throw ParseError("duplicate declaration of '" + g.name + "'", g.pos);
        lib.globals.push_back(std::move(g));
      } else {
        auto p = procedure();
        if (!names.insert(p.name).second)
          throw ParseError("duplicate declaration of '" + p.name + "'", p.pos);
        lib.procedures.push_back(std::move(p));
      }
    }
    return lib;
  }

  FormulaPtr standalone_formula() {
    Term t = term(true);
    expect_end();
    return to_formula(t);
  }

  ExprPtr standalone_expr() {
    Term t = term(false);
    expect_end();
    return to_expr(t);
  }

 private:
  // -- token helpers --------------------------------------------------------

  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at_end() const { return peek().kind == Tok::End; }
  bool is_punct(const char* p, std::size_t k = 0) const {
    return peek(k).kind == Tok::Punct && peek(k).text == p;
  }
  bool is_word(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }

  Token next() {
    Token t = peek();
    if (!at_end()) ++pos_;
    return t;
  }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(what + ", found " + found, t.pos);
  }

  void expect(const char* p) {
    if (!is_punct(p)) fail(std::string("expected '") + p + "'");
    next();
  }

  void expect_word(const char* w) {
    if (!is_word(w)) fail(std::string("expected '") + w + "'");
    next();
  }

  void expect_end() {
    if (!at_end()) fail("expected end of input");
  }

  std::string ident(const char* what) {
    if (peek().kind != Tok::Ident || kKeywords.count(peek().text))
      fail(std::string("expected ") + what);
    return next().text;
  }

  Int integer_literal() {
    bool negative = false;
    if (is_punct("-")) {
      next();
      negative = true;
    }
    if (peek().kind != Tok::Number) fail("expected integer constant");
    return number(next(), negative);
  }

  static Int number(const Token& t, bool negative) {
    constexpr auto max = static_cast<unsigned long long>(std::numeric_limits<Int>::max());
    unsigned long long v = 0;
    for (char c : t.text) {
      unsigned long long d = static_cast<unsigned long long>(c - '0');
      if (v > (max + 1 - d) / 10) throw ParseError("integer literal out of range", t.pos);
      v = v * 10 + d;
    }
    if (!negative && v > max) throw ParseError("integer literal out of range", t.pos);
    if (negative) return v == max + 1 ? std::numeric_limits<Int>::min() : -static_cast<Int>(v);
    return static_cast<Int>(v);
  }

  // -- declarations ---------------------------------------------------------

  GlobalDecl global() {
    GlobalDecl g;
    g.pos = peek().pos;
    expect_word("var");
    g.name = ident("global name");
    expect(":");
    g.kind = var_type();
    expect(":=");
    g.init = integer_literal();
    expect(";");
    return g;
  }

  VarKind var_type() {
    if (is_punct("[")) {
      next();
      expect_word("int");
      VarKind k = VarKind::Array1;
      if (is_punct(",")) {
        next();
        expect_word("int");
        k = VarKind::Array2;
      }
      expect("]");
      expect_word("int");
      return k;
    }
    expect_word("int");
    return VarKind::Scalar;
  }

  Procedure procedure() {
    Procedure p;
    p.pos = peek().pos;
    if (is_word("proc")) next();
    p.name = ident("procedure or 'var'");
    expect("(");
    if (!is_punct(")")) {
      p.params.push_back(ident("parameter name"));
      while (is_punct(",")) {
        next();
        p.params.push_back(ident("parameter name"));
      }
    }
    expect(")");
    if (is_word("invariant")) {
      next();
      p.invariant = to_formula(term(true));
      expect(";");
    }
    p.body = block();
    return p;
  }

  // -- statements -----------------------------------------------------------

  StmtPtr block() {
    SourcePos pos = peek().pos;
    expect("{");
    std::vector<StmtPtr> body;
    while (!is_punct("}")) {
      if (at_end()) fail("expected '}'");
      body.push_back(statement());
    }
    next();
    return Stmt::block(std::move(body), pos);
  }

  // A ';' may be omitted directly before a closing brace.
  void terminator() {
    if (is_punct("}")) return;
    expect(";");
  }

  StmtPtr statement() {
    SourcePos pos = peek().pos;
    if (is_word("if")) return if_statement();
    if (is_word("return")) {
      next();
      std::string r = ident("return variable");
      terminator();
      return Stmt::ret(r, pos);
    }
    std::string target = ident("statement");
    if (is_punct("[")) {
      next();
      std::vector<ExprPtr> idx{expr()};
      while (is_punct(",")) {
        next();
        idx.push_back(expr());
      }
      expect("]");
      expect(":=");
      ExprPtr rhs = expr();
      terminator();
      return Stmt::array_assign(target, std::move(idx), rhs, pos);
    }
    expect(":=");
    if (peek().kind == Tok::Ident && !kKeywords.count(peek().text) && is_punct("(", 1)) {
      std::string callee = next().text;
      next();
      std::vector<ExprPtr> args;
      if (!is_punct(")")) {
        args.push_back(expr());
        while (is_punct(",")) {
          next();
          args.push_back(expr());
        }
      }
      expect(")");
      terminator();
      return Stmt::call(target, callee, std::move(args), pos);
    }
    ExprPtr rhs = expr();
    terminator();
    return Stmt::assign(target, rhs, pos);
  }

  StmtPtr if_statement() {
    SourcePos pos = peek().pos;
    expect_word("if");
    expect("(");
    ExprPtr cond = expr();
    expect(")");
    StmtPtr then_branch = block();
    StmtPtr else_branch;
    if (is_word("else")) {
      next();
      if (is_word("if")) {
        SourcePos ipos = peek().pos;
        else_branch = Stmt::block({if_statement()}, ipos);
      } else {
        else_branch = block();
      }
    } else {
      else_branch = Stmt::block({}, pos);
    }
    return Stmt::if_(cond, then_branch, else_branch, pos);
  }

  ExprPtr expr() { return to_expr(term(false)); }

  // -- terms ----------------------------------------------------------------

  Term leaf(ExprPtr e) {
    Term t;
    t.kind = Term::Leaf;
    t.pos = e->pos;
    t.expr = std::move(e);
    return t;
  }

  ExprPtr to_expr(const Term& t) {
    switch (t.kind) {
      case Term::Leaf:
        return t.expr;
      case Term::True:
        return Expr::constant(1, t.pos);
      case Term::False:
        return Expr::constant(0, t.pos);
      case Term::Not:
        return Expr::unary(UnOp::Not, to_expr(t.kids[0]), t.pos);
      case Term::And:
      case Term::Or: {
        ExprPtr acc = to_expr(t.kids[0]);
        for (std::size_t i = 1; i < t.kids.size(); ++i)
          acc = Expr::binary(t.kind == Term::And ? BinOp::And : BinOp::Or, acc,
                             to_expr(t.kids[i]), t.pos);
        return acc;
      }
      default:
        throw ParseError("quantifier or implication used as a value", t.pos);
    }
  }

  FormulaPtr to_formula(const Term& t) {
    switch (t.kind) {
      case Term::Leaf:
        return Formula::make_atom(t.expr);
      case Term::True:
        return Formula::top();
      case Term::False:
        return Formula::bottom();
      case Term::Not:
        return Formula::negate(to_formula(t.kids[0]));
      case Term::And:
      case Term::Or: {
        std::vector<FormulaPtr> kids;
        for (const auto& k : t.kids) kids.push_back(to_formula(k));
        return t.kind == Term::And ? Formula::conj(kids) : Formula::disj(kids);
      }
      case Term::Implies:
        return Formula::implies(to_formula(t.kids[0]), to_formula(t.kids[1]));
      case Term::Exists:
        return Formula::exists(t.vars, to_formula(t.kids[0]));
      case Term::Forall:
        return Formula::forall(t.vars, to_formula(t.kids[0]));
    }
    return Formula::top();
  }

  Term term(bool formula) {
    formula_ = formula;
    return implication();
  }

  Term implication() {
    Term lhs = disjunction();
    if (is_punct("==>")) {
      if (!formula_) fail("'==>' is only allowed in formulas");
      SourcePos pos = next().pos;
      Term rhs = implication();
      Term t;
      t.kind = Term::Implies;
      t.pos = pos;
      t.kids = {std::move(lhs), std::move(rhs)};
      return t;
    }
    return lhs;
  }

  Term nary(Term::Kind kind, const char* op, Term (Parser::*sub)()) {
    Term first = (this->*sub)();
    if (!is_punct(op)) return first;
    Term t;
    t.kind = kind;
    t.pos = first.pos;
    t.kids.push_back(std::move(first));
    while (is_punct(op)) {
      next();
      t.kids.push_back((this->*sub)());
    }
    return t;
  }

  Term disjunction() { return nary(Term::Or, "||", &Parser::conjunction); }
  Term conjunction() { return nary(Term::And, "&&", &Parser::equality); }

  Term binary_level(const std::vector<std::pair<const char*, BinOp>>& ops,
                    Term (Parser::*sub)()) {
    Term lhs = (this->*sub)();
    for (;;) {
      const std::pair<const char*, BinOp>* hit = nullptr;
      for (const auto& op : ops)
        if (is_punct(op.first)) hit = &op;
      if (!hit) return lhs;
      SourcePos pos = next().pos;
      Term rhs = (this->*sub)();
      lhs = leaf(Expr::binary(hit->second, to_expr(lhs), to_expr(rhs), pos));
      lhs.pos = pos;
    }
  }

  Term equality() {
    return binary_level({{"==", BinOp::Eq}, {"!=", BinOp::Ne}}, &Parser::relational);
  }
  Term relational() {
    return binary_level(
        {{"<", BinOp::Lt}, {">", BinOp::Gt}, {"<=", BinOp::Le}, {">=", BinOp::Ge}},
        &Parser::additive);
  }
  Term additive() {
    return binary_level({{"+", BinOp::Add}, {"-", BinOp::Sub}}, &Parser::multiplicative);
  }
  Term multiplicative() {
    return binary_level({{"*", BinOp::Mul}, {"/", BinOp::Div}, {"%", BinOp::Mod}},
                        &Parser::unary);
  }

  Term unary() {
    SourcePos pos = peek().pos;
    if (is_punct("!")) {
      next();
      Term operand = unary();
      Term t;
      t.kind = Term::Not;
      t.pos = pos;
      t.kids = {std::move(operand)};
      return t;
    }
    if (is_punct("-")) {
      next();
      if (peek().kind == Tok::Number) return leaf(Expr::constant(number(next(), true), pos));
      Term operand = unary();
      return leaf(Expr::unary(UnOp::Neg, to_expr(operand), pos));
    }
    return primary();
  }

  std::vector<ExprPtr> expr_list(const char* close) {
    std::vector<ExprPtr> out;
    if (is_punct(close)) return out;
    out.push_back(to_expr(implication()));
    while (is_punct(",")) {
      next();
      out.push_back(to_expr(implication()));
    }
    return out;
  }

  Term primary() {
    SourcePos pos = peek().pos;
    const Token& t = peek();
    if (t.kind == Tok::Number) return leaf(Expr::constant(number(next(), false), pos));
    if (is_punct("(")) {
      next();
      Term inner = implication();
      expect(")");
      return inner;
    }
    if (t.kind != Tok::Ident) fail("expected expression");
    if (t.text == "true" || t.text == "false") {
      next();
      Term out;
      out.kind = t.text == "true" ? Term::True : Term::False;
      out.pos = pos;
      return out;
    }
    if (t.text == "exists" || t.text == "forall") {
      if (!formula_) fail("quantifiers are only allowed in formulas");
      bool ex = t.text == "exists";
      next();
      Term out;
      out.kind = ex ? Term::Exists : Term::Forall;
      out.pos = pos;
      out.vars.push_back(binder());
      while (is_punct(",")) {
        next();
        out.vars.push_back(binder());
      }
      expect(".");
      out.kids.push_back(implication());
      return out;
    }
    if (t.text == "store") {
      if (!formula_) fail("store is only allowed in formulas");
      next();
      expect("(");
      std::string array = ident("array name");
      std::vector<ExprPtr> rest;
      while (is_punct(",")) {
        next();
        rest.push_back(to_expr(implication()));
      }
      expect(")");
      if (rest.size() < 2) throw ParseError("store needs an index and a value", pos);
      ExprPtr value = rest.back();
      rest.pop_back();
      auto e = Expr::store(array, std::move(rest), value);
      auto copy = std::make_shared<Expr>(*e);
      copy->pos = pos;
      return leaf(copy);
    }
    std::string name = ident("expression");
    if (is_punct("(")) {
      if (!formula_) throw ParseError("procedure calls are not allowed inside expressions", pos);
      next();
      auto args = expr_list(")");
      expect(")");
      return leaf(Expr::apply(name, std::move(args), pos));
    }
    if (is_punct("[")) {
      next();
      auto idx = expr_list("]");
      if (idx.empty()) fail("expected index");
      expect("]");
      return leaf(Expr::select(name, std::move(idx), pos));
    }
    return leaf(Expr::var(name, pos));
  }

  BoundVar binder() {
    BoundVar v;
    v.name = ident("bound variable");
    if (is_punct(":")) {
      next();
      switch (var_type()) {
        case VarKind::Scalar: v.sort = Sort::Int; break;
        case VarKind::Array1: v.sort = Sort::Array1; break;
        case VarKind::Array2: v.sort = Sort::Array2; break;
      }
    }
    return v;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool formula_ = false;
};

}  // namespace

Library parse_library(std::string_view source) { return Parser(source).library(); }

FormulaPtr parse_formula(std::string_view source) {
  return Parser(source).standalone_formula();
}

ExprPtr parse_expr(std::string_view source) { return Parser(source).standalone_expr(); }

}  // namespace opcheck
