#include <gtest/gtest.h>

#include <algorithm>

#include "opcheck/frontend.hpp"
#include "opcheck/report.hpp"
#include "support.hpp"

using namespace opcheck;
using namespace opcheck::testing;

namespace {

std::vector<std::string> codes(const std::string& src) {
  std::vector<std::string> out;
  for (const auto& d : validate(parse_library(src))) out.push_back(d.code);
  return out;
}

bool has_code(const std::string& src, const std::string& code) {
  auto c = codes(src);
  return std::find(c.begin(), c.end(), code) != c.end();
}

bool no_transform_nodes(const StmtPtr& s) {
  switch (s->kind) {
    case StmtKind::Havoc:
    case StmtKind::Assume:
    case StmtKind::Assert:
      return false;
    case StmtKind::Block:
    case StmtKind::If:
      return std::all_of(s->body.begin(), s->body.end(), no_transform_nodes);
    default:
      return true;
  }
}

}  // namespace

TEST(Parse, FactCacheShape) {
  Library lib = load_corpus_file("factcache.op");
  ASSERT_EQ(lib.globals.size(), 2u);
  EXPECT_EQ(lib.globals[0].name, "g");
  EXPECT_EQ(lib.globals[0].init, -1);
  EXPECT_EQ(lib.globals[1].name, "lastN");
  EXPECT_EQ(lib.globals[1].init, 0);
  ASSERT_EQ(lib.procedures.size(), 1u);
  const Procedure& p = lib.procedures[0];
  EXPECT_EQ(p.name, "factCache");
  EXPECT_EQ(p.params, std::vector<std::string>{"n"});
  EXPECT_EQ(p.return_var(), "result");
  ASSERT_TRUE(p.invariant);
  EXPECT_EQ(to_string(p.invariant), "g == -1 || g == lastN * factCache(lastN - 1)");
  ASSERT_EQ(p.body->kind, StmtKind::Block);
  ASSERT_EQ(p.body->body.size(), 2u);
  EXPECT_EQ(p.body->body[0]->kind, StmtKind::If);
  ASSERT_EQ(p.body->body[0]->body[1]->kind, StmtKind::Block);  // else-if chain
  EXPECT_EQ(p.body->body[0]->body[1]->body[0]->kind, StmtKind::If);
  EXPECT_EQ(p.body->body[1]->kind, StmtKind::Return);
}

TEST(Parse, MinimalIdentity) {
  Library lib = parse_library("id (n) { r := n; return r }");
  EXPECT_TRUE(lib.globals.empty());
  ASSERT_EQ(lib.procedures.size(), 1u);
  const auto& body = lib.procedures[0].body->body;
  ASSERT_EQ(body.size(), 2u);
  EXPECT_EQ(body[0]->kind, StmtKind::Assign);
  EXPECT_EQ(body[1]->kind, StmtKind::Return);
  EXPECT_FALSE(lib.procedures[0].invariant);
  EXPECT_TRUE(validate(lib).empty());
}

TEST(Parse, ArrayGlobals) {
  Library fa = load_corpus_file("factarray.op");
  ASSERT_EQ(fa.globals.size(), 1u);
  EXPECT_EQ(fa.globals[0].kind, VarKind::Array1);
  EXPECT_EQ(fa.globals[0].init, 0);
  Library mcm = load_corpus_file("mcm.op");
  EXPECT_EQ(mcm.find_global("m")->kind, VarKind::Array2);
  EXPECT_EQ(mcm.find_global("m")->init, -1);
  EXPECT_EQ(mcm.find_procedure("chooseSplit")->params.size(), 4u);
}

TEST(Parse, ErrorsCarryPositions) {
  try {
    parse_library("var g: int := ;\nproc p(n) { r := n; return r; }");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.pos().line, 1);
    EXPECT_EQ(e.pos().column, 15);
  }
  try {
    parse_library("proc p(n) {\n  r := n # 1;\n  return r;\n}");
    FAIL() << "expected a lexical error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.pos().line, 2);
  }
  EXPECT_THROW(parse_library("var g: int := 1; var g: int := 2; proc p(n) { return n; }"),
               ParseError);
  EXPECT_THROW(parse_library("proc p(n) { r := n; return r; } proc p(m) { r := m; return r; }"),
               ParseError);
  EXPECT_THROW(parse_library("proc p(n) { r := q(n) + 1; return r; }"), ParseError);
  EXPECT_THROW(parse_library("var g: int := 1 + 2; proc p(n) { return n; }"), ParseError);
}

TEST(Parse, Deterministic) {
  std::string src = read_file(corpus_dir() + "/mcm.op");
  EXPECT_TRUE(equal(parse_library(src), parse_library(src)));
}

TEST(Parse, FormulaSyntax) {
  FormulaPtr f = parse_formula("forall k. g[k] == 0 || exists j. j == k && h(j) > 1");
  EXPECT_EQ(f->kind, FormulaKind::Forall);
  EXPECT_EQ(to_string(parse_formula(to_string(f))), to_string(f));
  EXPECT_EQ(to_string(parse_expr("a - (b - c)")), "a - (b - c)");
  EXPECT_EQ(to_string(parse_expr("a - b - c")), "a - b - c");
  EXPECT_EQ(to_string(parse_expr("-x % 3")), "-x % 3");
}

TEST(Validate, CorpusAccepted) {
  for (const auto& e : load_corpus(corpus_dir())) {
    Library lib = parse_library(e.source);
    EXPECT_TRUE(validate(lib).empty()) << e.file;
    for (const auto& p : lib.procedures) EXPECT_TRUE(no_transform_nodes(p.body)) << p.name;
  }
}

TEST(Validate, Diagnostics) {
  EXPECT_TRUE(has_code("proc p(n) { n := n - 1; return n; }", "assignment-to-formal"));
  EXPECT_TRUE(has_code("var g: int := 0; proc p(n) invariant result == 1; { result := n; return result; }",
                       "invariant-scope"));
  EXPECT_TRUE(has_code("proc p(n) { r := q(n); return r; }", "undeclared-procedure"));
  EXPECT_TRUE(has_code("proc p(n) { r := p(n, n); return r; }", "arity-mismatch"));
  EXPECT_TRUE(has_code("var g: int := 0; proc p(g) { r := g; return r; }", "shadowed-global"));
  EXPECT_TRUE(has_code("proc p(n) { x$1 := n; return x$1; }", "reserved-name"));
  EXPECT_TRUE(has_code("proc p(n, n) { r := n; return r; }", "duplicate-declaration"));
  EXPECT_TRUE(has_code("var a: [int] int := 0; proc p(n) { r := a + 1; return r; }",
                       "kind-mismatch"));
}

TEST(Validate, CompleteList) {
  auto c = codes(
      "proc p(n) { n := 1; r := q(n); return r; }\n"
      "proc s(m) invariant m == 0; { r := p(m, m); return r; }");
  EXPECT_GE(c.size(), 4u);
  for (const char* want :
       {"assignment-to-formal", "undeclared-procedure", "invariant-scope", "arity-mismatch"})
    EXPECT_NE(std::find(c.begin(), c.end(), want), c.end()) << want;
}

TEST(Validate, InvariantScopeHelper) {
  Library lib = load_corpus_file("factcache.op");
  EXPECT_TRUE(check_invariant_scope(lib, parse_formula("g == lastN")).empty());
  EXPECT_FALSE(check_invariant_scope(lib, parse_formula("n == 1")).empty());
  EXPECT_FALSE(check_invariant_scope(lib, parse_formula("g == factCache(1, 2)")).empty());
  EXPECT_FALSE(check_invariant_scope(lib, parse_formula("g == other(1)")).empty());
  EXPECT_TRUE(check_invariant_scope(lib, parse_formula("exists k. g == k")).empty());
}

TEST(PrettyPrint, RoundTripsCorpus) {
  for (const auto& e : load_corpus(corpus_dir())) {
    Library lib = parse_library(e.source);
    std::string text = pretty_print(lib);
    Library again = parse_library(text);
    EXPECT_TRUE(equal(lib, again)) << e.file << "\n" << text;
    EXPECT_EQ(pretty_print(again), text) << e.file;
  }
}

TEST(PrettyPrint, RoundTripsMinimal) {
  Library lib = parse_library("id (n) { r := n; return r }");
  EXPECT_TRUE(equal(lib, parse_library(pretty_print(lib))));
}
