#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <random>

#include "opcheck/arith.hpp"
#include "opcheck/frontend.hpp"
#include "opcheck/sexpr.hpp"
#include "opcheck/smtlib.hpp"
#include "support.hpp"

using namespace opcheck;
using namespace opcheck::testing;

namespace {

FormulaPtr F(const std::string& s) { return parse_formula(s); }

SymbolTable scalars() {
  SymbolTable t;
  t.strict = false;
  return t;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

Model model_of(const std::string& text) { return parse_model(parse_sexprs(text).at(0)); }

}  // namespace

TEST(Emit, FactCacheInvariant) {
  Library lib = load_corpus_file("factcache.op");
  SmtQuery q = make_query("inv", {lib.procedures[0].invariant}, SymbolTable::for_library(lib));
  std::string text = q.text();
  EXPECT_TRUE(contains(text, "(declare-fun factCache (Int) Int)")) << text;
  EXPECT_TRUE(contains(text, "(declare-fun g () Int)")) << text;
  EXPECT_TRUE(contains(text, "(declare-fun lastN () Int)")) << text;
  EXPECT_TRUE(contains(text, "(assert (or (= g (- 1)) (= g (* lastN (factCache (- lastN 1))))))"))
      << text;
  EXPECT_TRUE(contains(text, "(set-logic ALL)"));
  EXPECT_TRUE(contains(text, "(check-sat)\n(get-model)\n"));
}

TEST(Emit, False) {
  EXPECT_TRUE(contains(make_query("f", {Formula::bottom()}, scalars()).text(), "(assert false)"));
}

TEST(Emit, QuantifiedSelect) {
  Library lib = load_corpus_file("factarray.op");
  std::string text =
      make_query("inv", {lib.procedures[0].invariant}, SymbolTable::for_library(lib)).text();
  EXPECT_TRUE(contains(text, "(declare-fun g () (Array Int Int))")) << text;
  EXPECT_TRUE(contains(text, "(forall ((k Int)) (or (= (select g k) 0)")) << text;
  Library mcm = load_corpus_file("mcm.op");
  std::string m =
      make_query("inv", {mcm.procedures[0].invariant}, SymbolTable::for_library(mcm)).text();
  EXPECT_TRUE(contains(m, "(declare-fun m () (Array Int (Array Int Int)))")) << m;
  EXPECT_TRUE(contains(m, "(select (select m i) j)")) << m;
}

TEST(Emit, ByteStable) {
  for (const auto& file : {"factcache.op", "mcm.op", "fib.op"}) {
    Library a = load_corpus_file(file), b = load_corpus_file(file);
    for (std::size_t i = 0; i < a.procedures.size(); ++i) {
      FormulaPtr fa = postvc(a, a.procedures[i], effective_invariant(a.procedures[i])).vc;
      FormulaPtr fb = postvc(b, b.procedures[i], effective_invariant(b.procedures[i])).vc;
      EXPECT_EQ(make_query("vc", {fa}, SymbolTable::for_library(a)).text(),
                make_query("vc", {fb}, SymbolTable::for_library(b)).text());
    }
  }
}

TEST(Emit, UndeclaredSymbol) {
  Library lib = load_corpus_file("factcache.op");
  EXPECT_THROW(make_query("bad", {F("g == other(1)")}, SymbolTable::for_library(lib)), SmtError);
  EXPECT_NO_THROW(make_query("ok", {F("g == other(1)")}, scalars()));
}

TEST(Emit, DeclaresEachSymbolOnce) {
  std::string text = make_query("x", {F("x == 1"), F("x == h(x) && h(2) == y")}, scalars()).text();
  auto occurrences = [&](const std::string& s) {
    std::size_t n = 0;
    for (auto p = text.find(s); p != std::string::npos; p = text.find(s, p + 1)) ++n;
    return n;
  };
  EXPECT_EQ(occurrences("(declare-fun x "), 1u);
  EXPECT_EQ(occurrences("(declare-fun h "), 1u);
  EXPECT_EQ(occurrences("(declare-fun y "), 1u);
}

TEST(Emit, Symbols) {
  EXPECT_EQ(smt_symbol("g$a"), "g$a");
  EXPECT_EQ(smt_symbol("and"), "|and|");
  EXPECT_EQ(smt_sort(Sort::Array2), "(Array Int (Array Int Int))");
  EXPECT_EQ(smt_int_term(parse_expr("-5")), "(- 5)");
}

TEST(Models, ConstantsFunctionsArrays) {
  Model m = model_of(
      "(model (define-fun x () Int (- 3))"
      " (define-fun f ((x!0 Int)) Int (ite (= x!0 1) 5 (ite (= x!0 2) 6 0)))"
      " (define-fun h ((x!0 Int) (x!1 Int)) Int (ite (and (= x!0 1) (= x!1 2)) 9 4))"
      " (define-fun a () (Array Int Int) (store ((as const (Array Int Int)) 0) 1 7))"
      " (define-fun b () (Array Int Int) (_ as-array k!0))"
      " (define-fun k!0 ((x!0 Int)) Int (ite (= x!0 3) 8 1))"
      " (define-fun big () Int 123456789012345678901234567890)"
      " (define-fun q ((x!0 Int)) Int (+ x!0 1)))");
  EXPECT_EQ(m.at("x")->value, -3);
  EXPECT_EQ(m.at("x")->text, "-3");
  EXPECT_EQ(m.at("f")->at({1}), 5);
  EXPECT_EQ(m.at("f")->at({2}), 6);
  EXPECT_EQ(m.at("f")->at({40}), 0);
  EXPECT_EQ(m.at("h")->at({1, 2}), 9);
  EXPECT_EQ(m.at("h")->at({2, 1}), 4);
  EXPECT_EQ(m.at("a")->kind, ModelValue::Kind::Array);
  EXPECT_EQ(m.at("a")->at({1}), 7);
  EXPECT_EQ(m.at("a")->at({0}), 0);
  EXPECT_EQ(m.at("b")->at({3}), 8);
  EXPECT_EQ(m.at("b")->at({4}), 1);
  EXPECT_EQ(m.at("big")->kind, ModelValue::Kind::Int);
  EXPECT_FALSE(m.at("big")->value);
  EXPECT_EQ(m.at("q")->kind, ModelValue::Kind::Opaque);
  EXPECT_EQ(m.at("q")->text, "(+ x!0 1)");
}

TEST(Solver, UnsatAndSat) {
  SolverConfig cfg = test_solver();
  EXPECT_EQ(run_solver(cfg, make_query("f", {Formula::bottom()}, scalars()).text()).answer,
            Answer::Unsat);
  SolverResult r = run_solver(cfg, make_query("x", {F("x == 1")}, scalars()).text());
  ASSERT_EQ(r.answer, Answer::Sat);
  ASSERT_TRUE(r.model.count("x"));
  EXPECT_EQ(r.model.at("x")->value, 1);
  EXPECT_GE(r.time_ms, 0);
  EXPECT_FALSE(solver_identity(cfg).empty());
}

TEST(Solver, EuclideanDivisionAgrees) {
  SolverConfig cfg = test_solver();
  std::vector<FormulaPtr> facts;
  for (Int a : {-7, -1, 0, 5})
    for (Int b : {-3, 0, 2}) {
      ExprPtr ea = Expr::constant(a), eb = Expr::constant(b);
      facts.push_back(Formula::eq(Expr::binary(BinOp::Div, ea, eb), Expr::constant(euclid_div(a, b))));
      facts.push_back(Formula::eq(Expr::binary(BinOp::Mod, ea, eb), Expr::constant(euclid_mod(a, b))));
    }
  EXPECT_EQ(run_solver(cfg, make_query("div", {Formula::negate(Formula::conj(facts))}, scalars())
                                .text())
                .answer,
            Answer::Unsat);
}

TEST(Solver, TimeoutKillsProcess) {
  SolverConfig cfg;
  cfg.command = "sh";
  cfg.args = {"-c", "sleep 5"};
  cfg.timeout_s = 0.5;
  auto start = std::chrono::steady_clock::now();
  SolverResult r = run_solver(cfg, "(check-sat)\n");
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(r.answer, Answer::Timeout);
  EXPECT_LT(secs, 3.0);
}

TEST(Solver, SpawnFailure) {
  SolverConfig cfg;
  cfg.command = "/nonexistent/solver-binary";
  cfg.args = {};
  try {
    run_solver(cfg, "(check-sat)\n");
    FAIL() << "expected a spawn error";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind, SolverError::Kind::Spawn);
  }
}

TEST(Solver, ProtocolError) {
  SolverConfig cfg;
  cfg.command = "sh";
  cfg.args = {"-c", "cat >/dev/null; echo hello"};
  try {
    run_solver(cfg, "(check-sat)\n");
    FAIL() << "expected a protocol error";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind, SolverError::Kind::Protocol);
  }
  cfg.args = {"-c", "cat >/dev/null; echo unknown"};
  EXPECT_EQ(run_solver(cfg, "(check-sat)\n").answer, Answer::Unknown);
}

TEST(Solver, EnvironmentOverride) {
  const char* old = std::getenv("OPCHECK_SOLVER");
  std::string saved = old ? old : "";
  ::setenv("OPCHECK_SOLVER", "mysolver --flag", 1);
  SolverConfig cfg = SolverConfig::from_environment();
  if (old)
    ::setenv("OPCHECK_SOLVER", saved.c_str(), 1);
  else
    ::unsetenv("OPCHECK_SOLVER");
  EXPECT_EQ(cfg.command, "mysolver");
  EXPECT_EQ(cfg.args, std::vector<std::string>{"--flag"});
  EXPECT_EQ(SolverConfig::for_command("/usr/bin/z3", {}).args, std::vector<std::string>{"-in"});
}

// Random quantifier-free formulas: the solver's answer must agree with a
// brute-force search over {-3..3} whenever the search is conclusive, and
// every model must satisfy the formula under the interpreter's semantics.
TEST(Solver, AgreesWithBruteForce) {
  SolverConfig cfg = test_solver();
  std::mt19937_64 rng(2024);
  const std::vector<Int> dom = {-3, -2, -1, 0, 1, 2, 3};
  int sat_found = 0, unsat_agreed = 0, unknown = 0;
  for (int i = 0; i < 100; ++i) {
    FormulaPtr f = random_formula(rng, 3, {"x", "y"}, false);
    bool witnessed = false;
    for (Int x : dom)
      for (Int y : dom)
        if (eval_formula(f, scalar_env({{"x", x}, {"y", y}}, dom)) == Truth::True) witnessed = true;
    SolverResult r = run_solver(cfg, make_query("rand", {f}, scalars()).text());
    if (r.answer == Answer::Unknown || r.answer == Answer::Timeout) {
      ++unknown;
      continue;
    }
    if (witnessed) {
      EXPECT_EQ(r.answer, Answer::Sat) << to_string(f);
      ++sat_found;
    }
    if (r.answer == Answer::Unsat) {
      EXPECT_FALSE(witnessed) << to_string(f);
      ++unsat_agreed;
    }
    if (r.answer == Answer::Sat) {
      std::map<std::string, Int> vals = {{"x", 0}, {"y", 0}};
      for (auto& [k, v] : vals)
        if (r.model.count(k) && r.model.at(k)->value) v = *r.model.at(k)->value;
      Truth t = eval_formula(f, scalar_env(vals, dom));
      EXPECT_NE(t, Truth::False) << to_string(f) << " model x=" << vals["x"] << " y=" << vals["y"];
    }
  }
  EXPECT_GT(sat_found, 20);
  EXPECT_GT(unsat_agreed, 5);
  EXPECT_LT(unknown, 10);
}

TEST(Sexpr, ParsesNestedLists) {
  auto v = parse_sexprs("sat (model (define-fun x () Int 1)) |a b| \"s\"");
  ASSERT_EQ(v.size(), 4u);
  EXPECT_TRUE(v[0].is("sat"));
  EXPECT_EQ(v[1].str(), "(model (define-fun x () Int 1))");
  EXPECT_TRUE(v[2].is("a b"));  // quotes removed
  EXPECT_THROW(parse_sexprs("(unbalanced"), SExprError);
}
