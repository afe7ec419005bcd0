#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include "opcheck/frontend.hpp"
#include "opcheck/invgen.hpp"
#include "opcheck/report.hpp"
#include "opcheck/vcgen.hpp"
#include "support.hpp"

using namespace opcheck;
using namespace opcheck::testing;

namespace {

FormulaPtr F(const std::string& s) { return parse_formula(s); }

StmtPtr S(const std::string& stmt) {
  Library lib = parse_library("proc f(n) { " + stmt + " return n; }");
  return lib.procedures[0].body->body[0];
}

std::string render(const Library& lib, const Procedure& p) {
  PostVcResult pv = postvc(lib, p, effective_invariant(p));
  std::string out = "# " + p.name + "\n## tb\n" + print_stmt(pv.tb.body) + "## init\n" +
                    to_string(pv.init) + "\n";
  for (std::size_t i = 0; i < pv.paths.size(); ++i) {
    out += "## path " + std::to_string(i + 1) + " [";
    for (std::size_t d = 0; d < pv.paths[i].decisions.size(); ++d)
      out += std::string(d ? " " : "") + (pv.paths[i].decisions[d] ? "then" : "else");
    out += "]\n" + to_string(pv.paths[i].formula) + "\n";
  }
  for (const auto& o : pv.obligations)
    out += "## pre at site " + std::to_string(o.site) + "\n" + to_string(o.pre) + "\n";
  out += "## post\n" + to_string(pv.post) + "\n## vc\n" + to_string(pv.vc) + "\n";
  return out;
}

void expect_golden(const std::string& name, const std::string& actual) {
  std::string path = source_dir() + "/tests/golden/" + name;
  if (std::getenv("OPCHECK_UPDATE_GOLDEN")) {
    std::ofstream(path) << actual;
    return;
  }
  EXPECT_EQ(read_file(path), actual) << "golden " << name
                                     << " differs (OPCHECK_UPDATE_GOLDEN=1 rewrites it)";
}

std::string render_file(const std::string& file) {
  Library lib = load_corpus_file(file);
  std::string out;
  for (const auto& p : lib.procedures) out += render(lib, p);
  return out;
}

}  // namespace

TEST(Post, AssignmentRule) {
  Library lib;
  PostCalculus pc(lib, NameSupply({"g", "result", "x"}));
  EXPECT_EQ(to_string(pc.post(F("g == -1"), S("result := 1;"))), "g == -1 && result == 1");
  EXPECT_EQ(to_string(pc.post(F("x > 0"), S("x := 5;"))), "(exists x$1. x$1 > 0) && x == 5");
}

TEST(Post, AssumeAssertHavoc) {
  Library lib;
  PostCalculus pc(lib, NameSupply({"x", "y"}));
  EXPECT_EQ(to_string(pc.post(Formula::top(), Stmt::assume(F("x < y")))), "x < y");
  EXPECT_EQ(to_string(pc.post(F("x > 0"), Stmt::assert_(F("x > 1"), 0))), "x > 0");
  EXPECT_EQ(to_string(pc.post(F("x > 0 && y == 2"), Stmt::havoc("x"))),
            "exists x$1. x$1 > 0 && y == 2");
  ASSERT_EQ(pc.obligations().size(), 1u);
  EXPECT_EQ(to_string(pc.obligations()[0].formula), "x > 0 ==> x > 1");
}

TEST(Post, ConditionalIsDisjunction) {
  Library lib;
  PostCalculus pc(lib, NameSupply({"n", "r"}));
  FormulaPtr f = pc.post(Formula::top(), S("if (n < 0) { r := 0; } else { r := n; }"));
  EXPECT_EQ(to_string(f), "n < 0 && r == 0 || !(n < 0) && r == n");
}

TEST(Post, ArrayCellIsStore) {
  Library lib = load_corpus_file("factarray.op");
  PostCalculus pc(lib, NameSupply({"g", "n", "k"}));
  Library tmp = parse_library("var g: [int] int := 0; proc f(n) { g[n] := 3; return n; }");
  FormulaPtr f = pc.post(F("g[1] == 0"), tmp.procedures[0].body->body[0]);
  EXPECT_EQ(free_vars(f), std::set<std::string>({"g", "n"})) << to_string(f);
  // the store keeps the old contents: g[1] is still 0 unless n == 1
  QueryRunner runner(test_solver());
  EXPECT_EQ(implies_valid(lib, Formula::conj({f, F("n != 1")}), F("g[1] == 0 && g[n] == 3"),
                          runner, "store")
                .answer,
            Tri::Yes);
}

TEST(Vc, Rules) {
  Library lib;
  EXPECT_EQ(to_string(vc(lib, F("x > 0"), Stmt::assert_(F("x > 1"), 0), NameSupply({"x"}))),
            "x > 0 ==> x > 1");
  EXPECT_EQ(vc(lib, F("x > 0"), S("x := 1;"), NameSupply({"x"}))->kind, FormulaKind::True);
}

TEST(PostVc, FactCacheShapes) {
  Library lib = load_corpus_file("factcache.op");
  const Procedure& p = lib.procedures[0];
  PostVcResult pv = postvc(lib, p, p.invariant);
  ASSERT_EQ(pv.paths.size(), 3u);
  EXPECT_EQ(to_string(pv.paths[0].formula),
            "(g == -1 || g == lastN * factCache(lastN - 1)) && n <= 1 && result == 1");
  EXPECT_EQ(to_string(pv.paths[1].formula),
            "(g == -1 || g == lastN * factCache(lastN - 1)) && !(n <= 1) && g != -1 && "
            "n == lastN && result == g");
  ASSERT_EQ(pv.obligations.size(), 2u);
  EXPECT_EQ(to_string(pv.obligations[0].pre),
            "(g == -1 || g == lastN * factCache(lastN - 1)) && !(n <= 1) && "
            "!(g != -1 && n == lastN) && t1 == n - 1");
  EXPECT_EQ(conjuncts(pv.vc).size(), 3u);
  EXPECT_EQ(to_string(conjuncts(pv.vc)[2]),
            "g == -1 && lastN == 0 ==> g == -1 || g == lastN * factCache(lastN - 1)");
}

TEST(PostVc, IdentityIsTrivial) {
  Library lib = load_corpus_file("identity.op");
  PostVcResult pv = postvc(lib, lib.procedures[0], Formula::top());
  EXPECT_EQ(to_string(pv.post), "r == n");
  EXPECT_EQ(simplify(pv.vc)->kind, FormulaKind::True);
}

TEST(PostVc, FactRecentShape) {
  Library lib = load_corpus_file("factrecent.op");
  const Procedure& p = lib.procedures[0];
  PostVcResult pv = postvc(lib, p, p.invariant);
  EXPECT_EQ(pv.paths.size(), 3u);
  EXPECT_EQ(pv.obligations.size(), 2u);
  EXPECT_EQ(pv.tb.call_sites, 1);
}

TEST(Golden, FactCache) { expect_golden("factcache.vc", render_file("factcache.op")); }
TEST(Golden, FactRecent) { expect_golden("factrecent.vc", render_file("factrecent.op")); }
TEST(Golden, Identity) { expect_golden("identity.vc", render_file("identity.op")); }

TEST(PathCount, CorpusLaw) {
  for (const auto& e : load_corpus(corpus_dir())) {
    Library lib = parse_library(e.source);
    for (const auto& p : lib.procedures) {
      PostVcResult pv = postvc(lib, p, effective_invariant(p));
      EXPECT_EQ(pv.paths.size(), count_paths(pv.tb.body)) << p.name;
      EXPECT_EQ(pv.paths.size(), count_paths(p.body)) << p.name;
      std::set<std::vector<bool>> seen;
      for (const auto& path : pv.paths) EXPECT_TRUE(seen.insert(path.decisions).second) << p.name;
      EXPECT_EQ(pv.obligations.size(), static_cast<std::size_t>(pv.tb.assert_sites)) << p.name;
      EXPECT_EQ(conjuncts(pv.vc).size(), pv.obligations.size() + 1) << p.name;
    }
  }
}

TEST(Monotonicity, StrongerPreGivesStrongerPost) {
  QueryRunner runner(test_solver());
  for (const char* file : {"factcache.op", "factrecent.op", "factsingle.op", "counter.op"}) {
    Library lib = load_corpus_file(file);
    const Procedure& p = lib.procedures[0];
    FormulaPtr inv = effective_invariant(p);
    TransformedBody tb = transform_body(lib, p, inv);
    NameSupply names(reserved_names(lib, p, inv));
    FormulaPtr strong = Formula::conj({init_formula(lib), inv});
    FormulaPtr post_strong = PostCalculus(lib, names).post(strong, tb.body);
    FormulaPtr post_weak = PostCalculus(lib, names).post(inv, tb.body);
    EXPECT_EQ(implies_valid(lib, post_strong, post_weak, runner, "monotone").answer, Tri::Yes)
        << file;
  }
}

TEST(PostSoundness, CorpusOnReachableStates) {
  std::uint64_t seed = 7;
  for (const auto& e : load_corpus(corpus_dir())) {
    Library lib = parse_library(e.source);
    for (const auto& p : lib.procedures) {
      PostSoundness r = check_post_soundness(lib, p.name, 40, seed++);
      EXPECT_EQ(r.passed, r.conclusive) << p.name << ": " << (r.failures.empty() ? "" : r.failures[0]);
      EXPECT_EQ(r.rejected, r.negatives) << p.name;
    }
  }
}

TEST(PostSoundness, FactCacheIsMostlyConclusive) {
  Library lib = load_corpus_file("factcache.op");
  PostSoundness r = check_post_soundness(lib, "factCache", 100, 3);
  EXPECT_GE(r.conclusive, 50);
  EXPECT_GE(r.negatives, 50);
}
