#include "opcheck/invgen.hpp"

#include "opcheck/transform.hpp"

namespace opcheck {

const char* to_string(Tri t) {
  switch (t) {
    case Tri::Yes: return "yes";
    case Tri::No: return "no";
    case Tri::Unknown: return "unknown";
  }
  return "?";
}

FormulaPtr next_candidate(const Library& lib, const PostVcResult& pv) {
  std::vector<FormulaPtr> sites;
  for (const auto& ob : pv.obligations) {
    std::vector<BoundVar> locals;
    for (const auto& v : free_vars(ob.pre))
      if (!lib.is_global(v)) locals.push_back({v, sort_of_name(lib, v)});
    sites.push_back(Formula::exists(locals, ob.pre));
  }
  return simplify(Formula::disj(sites));
}

ValidityResult implies_valid(const Library& lib, const FormulaPtr& a, const FormulaPtr& b,
                             QueryRunner& runner, const std::string& label) {
  FormulaPtr negated = Formula::conj({a, Formula::negate(b)});
  Prenex sk = skolemize(negated, all_names(negated));
  SymbolTable table = SymbolTable::for_library(lib);
  SmtQuery q = make_query(label, {sk.body}, table);
  for (const auto& c : sk.vars)
    if (q.constants.count(c.name)) q.constants[c.name] = c.sort;
  SolverResult r = runner.run(q);
  ValidityResult out;
  switch (r.answer) {
    case Answer::Unsat:
      out.answer = Tri::Yes;
      break;
    case Answer::Sat:
      out.answer = Tri::No;
      out.countermodel = r.model;
      break;
    default:
      out.answer = Tri::Unknown;
      out.reason = r.answer == Answer::Timeout ? "timeout" : "solver-unknown";
      break;
  }
  return out;
}

ValidityResult equiv(const Library& lib, const FormulaPtr& a, const FormulaPtr& b,
                     QueryRunner& runner, const std::string& label) {
  ValidityResult ab = implies_valid(lib, a, b, runner, label + " forward");
  if (ab.answer == Tri::No) return ab;
  ValidityResult ba = implies_valid(lib, b, a, runner, label + " backward");
  if (ba.answer == Tri::No) return ba;
  if (ab.answer == Tri::Unknown) return ab;
  return ba;
}

namespace {

// Replaces closed quantified subformulas by true or false when the solver
// can decide them.
FormulaPtr decide_closed(const Library& lib, const FormulaPtr& f, QueryRunner& runner,
                         const std::string& label) {
  if (is_quantifier(*f)) {
    if (!free_vars(f).empty()) return f;
    if (implies_valid(lib, Formula::top(), f, runner, label).answer == Tri::Yes)
      return Formula::top();
    if (implies_valid(lib, f, Formula::bottom(), runner, label).answer == Tri::Yes)
      return Formula::bottom();
    return f;
  }
  switch (f->kind) {
    case FormulaKind::Not:
      return Formula::negate(decide_closed(lib, f->kids[0], runner, label));
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies: {
      std::vector<FormulaPtr> kids;
      for (const auto& k : f->kids) kids.push_back(decide_closed(lib, k, runner, label));
      if (f->kind == FormulaKind::And) return Formula::conj(kids);
      if (f->kind == FormulaKind::Or) return Formula::disj(kids);
      return Formula::implies(kids[0], kids[1]);
    }
    default:
      return f;
  }
}

}  // namespace

FormulaPtr simplify_with_solver(const Library& lib, const FormulaPtr& f, QueryRunner& runner,
                                const std::string& label) {
  FormulaPtr s = simplify(decide_closed(lib, simplify(f), runner, label));
  std::vector<FormulaPtr> ds = disjuncts(s);
  // Conjuncts implied by their siblings.
  for (auto& d : ds) {
    std::vector<FormulaPtr> cs = conjuncts(d);
    for (std::size_t i = 0; i < cs.size() && cs.size() > 1;) {
      std::vector<FormulaPtr> rest;
      for (std::size_t j = 0; j < cs.size(); ++j)
        if (j != i) rest.push_back(cs[j]);
      if (implies_valid(lib, Formula::conj(rest), cs[i], runner, label).answer == Tri::Yes)
        cs.erase(cs.begin() + static_cast<long>(i));
      else
        ++i;
    }
    d = simplify(Formula::conj(cs));
  }
  s = simplify(Formula::disj(ds));
  ds = disjuncts(s);
  if (ds.size() < 2) return s;
  for (std::size_t i = 0; i < ds.size() && ds.size() > 1;) {
    std::vector<FormulaPtr> rest;
    for (std::size_t j = 0; j < ds.size(); ++j)
      if (j != i) rest.push_back(ds[j]);
    ValidityResult v = implies_valid(lib, ds[i], Formula::disj(rest), runner, label);
    if (v.answer == Tri::Yes)
      ds.erase(ds.begin() + static_cast<long>(i));
    else
      ++i;
  }
  return simplify(Formula::disj(ds));
}

InvGenResult generate_invariant(const Library& lib, const Procedure& p, int max_iters,
                                QueryRunner& runner) {
  InvGenResult out;
  FormulaPtr cur = simplify(init_formula(lib));
  out.history.push_back(cur);
  for (int k = 0; k < max_iters; ++k) {
    PostVcResult pv = postvc(lib, p, cur);
    FormulaPtr nx = next_candidate(lib, pv);
    std::string tag = p.name + " I" + std::to_string(k + 1);
    FormulaPtr cand = simplify_with_solver(lib, Formula::disj({cur, nx}), runner, tag + " subsume");
    out.history.push_back(cand);
    ValidityResult eq = equiv(lib, cur, cand, runner, tag + " fixpoint");
    if (eq.answer == Tri::Yes) {
      out.converged = true;
      out.iterations = k;
      out.invariant = cur;
      return out;
    }
    if (eq.answer == Tri::Unknown) {
      out.invariant = cand;
      out.iterations = k + 1;
      out.reason = "equivalence test inconclusive (" + eq.reason + ")";
      return out;
    }
    cur = cand;
  }
  out.invariant = cur;
  out.iterations = max_iters;
  out.reason = "no fixpoint within " + std::to_string(max_iters) + " iterations";
  return out;
}

}  // namespace opcheck
