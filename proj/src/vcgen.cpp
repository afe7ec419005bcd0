#include "opcheck/vcgen.hpp"

#include <stdexcept>

namespace opcheck {

namespace {

FormulaPtr rename_one(const FormulaPtr& f, const std::string& from, const std::string& to) {
  return rename_vars(f, [&](const std::string& n) { return n == from ? to : n; });
}

ExprPtr rename_one(const ExprPtr& e, const std::string& from, const std::string& to) {
  return rename_vars(e, [&](const std::string& n) { return n == from ? to : n; });
}

FormulaPtr or_of(const std::vector<PathPost>& paths) {
  std::vector<FormulaPtr> fs;
  for (const auto& p : paths) fs.push_back(p.formula);
  return Formula::disj(std::move(fs));
}

}  // namespace

std::vector<PathPost> PostCalculus::assign(const std::vector<PathPost>& pre, const StmtPtr& s) {
  const std::string& x = s->target;
  std::string old;
  std::vector<PathPost> out;
  for (const auto& p : pre) {
    FormulaPtr base = p.formula;
    if (free_vars(base).count(x)) {
      if (old.empty()) old = names_.fresh(x);
      base = Formula::exists({{old, sort_of_name(lib_, x)}}, rename_one(base, x, old));
    }
    FormulaPtr f = Formula::conj({base, Formula::eq(Expr::var(x), s->value)});
    out.push_back({simplify_light(f), p.decisions});
  }
  return out;
}

std::vector<PathPost> PostCalculus::array_assign(const std::vector<PathPost>& pre,
                                                 const StmtPtr& s) {
  const std::string& a = s->target;
  std::string old = names_.fresh(a);
  Sort sort = sort_of_name(lib_, a);
  std::vector<ExprPtr> idx;
  for (const auto& i : s->indices) idx.push_back(rename_one(i, a, old));
  ExprPtr updated = Expr::store(old, idx, rename_one(s->value, a, old));
  std::vector<PathPost> out;
  for (const auto& p : pre) {
    FormulaPtr body =
        Formula::conj({rename_one(p.formula, a, old),
                       Formula::make_atom(Expr::binary(BinOp::Eq, Expr::var(a), updated))});
    out.push_back({simplify_light(Formula::exists({{old, sort}}, body)), p.decisions});
  }
  return out;
}

std::vector<PathPost> PostCalculus::havoc(const std::vector<PathPost>& pre,
                                          const std::string& x) {
  std::string old;
  std::vector<PathPost> out;
  for (const auto& p : pre) {
    FormulaPtr f = p.formula;
    if (free_vars(f).count(x)) {
      if (old.empty()) old = names_.fresh(x);
      f = Formula::exists({{old, sort_of_name(lib_, x)}}, rename_one(f, x, old));
    }
    out.push_back({simplify_light(f), p.decisions});
  }
  return out;
}

std::vector<PathPost> PostCalculus::post(const std::vector<PathPost>& pre, const StmtPtr& s) {
  switch (s->kind) {
    case StmtKind::Assign:
      return assign(pre, s);
    case StmtKind::ArrayAssign:
      return array_assign(pre, s);
    case StmtKind::Havoc:
      return havoc(pre, s->target);
    case StmtKind::Assume: {
      std::vector<PathPost> out;
      for (const auto& p : pre)
        out.push_back({simplify_light(Formula::conj({p.formula, s->formula})), p.decisions});
      return out;
    }
    case StmtKind::Assert: {
      FormulaPtr before = or_of(pre);
      obligations_.push_back(
          {s->site, before, s->formula, Formula::implies(before, s->formula)});
      return pre;
    }
    case StmtKind::Skip:
      return pre;
    case StmtKind::Block: {
      std::vector<PathPost> cur = pre;
      for (const auto& c : s->body) cur = post(cur, c);
      return cur;
    }
    case StmtKind::If: {
      FormulaPtr cond = from_condition(s->value);
      std::vector<PathPost> then_pre, else_pre;
      for (const auto& p : pre) {
        auto d = p.decisions;
        d.push_back(true);
        then_pre.push_back({simplify_light(Formula::conj({p.formula, cond})), d});
        d.back() = false;
        else_pre.push_back(
            {simplify_light(Formula::conj({p.formula, Formula::negate(cond)})), d});
      }
      auto out = post(then_pre, s->body[0]);
      auto rest = post(else_pre, s->body[1]);
      out.insert(out.end(), rest.begin(), rest.end());
      return out;
    }
    case StmtKind::Call:
      throw std::logic_error("call statement in a transformed body");
    case StmtKind::Return:
      throw std::logic_error("return statement in a transformed body");
  }
  return pre;
}

FormulaPtr PostCalculus::post(const FormulaPtr& pre, const StmtPtr& s) {
  return or_of(post(std::vector<PathPost>{{pre, {}}}, s));
}

FormulaPtr vc(const Library& lib, const FormulaPtr& pre, const StmtPtr& s, NameSupply names) {
  PostCalculus calc(lib, std::move(names));
  calc.post(pre, s);
  std::vector<FormulaPtr> parts;
  for (const auto& o : calc.obligations()) parts.push_back(o.formula);
  return Formula::conj(std::move(parts));
}

PostVcResult postvc(const Library& lib, const Procedure& p, const FormulaPtr& inv_in) {
  FormulaPtr inv = inv_in ? inv_in : Formula::top();
  PostVcResult r;
  r.tb = transform_body(lib, p, inv);
  r.init = init_formula(lib);

  NameSupply names(reserved_names(lib, p, inv));
  names.reserve(names_in(r.tb.body));
  names.reserve(all_names(r.init));
  PostCalculus calc(lib, std::move(names));
  r.paths = calc.post(std::vector<PathPost>{{inv, {}}}, r.tb.body);
  r.post = or_of(r.paths);
  r.obligations = calc.obligations();

  std::vector<FormulaPtr> parts;
  for (const auto& o : r.obligations) parts.push_back(o.formula);
  parts.push_back(Formula::implies(r.init, inv));
  r.vc = Formula::conj(std::move(parts));
  return r;
}

std::size_t count_paths(const StmtPtr& s) {
  switch (s->kind) {
    case StmtKind::Block: {
      std::size_t n = 1;
      for (const auto& c : s->body) n *= count_paths(c);
      return n;
    }
    case StmtKind::If:
      return count_paths(s->body[0]) + count_paths(s->body[1]);
    default:
      return 1;
  }
}

}  // namespace opcheck
