#include <sstream>

#include "opcheck/frontend.hpp"

namespace opcheck {

namespace {

void print_block_body(std::ostringstream& os, const StmtPtr& block, int indent);

void emit(std::ostringstream& os, const StmtPtr& s, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  switch (s->kind) {
    case StmtKind::Assign:
      os << pad << s->target << " := " << to_string(s->value) << ";\n";
      return;
    case StmtKind::ArrayAssign: {
      os << pad << s->target << '[';
      for (std::size_t i = 0; i < s->indices.size(); ++i)
        os << (i ? ", " : "") << to_string(s->indices[i]);
      os << "] := " << to_string(s->value) << ";\n";
      return;
    }
    case StmtKind::Call: {
      os << pad << s->target << " := " << s->callee << '(';
      for (std::size_t i = 0; i < s->args.size(); ++i)
        os << (i ? ", " : "") << to_string(s->args[i]);
      os << ");\n";
      return;
    }
    case StmtKind::Block:
      for (const auto& c : s->body) emit(os, c, indent);
      return;
    case StmtKind::If: {
      os << pad << "if (" << to_string(s->value) << ") {\n";
      print_block_body(os, s->body[0], indent + 1);
      StmtPtr els = s->body[1];
      // Chains of `else if` print flat.
      while (els && els->kind == StmtKind::Block && els->body.size() == 1 &&
             els->body[0]->kind == StmtKind::If) {
        const auto& inner = els->body[0];
        os << pad << "} else if (" << to_string(inner->value) << ") {\n";
        print_block_body(os, inner->body[0], indent + 1);
        els = inner->body[1];
      }
      bool empty = !els || (els->kind == StmtKind::Block && els->body.empty());
      if (!empty) {
        os << pad << "} else {\n";
        print_block_body(os, els, indent + 1);
      }
      os << pad << "}\n";
      return;
    }
    case StmtKind::Return:
      os << pad << "return " << s->target << ";\n";
      return;
    case StmtKind::Skip:
      os << pad << "skip;\n";
      return;
    case StmtKind::Havoc:
      os << pad << "havoc(" << s->target << ");\n";
      return;
    case StmtKind::Assume:
      os << pad << "assume " << to_string(s->formula) << ";\n";
      return;
    case StmtKind::Assert:
      os << pad << "assert " << to_string(s->formula) << ";\n";
      return;
  }
}

void print_block_body(std::ostringstream& os, const StmtPtr& block, int indent) {
  if (!block) return;
  if (block->kind == StmtKind::Block) {
    for (const auto& c : block->body) emit(os, c, indent);
  } else {
    emit(os, block, indent);
  }
}

std::string type_name(VarKind k) {
  switch (k) {
    case VarKind::Scalar: return "int";
    case VarKind::Array1: return "[int] int";
    case VarKind::Array2: return "[int, int] int";
  }
  return "int";
}

}  // namespace

std::string print_stmt(const StmtPtr& s, int indent) {
  std::ostringstream os;
  emit(os, s, indent);
  return os.str();
}

std::string pretty_print(const Library& lib) {
  std::ostringstream os;
  for (const auto& g : lib.globals)
    os << "var " << g.name << ": " << type_name(g.kind) << " := " << g.init << ";\n";
  for (std::size_t i = 0; i < lib.procedures.size(); ++i) {
    const auto& p = lib.procedures[i];
    if (i || !lib.globals.empty()) os << '\n';
    os << "proc " << p.name << '(';
    for (std::size_t k = 0; k < p.params.size(); ++k) os << (k ? ", " : "") << p.params[k];
    os << ")\n";
    if (p.invariant) os << "  invariant " << to_string(p.invariant) << ";\n";
    os << "{\n";
    print_block_body(os, p.body, 1);
    os << "}\n";
  }
  return os.str();
}

}  // namespace opcheck
