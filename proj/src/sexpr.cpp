#include "opcheck/sexpr.hpp"

#include <cctype>

namespace opcheck {

std::string SExpr::str() const {
  if (is_atom) return atom;
  std::string out = "(";
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) out += ' ';
    out += list[i].str();
  }
  return out + ")";
}

namespace {

class Reader {
 public:
  explicit Reader(std::string_view s) : s_(s) {}

  std::vector<SExpr> all() {
    std::vector<SExpr> out;
    skip();
    while (i_ < s_.size()) {
      out.push_back(one());
      skip();
    }
    return out;
  }

 private:
  void skip() {
    while (i_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[i_]))) {
        ++i_;
      } else if (s_[i_] == ';') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else {
        break;
      }
    }
  }

  SExpr one() {
    skip();
    if (i_ >= s_.size()) throw SExprError("unexpected end of solver output");
    char c = s_[i_];
    if (c == '(') {
      ++i_;
      SExpr e;
      e.is_atom = false;
      skip();
      while (i_ < s_.size() && s_[i_] != ')') {
        e.list.push_back(one());
        skip();
      }
      if (i_ >= s_.size()) throw SExprError("unbalanced parenthesis in solver output");
      ++i_;
      return e;
    }
    if (c == ')') throw SExprError("unexpected ')' in solver output");
    SExpr e;
    if (c == '"') {
      std::size_t start = i_++;
      while (i_ < s_.size()) {
        if (s_[i_] == '"') {
          if (i_ + 1 < s_.size() && s_[i_ + 1] == '"') {
            i_ += 2;
            continue;
          }
          break;
        }
        ++i_;
      }
      if (i_ >= s_.size()) throw SExprError("unterminated string in solver output");
      ++i_;
      e.atom = std::string(s_.substr(start, i_ - start));
      return e;
    }
    if (c == '|') {
      std::size_t start = ++i_;
      while (i_ < s_.size() && s_[i_] != '|') ++i_;
      if (i_ >= s_.size()) throw SExprError("unterminated quoted symbol in solver output");
      e.atom = std::string(s_.substr(start, i_ - start));
      ++i_;
      return e;
    }
    std::size_t start = i_;
    while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) &&
           s_[i_] != '(' && s_[i_] != ')')
      ++i_;
    e.atom = std::string(s_.substr(start, i_ - start));
    return e;
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

}  // namespace

std::vector<SExpr> parse_sexprs(std::string_view text) { return Reader(text).all(); }

}  // namespace opcheck
