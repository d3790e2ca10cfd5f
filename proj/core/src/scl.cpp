#include "motorway/scl.hpp"

#include <cctype>
#include <sstream>

namespace motorway {

namespace {
SclFormula make(SclNode n) { return std::make_shared<const SclNode>(std::move(n)); }
} // namespace

SclFormula SclNode::prop(int id) {
  SclNode n{SclKind::Prop};
  n.prop = id;
  return make(std::move(n));
}
SclFormula SclNode::disj(SclFormula a, SclFormula b) {
  SclNode n{SclKind::Or};
  n.child_a = std::move(a);
  n.child_b = std::move(b);
  return make(std::move(n));
}
SclFormula SclNode::negate(SclFormula a) {
  SclNode n{SclKind::Not};
  n.child_a = std::move(a);
  return make(std::move(n));
}
SclFormula SclNode::conj(SclFormula a, SclFormula b) {
  return negate(disj(negate(std::move(a)), negate(std::move(b))));
}
SclFormula SclNode::implies(SclFormula a, SclFormula b) {
  return disj(negate(std::move(a)), std::move(b));
}
SclFormula SclNode::until(SclFormula a, SclFormula b) {
  SclNode n{SclKind::Until};
  n.child_a = std::move(a);
  n.child_b = std::move(b);
  return make(std::move(n));
}
SclFormula SclNode::since(SclFormula a, SclFormula b) {
  SclNode n{SclKind::Since};
  n.child_a = std::move(a);
  n.child_b = std::move(b);
  return make(std::move(n));
}
SclFormula SclNode::next(CmpOp op, int c, SclFormula a) {
  SclNode n{SclKind::Next};
  n.op = op;
  n.c = c;
  n.child_a = std::move(a);
  return make(std::move(n));
}
SclFormula SclNode::last(CmpOp op, int c, SclFormula a) {
  SclNode n{SclKind::Last};
  n.op = op;
  n.c = c;
  n.child_a = std::move(a);
  return make(std::move(n));
}

bool scl_equal(const SclFormula& a, const SclFormula& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->prop != b->prop || a->op != b->op || a->c != b->c) return false;
  if ((a->child_a != nullptr) != (b->child_a != nullptr)) return false;
  if ((a->child_b != nullptr) != (b->child_b != nullptr)) return false;
  if (a->child_a && !scl_equal(a->child_a, b->child_a)) return false;
  if (a->child_b && !scl_equal(a->child_b, b->child_b)) return false;
  return true;
}

namespace {

struct SclParser {
  const std::string& s;
  const PropositionAtlas& atlas;
  size_t i = 0;

  SclParser(const std::string& text, const PropositionAtlas& a) : s(text), atlas(a) {}

  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool accept(char c) {
    skip_ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  bool accept_str(const std::string& w) {
    skip_ws();
    if (s.compare(i, w.size(), w) == 0) {
      i += w.size();
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) throw parse_error(std::string("expected '") + c + "'", i);
  }
  bool peek_keyword(const std::string& w) {
    skip_ws();
    if (s.compare(i, w.size(), w) != 0) return false;
    size_t end = i + w.size();
    return end >= s.size() || !(std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_');
  }

  SclFormula parse() {
    SclFormula f = until_expr();
    skip_ws();
    if (i < s.size()) throw parse_error("trailing input", i);
    return f;
  }

  // lowest precedence, right-associative
  SclFormula until_expr() {
    SclFormula f = impl_expr();
    skip_ws();
    if (peek_keyword("U")) {
      ++i;
      return SclNode::until(f, until_expr());
    }
    if (peek_keyword("S")) {
      ++i;
      return SclNode::since(f, until_expr());
    }
    return f;
  }

  SclFormula impl_expr() {
    SclFormula f = or_expr();
    if (accept_str("->")) return SclNode::implies(f, impl_expr());
    return f;
  }

  SclFormula or_expr() {
    SclFormula f = and_expr();
    while (true) {
      skip_ws();
      if (i < s.size() && s[i] == '|') {
        ++i;
        f = SclNode::disj(f, and_expr());
      } else {
        break;
      }
    }
    return f;
  }

  SclFormula and_expr() {
    SclFormula f = unary();
    while (accept('&')) f = SclNode::conj(f, unary());
    return f;
  }

  SclFormula unary() {
    if (accept('!')) return SclNode::negate(unary());
    if (peek_keyword("next") || peek_keyword("last")) {
      bool is_next = s[i] == 'n';
      i += 4;
      expect('[');
      CmpOp op = cmp_op();
      int c = natural();
      expect(']');
      SclFormula sub = unary();
      return is_next ? SclNode::next(op, c, sub) : SclNode::last(op, c, sub);
    }
    if (accept('(')) {
      SclFormula f = until_expr();
      expect(')');
      return f;
    }
    return prop();
  }

  CmpOp cmp_op() {
    skip_ws();
    if (accept('<')) return accept('=') ? CmpOp::LE : CmpOp::LT;
    if (accept('>')) return accept('=') ? CmpOp::GE : CmpOp::GT;
    if (accept('=')) return CmpOp::EQ;
    throw parse_error("expected comparison operator", i);
  }

  int natural() {
    skip_ws();
    size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == start) throw parse_error("expected natural constant", i);
    try {
      return std::stoi(s.substr(start, i - start));
    } catch (...) {
      throw parse_error("malformed constant", start);
    }
  }

  SclFormula prop() {
    skip_ws();
    size_t start = i;
    while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
    if (i == start) throw parse_error("expected proposition", i);
    std::string name = s.substr(start, i - start);
    auto id = atlas.id_of(name);
    if (!id) throw parse_error("unknown proposition " + name, start);
    return SclNode::prop(*id);
  }
};

void print_rec(const SclFormula& f, const PropositionAtlas& atlas, std::ostream& os) {
  switch (f->kind) {
    case SclKind::Prop:
      os << atlas.name_of(f->prop);
      break;
    case SclKind::Or: {
      auto wrap = [&](const SclFormula& c) {
        bool need = c->kind == SclKind::Until || c->kind == SclKind::Since;
        if (need) os << "(";
        print_rec(c, atlas, os);
        if (need) os << ")";
      };
      wrap(f->child_a);
      os << " | ";
      wrap(f->child_b);
      break;
    }
    case SclKind::Not:
      os << "!";
      if (f->child_a->kind == SclKind::Prop) {
        print_rec(f->child_a, atlas, os);
      } else {
        os << "(";
        print_rec(f->child_a, atlas, os);
        os << ")";
      }
      break;
    case SclKind::Until:
    case SclKind::Since: {
      auto wrap = [&](const SclFormula& c) {
        bool need = c->kind == SclKind::Or || c->kind == SclKind::Until || c->kind == SclKind::Since;
        if (need) os << "(";
        print_rec(c, atlas, os);
        if (need) os << ")";
      };
      wrap(f->child_a);
      os << (f->kind == SclKind::Until ? " U " : " S ");
      // right-associative: bare right operand is fine
      if (f->child_b->kind == SclKind::Or) {
        os << "(";
        print_rec(f->child_b, atlas, os);
        os << ")";
      } else {
        print_rec(f->child_b, atlas, os);
      }
      break;
    }
    case SclKind::Next:
    case SclKind::Last: {
      os << (f->kind == SclKind::Next ? "next[" : "last[") << cmp_to_string(f->op) << f->c << "] ";
      if (f->child_a->kind == SclKind::Prop || f->child_a->kind == SclKind::Not ||
          f->child_a->kind == SclKind::Next || f->child_a->kind == SclKind::Last) {
        print_rec(f->child_a, atlas, os);
      } else {
        os << "(";
        print_rec(f->child_a, atlas, os);
        os << ")";
      }
      break;
    }
  }
}

} // namespace

SclFormula parse_scl(const std::string& text, const PropositionAtlas& atlas) {
  return SclParser(text, atlas).parse();
}

std::string print_scl(const SclFormula& f, const PropositionAtlas& atlas) {
  std::ostringstream os;
  print_rec(f, atlas, os);
  return os.str();
}

int max_constant(const SclFormula& f) {
  if (!f) return 0;
  int m = (f->kind == SclKind::Next || f->kind == SclKind::Last) ? f->c : 0;
  if (f->child_a) m = std::max(m, max_constant(f->child_a));
  if (f->child_b) m = std::max(m, max_constant(f->child_b));
  return m;
}

} // namespace motorway
