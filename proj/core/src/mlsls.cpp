#include "motorway/mlsls.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace motorway {

std::string cmp_to_string(CmpOp op) {
  switch (op) {
    case CmpOp::LT: return "<";
    case CmpOp::LE: return "<=";
    case CmpOp::EQ: return "=";
    case CmpOp::GE: return ">=";
    case CmpOp::GT: return ">";
  }
  return "?";
}

bool cmp_eval(double lhs, CmpOp op, double rhs, double tol) {
  switch (op) {
    case CmpOp::LT: return lhs < rhs - tol;
    case CmpOp::LE: return lhs <= rhs + tol;
    case CmpOp::EQ: return std::abs(lhs - rhs) <= tol;
    case CmpOp::GE: return lhs >= rhs - tol;
    case CmpOp::GT: return lhs > rhs + tol;
  }
  return false;
}

namespace {
MlslsFormula make(MlslsNode n) { return std::make_shared<const MlslsNode>(std::move(n)); }
} // namespace

MlslsFormula MlslsNode::var_eq(std::string a, std::string b) {
  MlslsNode n{MlslsKind::VarEq};
  n.var_a = std::move(a);
  n.var_b = std::move(b);
  return make(std::move(n));
}
MlslsFormula MlslsNode::free() { return make(MlslsNode{MlslsKind::Free}); }
MlslsFormula MlslsNode::re(std::string g) {
  MlslsNode n{MlslsKind::Re};
  n.var_a = std::move(g);
  return make(std::move(n));
}
MlslsFormula MlslsNode::cl(std::string g) {
  MlslsNode n{MlslsKind::Cl};
  n.var_a = std::move(g);
  return make(std::move(n));
}
MlslsFormula MlslsNode::length_cmp(CmpOp op, double k) {
  MlslsNode n{MlslsKind::LengthCmp};
  n.op = op;
  n.k = k;
  return make(std::move(n));
}
MlslsFormula MlslsNode::negate(MlslsFormula a) {
  MlslsNode n{MlslsKind::Not};
  n.child_a = std::move(a);
  return make(std::move(n));
}
MlslsFormula MlslsNode::conj(MlslsFormula a, MlslsFormula b) {
  MlslsNode n{MlslsKind::And};
  n.child_a = std::move(a);
  n.child_b = std::move(b);
  return make(std::move(n));
}
MlslsFormula MlslsNode::disj(MlslsFormula a, MlslsFormula b) {
  MlslsNode n{MlslsKind::Or};
  n.child_a = std::move(a);
  n.child_b = std::move(b);
  return make(std::move(n));
}
MlslsFormula MlslsNode::exists(std::string v, MlslsFormula a) {
  MlslsNode n{MlslsKind::Exists};
  n.var_a = std::move(v);
  n.child_a = std::move(a);
  return make(std::move(n));
}
MlslsFormula MlslsNode::hchop(MlslsFormula a, MlslsFormula b) {
  MlslsNode n{MlslsKind::HChop};
  n.child_a = std::move(a);
  n.child_b = std::move(b);
  return make(std::move(n));
}
MlslsFormula MlslsNode::vchop(MlslsFormula a, MlslsFormula b) {
  MlslsNode n{MlslsKind::VChop};
  n.child_a = std::move(a);
  n.child_b = std::move(b);
  return make(std::move(n));
}
MlslsFormula MlslsNode::scope(std::vector<std::string> cs, MlslsFormula a) {
  MlslsNode n{MlslsKind::Scope};
  n.cars = std::move(cs);
  n.child_a = std::move(a);
  return make(std::move(n));
}
MlslsFormula MlslsNode::somewhere(MlslsFormula a) {
  MlslsNode n{MlslsKind::Somewhere};
  n.child_a = std::move(a);
  return make(std::move(n));
}

bool mlsls_equal(const MlslsFormula& a, const MlslsFormula& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  if (a->var_a != b->var_a || a->var_b != b->var_b) return false;
  if (a->kind == MlslsKind::LengthCmp && (a->op != b->op || a->k != b->k)) return false;
  if (a->cars != b->cars) return false;
  if ((a->child_a != nullptr) != (b->child_a != nullptr)) return false;
  if ((a->child_b != nullptr) != (b->child_b != nullptr)) return false;
  if (a->child_a && !mlsls_equal(a->child_a, b->child_a)) return false;
  if (a->child_b && !mlsls_equal(a->child_b, b->child_b)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct Lexer {
  const std::string& s;
  size_t i = 0;

  explicit Lexer(const std::string& text) : s(text) {}

  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eof() {
    skip_ws();
    return i >= s.size();
  }
  char peek() {
    skip_ws();
    return i < s.size() ? s[i] : '\0';
  }
  bool accept(char c) {
    skip_ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) throw parse_error(std::string("expected '") + c + "'", i);
  }
  bool accept_word(const std::string& w) {
    skip_ws();
    if (s.compare(i, w.size(), w) == 0) {
      size_t end = i + w.size();
      bool boundary = end >= s.size() || !(std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_');
      if (boundary) {
        i = end;
        return true;
      }
    }
    return false;
  }
  std::string ident() {
    skip_ws();
    size_t start = i;
    while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
    if (i == start) throw parse_error("expected identifier", i);
    return s.substr(start, i - start);
  }
  double number() {
    skip_ws();
    size_t start = i;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
    if (i == start) throw parse_error("expected number", i);
    try {
      return std::stod(s.substr(start, i - start));
    } catch (...) {
      throw parse_error("malformed number", start);
    }
  }
  CmpOp cmp_op() {
    skip_ws();
    if (accept('<')) return accept('=') ? CmpOp::LE : CmpOp::LT;
    if (accept('>')) return accept('=') ? CmpOp::GE : CmpOp::GT;
    if (accept('=')) return CmpOp::EQ;
    throw parse_error("expected comparison operator", i);
  }
};

struct MlslsParser {
  Lexer lx;
  explicit MlslsParser(const std::string& text) : lx(text) {}

  MlslsFormula parse() {
    MlslsFormula f = formula();
    if (!lx.eof()) throw parse_error("trailing input", lx.i);
    return f;
  }

  MlslsFormula formula() { return or_expr(); }

  MlslsFormula or_expr() {
    MlslsFormula f = and_expr();
    while (lx.accept('|')) f = MlslsNode::disj(f, and_expr());
    return f;
  }

  MlslsFormula and_expr() {
    MlslsFormula f = unary();
    while (lx.accept('&')) f = MlslsNode::conj(f, unary());
    return f;
  }

  MlslsFormula unary() {
    if (lx.accept('!')) return MlslsNode::negate(unary());
    if (lx.accept_word("exists")) {
      std::string v = lx.ident();
      lx.expect('.');
      return MlslsNode::exists(v, formula());
    }
    if (lx.accept_word("scope")) {
      lx.expect('{');
      std::vector<std::string> cs;
      if (!lx.accept('}')) {
        cs.push_back(lx.ident());
        while (lx.accept(',')) cs.push_back(lx.ident());
        lx.expect('}');
      }
      lx.expect(':');
      return MlslsNode::scope(std::move(cs), formula());
    }
    return atom();
  }

  MlslsFormula atom() {
    if (lx.accept('(')) {
      MlslsFormula f = formula();
      lx.expect(')');
      return f;
    }
    if (lx.accept('<')) { // horizontal chop, right-nested
      std::vector<MlslsFormula> parts;
      parts.push_back(formula());
      lx.expect('~');
      parts.push_back(formula());
      while (lx.accept('~')) parts.push_back(formula());
      lx.expect('>');
      MlslsFormula f = parts.back();
      for (size_t j = parts.size() - 1; j-- > 0;) f = MlslsNode::hchop(parts[j], f);
      return f;
    }
    if (lx.accept('[')) { // vertical chop, right-nested
      std::vector<MlslsFormula> parts;
      parts.push_back(formula());
      lx.expect('/');
      parts.push_back(formula());
      while (lx.accept('/')) parts.push_back(formula());
      lx.expect(']');
      MlslsFormula f = parts.back();
      for (size_t j = parts.size() - 1; j-- > 0;) f = MlslsNode::vchop(parts[j], f);
      return f;
    }
    if (lx.accept_word("free")) return MlslsNode::free();
    if (lx.accept_word("somewhere")) {
      lx.expect('(');
      MlslsFormula f = formula();
      lx.expect(')');
      return MlslsNode::somewhere(f);
    }
    if (lx.accept_word("re")) {
      lx.expect('(');
      std::string g = lx.ident();
      lx.expect(')');
      return MlslsNode::re(g);
    }
    if (lx.accept_word("cl")) {
      lx.expect('(');
      std::string g = lx.ident();
      lx.expect(')');
      return MlslsNode::cl(g);
    }
    if (lx.accept_word("l")) {
      CmpOp op = lx.cmp_op();
      double k = lx.number();
      if (k < 0) throw parse_error("length constant must be non-negative", lx.i);
      return MlslsNode::length_cmp(op, k);
    }
    // car term comparison
    std::string a = lx.ident();
    lx.expect('=');
    std::string b = lx.ident();
    return MlslsNode::var_eq(a, b);
  }
};

} // namespace

MlslsFormula parse_mlsls(const std::string& text) { return MlslsParser(text).parse(); }

namespace {
void print_rec(const MlslsFormula& f, std::ostream& os) {
  switch (f->kind) {
    case MlslsKind::VarEq: os << f->var_a << " = " << f->var_b; break;
    case MlslsKind::Free: os << "free"; break;
    case MlslsKind::Re: os << "re(" << f->var_a << ")"; break;
    case MlslsKind::Cl: os << "cl(" << f->var_a << ")"; break;
    case MlslsKind::LengthCmp: {
      os << "l " << cmp_to_string(f->op) << " ";
      std::ostringstream num;
      num << f->k;
      os << num.str();
      break;
    }
    case MlslsKind::Not:
      os << "!";
      if (f->child_a->kind == MlslsKind::And || f->child_a->kind == MlslsKind::Or ||
          f->child_a->kind == MlslsKind::Exists || f->child_a->kind == MlslsKind::Scope ||
          f->child_a->kind == MlslsKind::VarEq || f->child_a->kind == MlslsKind::LengthCmp) {
        os << "(";
        print_rec(f->child_a, os);
        os << ")";
      } else {
        print_rec(f->child_a, os);
      }
      break;
    case MlslsKind::And: {
      auto wrap = [&](const MlslsFormula& c) {
        bool need = c->kind == MlslsKind::Or || c->kind == MlslsKind::Exists || c->kind == MlslsKind::Scope;
        if (need) os << "(";
        print_rec(c, os);
        if (need) os << ")";
      };
      wrap(f->child_a);
      os << " & ";
      wrap(f->child_b);
      break;
    }
    case MlslsKind::Or:
      print_rec(f->child_a, os);
      os << " | ";
      print_rec(f->child_b, os);
      break;
    case MlslsKind::Exists:
      os << "exists " << f->var_a << ". ";
      print_rec(f->child_a, os);
      break;
    case MlslsKind::HChop:
      os << "<";
      print_rec(f->child_a, os);
      os << " ~ ";
      print_rec(f->child_b, os);
      os << ">";
      break;
    case MlslsKind::VChop:
      os << "[";
      print_rec(f->child_a, os);
      os << " / ";
      print_rec(f->child_b, os);
      os << "]";
      break;
    case MlslsKind::Scope: {
      os << "scope{";
      for (size_t i = 0; i < f->cars.size(); ++i) {
        if (i) os << ",";
        os << f->cars[i];
      }
      os << "}: ";
      print_rec(f->child_a, os);
      break;
    }
    case MlslsKind::Somewhere:
      os << "somewhere(";
      print_rec(f->child_a, os);
      os << ")";
      break;
  }
}
} // namespace

std::string print_mlsls(const MlslsFormula& f) {
  std::ostringstream os;
  print_rec(f, os);
  return os.str();
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

View default_view(const TrafficSnapshot& ts, const GeometryTable& geom, const RoadConfig& road) {
  View v;
  v.lane_lo = 1;
  v.lane_hi = road.lane_count;
  bool first = true;
  for (const auto& [c, p] : ts.pos) {
    auto it = geom.find(c);
    double size = it != geom.end() ? it->second.size : 0.0;
    double brake = it != geom.end() ? it->second.braking_distance : 0.0;
    double lo = p - brake, hi = p + size + brake;
    if (first || lo < v.a) v.a = lo;
    if (first || hi > v.b) v.b = hi;
    first = false;
  }
  return v;
}

namespace {

CarId resolve_term(const EvalContext& cx, const std::string& term) {
  auto it = cx.valuation.find(term);
  if (it != cx.valuation.end()) return it->second;
  if (cx.ts->pos.count(term)) return term; // identifier used directly
  throw model_error("unbound car term " + term);
}

double car_size(const EvalContext& cx, const CarId& c) {
  auto it = cx.geom->find(c);
  return it != cx.geom->end() ? it->second.size : 0.0;
}

/* Candidate split points on the current extent: view borders, car endpoints
 * inside it, and every length constant measured from either border. */
std::vector<double> split_candidates(const EvalContext& cx, double a, double b,
                                     const std::set<double>& constants) {
  std::vector<double> pts{a, b};
  for (const auto& [c, p] : cx.ts->pos) {
    double lo = p, hi = p + car_size(cx, c);
    for (double x : {lo, hi})
      if (x > a - cx.tol && x < b + cx.tol) pts.push_back(std::clamp(x, a, b));
  }
  for (double k : constants) {
    if (a + k <= b + cx.tol) pts.push_back(std::min(a + k, b));
    if (b - k >= a - cx.tol) pts.push_back(std::max(b - k, a));
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [&](double x, double y) { return std::abs(x - y) <= cx.tol; }),
            pts.end());
  return pts;
}

bool eval_rec(const EvalContext& cx, const View& v, const MlslsFormula& f,
              const std::set<double>& constants);

/* Evaluation on a view with zero lanes (vertical chop remainder): re, cl and
 * free are false there, everything else keeps its meaning. */
bool eval_rec_empty_lanes(const EvalContext& cx, const View& v, const MlslsFormula& f,
                          const std::set<double>& constants);

bool eval_free(const EvalContext& cx, const View& v) {
  if (v.lane_count() != 1) return false;
  if (v.length() <= cx.tol) return false;
  for (const CarId& c : cx.scope) {
    const auto& res = cx.ts->res_of(c);
    const auto& clm = cx.ts->clm_of(c);
    if (!res.count(v.lane_lo) && !clm.count(v.lane_lo)) continue;
    double lo = cx.ts->pos_of(c), hi = lo + car_size(cx, c);
    double ov = std::min(hi, v.b) - std::max(lo, v.a);
    if (ov > cx.tol) return false; // positive-length overlap
  }
  return true;
}

bool eval_occ(const EvalContext& cx, const View& v, const CarId& c, bool reserved) {
  if (v.lane_count() != 1) return false;
  if (v.length() <= cx.tol) return false;
  const auto& lanes = reserved ? cx.ts->res_of(c) : cx.ts->clm_of(c);
  if (!lanes.count(v.lane_lo)) return false;
  double lo = cx.ts->pos_of(c), hi = lo + car_size(cx, c);
  return v.a >= lo - cx.tol && v.b <= hi + cx.tol;
}

bool eval_rec(const EvalContext& cx, const View& v, const MlslsFormula& f,
              const std::set<double>& constants) {
  switch (f->kind) {
    case MlslsKind::VarEq:
      return resolve_term(cx, f->var_a) == resolve_term(cx, f->var_b);
    case MlslsKind::Free:
      return eval_free(cx, v);
    case MlslsKind::Re:
      return eval_occ(cx, v, resolve_term(cx, f->var_a), true);
    case MlslsKind::Cl:
      return eval_occ(cx, v, resolve_term(cx, f->var_a), false);
    case MlslsKind::LengthCmp:
      return cmp_eval(v.length(), f->op, f->k, cx.tol);
    case MlslsKind::Not:
      return !eval_rec(cx, v, f->child_a, constants);
    case MlslsKind::And:
      return eval_rec(cx, v, f->child_a, constants) && eval_rec(cx, v, f->child_b, constants);
    case MlslsKind::Or:
      return eval_rec(cx, v, f->child_a, constants) || eval_rec(cx, v, f->child_b, constants);
    case MlslsKind::Exists: {
      for (const CarId& c : cx.scope) {
        EvalContext sub = cx;
        sub.valuation[f->var_a] = c;
        if (eval_rec(sub, v, f->child_a, constants)) return true;
      }
      return false;
    }
    case MlslsKind::HChop: {
      std::vector<double> pts = split_candidates(cx, v.a, v.b, constants);
      for (double s : pts) {
        View left = v, right = v;
        left.b = s;
        right.a = s;
        if (eval_rec(cx, left, f->child_a, constants) && eval_rec(cx, right, f->child_b, constants))
          return true;
      }
      return false;
    }
    case MlslsKind::VChop: {
      for (Lane j = v.lane_lo - 1; j <= v.lane_hi; ++j) {
        View below = v, above = v;
        below.lane_hi = j;   // empty when j < lane_lo
        above.lane_lo = j + 1;
        bool below_empty = j < v.lane_lo;
        bool above_empty = j == v.lane_hi;
        // empty-lane part: only formulas not requiring a lane can hold
        bool okb = below_empty ? eval_rec_empty_lanes(cx, below, f->child_a, constants)
                               : eval_rec(cx, below, f->child_a, constants);
        if (!okb) continue;
        bool oka = above_empty ? eval_rec_empty_lanes(cx, above, f->child_b, constants)
                               : eval_rec(cx, above, f->child_b, constants);
        if (oka) return true;
      }
      return false;
    }
    case MlslsKind::Scope: {
      EvalContext sub = cx;
      sub.scope.clear();
      for (const auto& term : f->cars) sub.scope.insert(resolve_term(cx, term));
      return eval_rec(sub, v, f->child_a, constants);
    }
    case MlslsKind::Somewhere: {
      std::vector<double> pts = split_candidates(cx, v.a, v.b, constants);
      for (Lane l1 = v.lane_lo; l1 <= v.lane_hi; ++l1) {
        for (Lane l2 = l1; l2 <= v.lane_hi; ++l2) {
          for (size_t i = 0; i < pts.size(); ++i) {
            for (size_t j = i; j < pts.size(); ++j) {
              View sub{l1, l2, pts[i], pts[j]};
              if (eval_rec(cx, sub, f->child_a, constants)) return true;
            }
          }
        }
      }
      return false;
    }
  }
  return false;
}

bool eval_rec_empty_lanes(const EvalContext& cx, const View& v, const MlslsFormula& f,
                          const std::set<double>& constants) {
  switch (f->kind) {
    case MlslsKind::Free:
    case MlslsKind::Re:
    case MlslsKind::Cl:
      return false;
    case MlslsKind::VarEq:
      return resolve_term(cx, f->var_a) == resolve_term(cx, f->var_b);
    case MlslsKind::LengthCmp:
      return cmp_eval(v.length(), f->op, f->k, cx.tol);
    case MlslsKind::Not:
      return !eval_rec_empty_lanes(cx, v, f->child_a, constants);
    case MlslsKind::And:
      return eval_rec_empty_lanes(cx, v, f->child_a, constants) &&
             eval_rec_empty_lanes(cx, v, f->child_b, constants);
    case MlslsKind::Or:
      return eval_rec_empty_lanes(cx, v, f->child_a, constants) ||
             eval_rec_empty_lanes(cx, v, f->child_b, constants);
    case MlslsKind::Exists: {
      for (const CarId& c : cx.scope) {
        EvalContext sub = cx;
        sub.valuation[f->var_a] = c;
        if (eval_rec_empty_lanes(sub, v, f->child_a, constants)) return true;
      }
      return false;
    }
    case MlslsKind::HChop: {
      std::vector<double> pts = split_candidates(cx, v.a, v.b, constants);
      for (double s : pts) {
        View left = v, right = v;
        left.b = s;
        right.a = s;
        if (eval_rec_empty_lanes(cx, left, f->child_a, constants) &&
            eval_rec_empty_lanes(cx, right, f->child_b, constants))
          return true;
      }
      return false;
    }
    case MlslsKind::VChop:
      // both parts are empty as well
      return eval_rec_empty_lanes(cx, v, f->child_a, constants) &&
             eval_rec_empty_lanes(cx, v, f->child_b, constants);
    case MlslsKind::Scope: {
      EvalContext sub = cx;
      sub.scope.clear();
      for (const auto& term : f->cars) sub.scope.insert(resolve_term(cx, term));
      return eval_rec_empty_lanes(sub, v, f->child_a, constants);
    }
    case MlslsKind::Somewhere: {
      std::vector<double> pts = split_candidates(cx, v.a, v.b, constants);
      for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i; j < pts.size(); ++j) {
          View sub{v.lane_lo, v.lane_hi, pts[i], pts[j]};
          if (eval_rec_empty_lanes(cx, sub, f->child_a, constants)) return true;
        }
      return false;
    }
  }
  return false;
}
} // namespace

void collect_length_constants(const MlslsFormula& f, std::set<double>& out) {
  if (!f) return;
  if (f->kind == MlslsKind::LengthCmp) out.insert(f->k);
  collect_length_constants(f->child_a, out);
  collect_length_constants(f->child_b, out);
}

bool evaluate(const EvalContext& cx, const View& view, const MlslsFormula& phi) {
  if (!cx.ts || !cx.geom) throw model_error("evaluate: missing snapshot or geometry");
  std::set<double> constants;
  collect_length_constants(phi, constants);
  return eval_rec(cx, view, phi, constants);
}

// ---------------------------------------------------------------------------
// Proposition atlas and trace_states
// ---------------------------------------------------------------------------

int PropositionAtlas::add(const std::string& name, MlslsFormula f) {
  if (id_of(name)) throw model_error("duplicate atlas proposition " + name);
  entries.emplace_back(name, std::move(f));
  return static_cast<int>(entries.size()) - 1;
}

std::optional<int> PropositionAtlas::id_of(const std::string& name) const {
  for (size_t i = 0; i < entries.size(); ++i)
    if (entries[i].first == name) return static_cast<int>(i);
  return std::nullopt;
}

const std::string& PropositionAtlas::name_of(int id) const {
  return entries.at(static_cast<size_t>(id)).first;
}

const MlslsFormula& PropositionAtlas::formula_of(int id) const {
  return entries.at(static_cast<size_t>(id)).second;
}

namespace {

/* Real roots of c2 t^2 + c1 t + c0 = 0 inside (lo, hi). */
void quad_roots_in(double c2, double c1, double c0, double lo, double hi,
                   double tol, std::vector<double>& out) {
  auto push = [&](double t) {
    if (t > lo + tol && t < hi - tol) out.push_back(t);
  };
  if (std::abs(c2) <= 1e-14) {
    if (std::abs(c1) <= 1e-14) return; // constant
    push(-c0 / c1);
    return;
  }
  double disc = c1 * c1 - 4.0 * c2 * c0;
  if (disc < 0.0) return;
  double sq = std::sqrt(disc);
  // numerically stable pair
  double q = -0.5 * (c1 + (c1 >= 0 ? sq : -sq));
  push(q / c2);
  if (std::abs(q) > 1e-14) push(c0 / q);
  else push(-c1 / (2.0 * c2) );
}

LiteralState eval_atlas(const TrafficSnapshot& ts, const PropositionAtlas& atlas,
                        const GeometryTable& geom, const RoadConfig& road, double tol) {
  LiteralState st;
  View v = default_view(ts, geom, road);
  EvalContext cx;
  cx.ts = &ts;
  cx.geom = &geom;
  cx.tol = tol;
  for (const auto& [c, _] : ts.pos) cx.scope.insert(c);
  for (int id = 0; id < atlas.size(); ++id)
    st.set(id, evaluate(cx, v, atlas.formula_of(id)));
  return st;
}

} // namespace

TimedStateSequence trace_states(const TrafficSnapshot& ts0, const TimedWord& w,
                                const PropositionAtlas& atlas, double horizon,
                                const GeometryTable& geom, const RoadConfig& road,
                                const TraceOptions& opt) {
  if (horizon < 0) throw model_error("trace_states: horizon must be >= 0");
  Evolution ev = run_word(ts0, w, horizon, road, opt.transitions);

  std::set<double> constants;
  for (const auto& [_, f] : atlas.entries) collect_length_constants(f, constants);

  // boundary instants: 0, horizon, action timestamps
  std::vector<double> bounds{0.0, horizon};
  for (const auto& s : ev.samples) bounds.push_back(s.second);

  // roots of critical-point crossings inside each constant-acceleration segment
  std::vector<CarId> cars;
  for (const auto& [c, _] : ts0.pos) cars.push_back(c);
  for (size_t si = 0; si + 1 < ev.samples.size(); ++si) {
    const TrafficSnapshot& snap = ev.samples[si].first;
    double t0 = ev.samples[si].second, t1 = ev.samples[si + 1].second;
    if (t1 - t0 <= opt.tol) continue;
    // critical point functions per car, relative to segment start:
    //   rear, front, view-lo, view-hi; all share the car's quadratic motion
    struct Fn { double half_a, v, x; };
    std::vector<Fn> fns;
    for (const CarId& c : cars) {
      double size = 0, brake = 0;
      if (auto it = geom.find(c); it != geom.end()) {
        size = it->second.size;
        brake = it->second.braking_distance;
      }
      double p = snap.pos_of(c), v = snap.spd_of(c), a = snap.acc_of(c);
      fns.push_back({0.5 * a, v, p});
      fns.push_back({0.5 * a, v, p + size});
      fns.push_back({0.5 * a, v, p - brake});
      fns.push_back({0.5 * a, v, p + size + brake});
    }
    std::set<double> ks{0.0};
    for (double k : constants) {
      ks.insert(k);
      ks.insert(-k);
    }
    std::vector<double> roots;
    for (size_t i = 0; i < fns.size(); ++i) {
      for (size_t j = 0; j < fns.size(); ++j) {
        if (i == j) continue;
        for (double k : ks) {
          quad_roots_in(fns[i].half_a - fns[j].half_a, fns[i].v - fns[j].v,
                        fns[i].x - fns[j].x - k, 0.0, t1 - t0, opt.tol, roots);
        }
      }
    }
    for (double r : roots) bounds.push_back(t0 + r);
  }

  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::remove_if(bounds.begin(), bounds.end(),
                              [&](double t) { return t < -opt.tol || t > horizon + opt.tol; }),
               bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end(),
                           [&](double x, double y) { return std::abs(x - y) <= opt.tol; }),
               bounds.end());

  TimedStateSequence seq;
  for (size_t i = 0; i < bounds.size(); ++i) {
    double t = bounds[i];
    seq.phases.push_back({eval_atlas(ev.at(t), atlas, geom, road, opt.tol), Interval::point(t)});
    if (i + 1 < bounds.size()) {
      double mid = 0.5 * (bounds[i] + bounds[i + 1]);
      seq.phases.push_back(
          {eval_atlas(ev.at(mid), atlas, geom, road, opt.tol), Interval::open(bounds[i], bounds[i + 1])});
    }
  }
  return seq.fused(opt.tol);
}

} // namespace motorway
