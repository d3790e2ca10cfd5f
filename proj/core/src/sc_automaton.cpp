#include "motorway/sc_automaton.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace motorway {

std::vector<int> ScAutomaton::initial_locations() const {
  std::vector<int> out;
  for (int i = 0; i < num_locations(); ++i)
    if (locations[i].initial) out.push_back(i);
  return out;
}

std::vector<std::pair<int, bool>> ScAutomaton::prop_literals(int loc) const {
  std::vector<std::pair<int, bool>> out;
  for (size_t i = 0; i < props.size(); ++i)
    out.emplace_back(props[i], (locations[loc].prop_truth >> i) & 1u);
  return out;
}

// ---------------------------------------------------------------------------
// Compilation
// ---------------------------------------------------------------------------

namespace {

int intern(const SclFormula& f, std::vector<ClosureNode>& nodes,
           std::vector<SclFormula>& originals) {
  int a = -1, b = -1;
  if (f->child_a) a = intern(f->child_a, nodes, originals);
  if (f->child_b) b = intern(f->child_b, nodes, originals);
  for (size_t i = 0; i < nodes.size(); ++i) {
    const ClosureNode& n = nodes[i];
    if (n.kind == f->kind && n.prop == f->prop && n.a == a && n.b == b &&
        (f->kind != SclKind::Next && f->kind != SclKind::Last ||
         (n.op == f->op && n.c == f->c)))
      return static_cast<int>(i);
  }
  ClosureNode n;
  n.kind = f->kind;
  n.prop = f->prop;
  n.a = a;
  n.b = b;
  n.op = f->op;
  n.c = f->c;
  nodes.push_back(n);
  originals.push_back(f);
  return static_cast<int>(nodes.size()) - 1;
}

} // namespace

ScAutomaton compile(const SclFormula& psi, const PropositionAtlas& atlas) {
  ScAutomaton a;
  std::vector<SclFormula> originals;
  a.root = intern(psi, a.closure, originals);
  const int n = static_cast<int>(a.closure.size());
  if (n > 62) throw model_error("formula closure too large");

  // alphabet and clocks
  std::map<int, int> prop_to_bit;
  for (int i = 0; i < n; ++i) {
    if (a.closure[i].kind == SclKind::Prop && !prop_to_bit.count(a.closure[i].prop)) {
      prop_to_bit[a.closure[i].prop] = static_cast<int>(a.props.size());
      a.props.push_back(a.closure[i].prop);
    }
  }
  auto clock_for = [&](int arg, bool future) -> int {
    for (size_t j = 0; j < a.clocks.size(); ++j)
      if (a.clocks[j].arg == arg && a.clocks[j].future == future) return static_cast<int>(j);
    ScAutomaton::Clock ck;
    ck.arg = arg;
    ck.future = future;
    ck.name = (future ? "y_" : "x_") + std::to_string(arg);
    a.clocks.push_back(ck);
    return static_cast<int>(a.clocks.size()) - 1;
  };
  for (int i = 0; i < n; ++i) {
    ClosureNode& cn = a.closure[i];
    if (cn.kind == SclKind::Next) cn.clock = clock_for(cn.a, true);
    if (cn.kind == SclKind::Last) cn.clock = clock_for(cn.a, false);
    if (cn.kind == SclKind::Next || cn.kind == SclKind::Last) {
      a.cmax = std::max(a.cmax, cn.c);
      if (cn.op == CmpOp::LE || cn.op == CmpOp::EQ || cn.op == CmpOp::GT)
        ; // att sensitivity marked below once clocks exist
    }
  }
  for (int i = 0; i < n; ++i) {
    const ClosureNode& cn = a.closure[i];
    if ((cn.kind == SclKind::Next || cn.kind == SclKind::Last) &&
        (cn.op == CmpOp::LE || cn.op == CmpOp::EQ || cn.op == CmpOp::GT))
      a.clocks[cn.clock].att_sensitive = true;
  }
  if (a.cmax < 1) a.cmax = 1;

  // free bits: props, until, since, next, last; derived: or, not
  std::vector<int> free_bits;
  for (int i = 0; i < n; ++i) {
    SclKind k = a.closure[i].kind;
    if (k == SclKind::Prop || k == SclKind::Until || k == SclKind::Since ||
        k == SclKind::Next || k == SclKind::Last)
      free_bits.push_back(i);
  }
  if (free_bits.size() > 24) throw model_error("too many free closure bits");

  auto consistent = [&](uint64_t bits) -> bool {
    for (int i = 0; i < n; ++i) {
      const ClosureNode& cn = a.closure[i];
      bool v = (bits >> i) & 1u;
      if (cn.kind == SclKind::Until || cn.kind == SclKind::Since) {
        bool va = (bits >> cn.a) & 1u, vb = (bits >> cn.b) & 1u;
        if (vb && !v) return false;
        if (v && !va && !vb) return false;
      }
      (void)v;
    }
    return true;
  };

  for (uint64_t m = 0; m < (uint64_t(1) << free_bits.size()); ++m) {
    uint64_t bits = 0;
    for (size_t j = 0; j < free_bits.size(); ++j)
      if ((m >> j) & 1u) bits |= uint64_t(1) << free_bits[j];
    // derived bits, children-first order guarantees availability
    for (int i = 0; i < n; ++i) {
      const ClosureNode& cn = a.closure[i];
      if (cn.kind == SclKind::Or) {
        bool v = ((bits >> cn.a) & 1u) || ((bits >> cn.b) & 1u);
        if (v) bits |= uint64_t(1) << i;
      } else if (cn.kind == SclKind::Not) {
        bool v = !((bits >> cn.a) & 1u);
        if (v) bits |= uint64_t(1) << i;
      }
    }
    if (!consistent(bits)) continue;

    ScAutomaton::Location loc;
    loc.closure_bits = bits;
    for (size_t j = 0; j < a.props.size(); ++j) {
      // find the closure index of this prop
      for (int i = 0; i < n; ++i)
        if (a.closure[i].kind == SclKind::Prop && a.closure[i].prop == a.props[j] &&
            ((bits >> i) & 1u))
          loc.prop_truth |= uint64_t(1) << j;
    }
    for (size_t j = 0; j < a.clocks.size(); ++j)
      if ((bits >> a.clocks[j].arg) & 1u) loc.arg_truth |= uint64_t(1) << j;
    for (int i = 0; i < n; ++i) {
      const ClosureNode& cn = a.closure[i];
      if (cn.kind == SclKind::Next || cn.kind == SclKind::Last)
        loc.delta.push_back({cn.clock, cn.op, cn.c, ((bits >> i) & 1u) != 0});
    }
    // initial: root true and since-operators grounded (empty past)
    bool init = ((bits >> a.root) & 1u) != 0;
    if (init) {
      for (int i = 0; i < n; ++i) {
        const ClosureNode& cn = a.closure[i];
        if (cn.kind == SclKind::Since) {
          bool v = (bits >> i) & 1u, vb = (bits >> cn.b) & 1u;
          if (v != vb) {
            init = false;
            break;
          }
        }
      }
    }
    loc.initial = init;
    loc.name = "l" + std::to_string(a.locations.size());
    a.locations.push_back(loc);
  }

  // switch relation from the until/since unrolling rules
  const int L = a.num_locations();
  a.switch_ok.assign(L, std::vector<bool>(L, true));
  for (int l = 0; l < L; ++l) {
    for (int l2 = 0; l2 < L; ++l2) {
      uint64_t x = a.locations[l].closure_bits, y = a.locations[l2].closure_bits;
      bool ok = true;
      for (int i = 0; i < n && ok; ++i) {
        const ClosureNode& cn = a.closure[i];
        if (cn.kind == SclKind::Until) {
          bool u = (x >> i) & 1u, va = (x >> cn.a) & 1u, vb = (x >> cn.b) & 1u;
          bool un = (y >> i) & 1u;
          if (u != (vb || (va && un))) ok = false;
        } else if (cn.kind == SclKind::Since) {
          bool s = (x >> i) & 1u, sn = (y >> i) & 1u;
          bool va = (y >> cn.a) & 1u, vb = (y >> cn.b) & 1u;
          if (sn != (vb || (va && s))) ok = false;
        }
      }
      a.switch_ok[l][l2] = ok;
    }
  }

  // acceptance: one set per until obligation, one per prophecy clock
  for (int i = 0; i < n; ++i) {
    const ClosureNode& cn = a.closure[i];
    if (cn.kind != SclKind::Until) continue;
    ScAutomaton::Family f;
    f.locs.assign(L, false);
    for (int l = 0; l < L; ++l) {
      uint64_t x = a.locations[l].closure_bits;
      f.locs[l] = !((x >> i) & 1u) || ((x >> cn.b) & 1u);
    }
    a.families.push_back(std::move(f));
  }
  for (size_t j = 0; j < a.clocks.size(); ++j) {
    if (!a.clocks[j].future) continue;
    ScAutomaton::Family f;
    f.prophecy_clock = static_cast<int>(j);
    a.families.push_back(std::move(f));
  }
  return a;
}

// ---------------------------------------------------------------------------
// Hand-authored automata
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  size_t b = s.find_last_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

} // namespace

ScAutomaton parse_sc_automaton(const std::string& text, const PropositionAtlas& atlas) {
  ScAutomaton a;
  std::map<std::string, int> loc_index;
  std::map<std::string, int> clock_index;
  std::vector<std::pair<std::string, std::string>> edges;
  int max_accept = -1;
  std::vector<std::vector<int>> accept_of_loc;
  std::vector<std::vector<int>> prop_sets_tmp;

  auto clock_for = [&](const std::string& name) -> int {
    auto it = clock_index.find(name);
    if (it != clock_index.end()) return it->second;
    if (name.size() < 3 || (name[0] != 'x' && name[0] != 'y') || name[1] != '_')
      throw model_error("clock variable must be x_<prop> or y_<prop>: " + name);
    std::string prop = name.substr(2);
    auto pid = atlas.id_of(prop);
    if (!pid) throw model_error("unknown proposition in clock " + name);
    ScAutomaton::Clock ck;
    ck.future = name[0] == 'y';
    ck.name = name;
    ck.arg = *pid; // closure-free: arg indexes the atlas id directly
    a.clocks.push_back(ck);
    clock_index[name] = static_cast<int>(a.clocks.size()) - 1;
    return clock_index[name];
  };

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "loc") {
      std::string name;
      ls >> name;
      if (loc_index.count(name)) throw model_error("duplicate location " + name);
      ScAutomaton::Location loc;
      loc.name = name;
      std::vector<int> accepts;
      std::string tok;
      std::set<int> props_here;
      std::string delta_src;
      while (ls >> tok) {
        if (tok.rfind("props=", 0) == 0) {
          std::string body = tok.substr(6);
          if (body.size() < 2 || body.front() != '{')
            throw model_error("props={...} expected");
          // props may contain no spaces in this line-oriented format
          body = body.substr(1, body.size() - 2);
          std::istringstream ps(body);
          std::string p;
          while (std::getline(ps, p, ',')) {
            p = trim(p);
            if (p.empty()) continue;
            auto pid = atlas.id_of(p);
            if (!pid) throw model_error("unknown proposition " + p);
            props_here.insert(*pid);
          }
        } else if (tok.rfind("delta=", 0) == 0) {
          delta_src = tok.substr(6);
          if (delta_src.size() >= 1 && delta_src.front() == '"') {
            // re-join quoted pieces
            while (delta_src.back() != '"' || delta_src.size() == 1) {
              std::string more;
              if (!(ls >> more)) throw model_error("unterminated delta string");
              delta_src += " " + more;
            }
            delta_src = delta_src.substr(1, delta_src.size() - 2);
          }
        } else if (tok == "init") {
          loc.initial = true;
        } else if (tok.rfind("accept=", 0) == 0) {
          std::истringstream as(tok.substr(7));
          std::string idx;
          while (std::getline(as, idx, ',')) {
            accepts.push_back(std::stoi(idx));
            max_accept = std::max(max_accept, accepts.back());
          }
        } else {
          throw model_error("unknown token in loc line: " + tok);
        }
      }
      // parse delta constraints: conjunction of <clock><op><nat>
      if (!delta_src.empty()) {
        std::istringstream ds(delta_src);
        std::string part;
        while (std::getline(ds, part, '&')) {
          part = trim(part);
          if (part.empty()) continue;
          size_t k = 0;
          while (k < part.size() && (std::isalnum(static_cast<unsigned char>(part[k])) || part[k] == '_')) ++k;
          std::string var = part.substr(0, k);
          size_t opk = k;
          while (opk < part.size() && std::isspace(static_cast<unsigned char>(part[opk]))) ++opk;
          CmpOp op;
          if (part.compare(opk, 2, "<=") == 0) { op = CmpOp::LE; opk += 2; }
          else if (part.compare(opk, 2, ">=") == 0) { op = CmpOp::GE; opk += 2; }
          else if (part.compare(opk, 1, "<") == 0) { op = CmpOp::LT; opk += 1; }
          else if (part.compare(opk, 1, ">") == 0) { op = CmpOp::GT; opk += 1; }
          else if (part.compare(opk, 1, "=") == 0) { op = CmpOp::EQ; opk += 1; }
          else throw model_error("bad delta constraint: " + part);
          int c = std::stoi(trim(part.substr(opk)));
          loc.delta.push_back({clock_for(var), op, c, true});
          a.cmax = std::max(a.cmax, c);
        }
      }
      // fill alphabet lazily afterwards: remember props as bits later
      loc.closure_bits = 0;
      a.locations.push_back(loc);
      loc_index[name] = static_cast<int>(a.locations.size()) - 1;
      accept_of_loc.push_back(accepts);
      // stash props via arg_truth temporarily? store in a side table:
      a.locations.back().prop_truth = 0; // set after alphabet known
      // temporary: keep ids in name-indexed map
      static_cast<void>(props_here);
      // we need them later; encode in a parallel structure:
      // (handled below by re-parsing; simpler: store now)
      // -- we store by extending a member-local vector:
      // see below
      // To keep this single-pass, record into a static map keyed by index:
      // (实现 via captured vector)
      prop_sets_tmp.push_back(std::vector<int>(props_here.begin(), props_here.end()));
    } else if (word == "edge") {
      std::string from, arrow, to;
      ls >> from >> arrow >> to;
      if (arrow != "->") throw model_error("edge syntax: edge a -> b");
      edges.emplace_back(from, to);
    } else {
      throw model_error("unknown directive " + word);
    }
  }

  // alphabet: union of props mentioned
  std::set<int> alpha;
  for (const auto& ps : prop_sets_tmp) alpha.insert(ps.begin(), ps.end());
  for (const auto& ck : a.clocks) alpha.insert(ck.arg);
  a.props.assign(alpha.begin(), alpha.end());

  for (size_t li = 0; li < a.locations.size(); ++li) {
    auto& loc = a.locations[li];
    for (int pid : prop_sets_tmp[li]) {
      auto it = std::find(a.props.begin(), a.props.end(), pid);
      loc.prop_truth |= uint64_t(1) << (it - a.props.begin());
    }
    for (size_t j = 0; j < a.clocks.size(); ++j) {
      int pid = a.clocks[j].arg;
      auto it = std::find(a.props.begin(), a.props.end(), pid);
      bool t = (loc.prop_truth >> (it - a.props.begin())) & 1u;
      if (t) loc.arg_truth |= uint64_t(1) << j;
    }
  }

  const int L = a.num_locations();
  a.switch_ok.assign(L, std::vector<bool>(L, false));
  for (const auto& [f, t] : edges) {
    if (!loc_index.count(f) || !loc_index.count(t))
      throw model_error("edge references unknown location");
    a.switch_ok[loc_index[f]][loc_index[t]] = true;
  }

  for (int i = 0; i <= max_accept; ++i) {
    ScAutomaton::Family fam;
    fam.locs.assign(L, false);
    for (int l = 0; l < L; ++l)
      if (std::find(accept_of_loc[l].begin(), accept_of_loc[l].end(), i) != accept_of_loc[l].end())
        fam.locs[l] = true;
    a.families.push_back(std::move(fam));
  }
  // att sensitivity
  for (const auto& loc : a.locations)
    for (const auto& d : loc.delta)
      if (d.op == CmpOp::LE || d.op == CmpOp::EQ || d.op == CmpOp::GT)
        a.clocks[d.clock].att_sensitive = true;
  if (a.cmax < 1) a.cmax = 1;
  return a;
}

std::string describe(const ScAutomaton& a, const PropositionAtlas& atlas) {
  std::ostringstream os;
  os << "locations: " << a.num_locations() << ", clocks: " << a.clocks.size()
     << ", families: " << a.families.size() << ", cmax: " << a.cmax << "\n";
  for (int l = 0; l < a.num_locations(); ++l) {
    const auto& loc = a.locations[l];
    os << "  " << loc.name << (loc.initial ? " [init]" : "") << " props={";
    bool first = true;
    for (size_t i = 0; i < a.props.size(); ++i) {
      if ((loc.prop_truth >> i) & 1u) {
        if (!first) os << ",";
        os << atlas.name_of(a.props[i]);
        first = false;
      }
    }
    os << "}\n";
  }
  return os.str();
}

} // namespace motorway
