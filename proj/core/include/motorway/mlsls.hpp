#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "motorway/timed_sequence.hpp"
#include "motorway/traffic.hpp"

namespace motorway {

struct parse_error : std::runtime_error {
  size_t position;
  parse_error(const std::string& msg, size_t pos)
      : std::runtime_error(msg + " (at offset " + std::to_string(pos) + ")"), position(pos) {}
};

enum class CmpOp { LT, LE, EQ, GE, GT };
std::string cmp_to_string(CmpOp op);
bool cmp_eval(double lhs, CmpOp op, double rhs, double tol = 1e-9);

enum class MlslsKind {
  VarEq, Free, Re, Cl, LengthCmp, Not, And, Or, Exists, HChop, VChop, Scope, Somewhere
};

struct MlslsNode;
using MlslsFormula = std::shared_ptr<const MlslsNode>;

/* MLSLS abstract syntax. Car terms are either variables bound by an
 * enclosing exists / supplied by a valuation, or car identifiers used
 * directly. */
struct MlslsNode {
  MlslsKind kind;
  std::string var_a, var_b;       // VarEq(a,b), Re(a), Cl(a), Exists(a, .)
  CmpOp op = CmpOp::EQ;           // LengthCmp
  double k = 0.0;                 // LengthCmp
  std::vector<std::string> cars;  // Scope
  MlslsFormula child_a, child_b;

  static MlslsFormula var_eq(std::string a, std::string b);
  static MlslsFormula free();
  static MlslsFormula re(std::string g);
  static MlslsFormula cl(std::string g);
  static MlslsFormula length_cmp(CmpOp op, double k);
  static MlslsFormula negate(MlslsFormula a);
  static MlslsFormula conj(MlslsFormula a, MlslsFormula b);
  static MlslsFormula disj(MlslsFormula a, MlslsFormula b);
  static MlslsFormula exists(std::string v, MlslsFormula a);
  static MlslsFormula hchop(MlslsFormula a, MlslsFormula b);
  static MlslsFormula vchop(MlslsFormula a, MlslsFormula b);
  static MlslsFormula scope(std::vector<std::string> cs, MlslsFormula a);
  static MlslsFormula somewhere(MlslsFormula a);
};

bool mlsls_equal(const MlslsFormula& a, const MlslsFormula& b);

/* Concrete syntax: `free`, `re(c)`, `cl(c)`, `l = 21`, `c = d`,
 * `<p ~ q ~ r>` (horizontal chop, right-nested), `[p / q]` (vertical chop),
 * `somewhere(p)`, `scope{A,B}: p`, `exists c. p`, `!`, `&`, `|`, parentheses.
 * Precedence: ! > & > |. */
MlslsFormula parse_mlsls(const std::string& text);
std::string print_mlsls(const MlslsFormula& f);

/* Finite window of the road: a contiguous lane range and a bounded extent
 * along it. */
struct View {
  Lane lane_lo = 1, lane_hi = 1;
  double a = 0.0, b = 0.0;

  int lane_count() const { return lane_hi - lane_lo + 1; }
  double length() const { return b - a; }
};

/* Smallest view covering every car's occupancy plus braking distance,
 * spanning all lanes. */
View default_view(const TrafficSnapshot& ts, const GeometryTable& geom, const RoadConfig& road);

using Valuation = std::map<std::string, CarId>;

struct EvalContext {
  const TrafficSnapshot* ts = nullptr;
  const GeometryTable* geom = nullptr;
  Valuation valuation;
  std::set<CarId> scope; // cars visible to free / exists
  double tol = 1e-9;
};

/* MLSLS satisfaction of phi on the given view. */
bool evaluate(const EvalContext& cx, const View& view, const MlslsFormula& phi);

/* Proposition alphabet of an SCL specification: named ground MLSLS formulae
 * with stable ids (their index). */
struct PropositionAtlas {
  std::vector<std::pair<std::string, MlslsFormula>> entries;

  int add(const std::string& name, MlslsFormula f);
  std::optional<int> id_of(const std::string& name) const;
  const std::string& name_of(int id) const;
  const MlslsFormula& formula_of(int id) const;
  int size() const { return static_cast<int>(entries.size()); }
};

struct TraceOptions {
  double tol = 1e-9;
  TransitionOptions transitions;
};

/* The timed sequence of states m(TS0, w): maximal constant-truth phases of
 * all atlas formulae along run_word(ts0, w, horizon). Interval boundaries
 * are action timestamps plus every root of the quadratic boundary
 * conditions of the length atoms within each segment. States carry explicit
 * polarity for every atlas proposition. */
TimedStateSequence trace_states(const TrafficSnapshot& ts0, const TimedWord& w,
                                const PropositionAtlas& atlas, double horizon,
                                const GeometryTable& geom, const RoadConfig& road,
                                const TraceOptions& opt = {});

/* Constants k appearing in LengthCmp nodes of f. */
void collect_length_constants(const MlslsFormula& f, std::set<double>& out);

} // namespace motorway
