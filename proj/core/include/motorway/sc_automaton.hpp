#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "motorway/scl.hpp"

namespace motorway {

/* One entry of the subformula closure, children by index (children precede
 * parents). Next/Last entries link to their clock. */
struct ClosureNode {
  SclKind kind;
  int prop = -1;   // atlas id for Prop
  int a = -1, b = -1;
  CmpOp op = CmpOp::EQ;
  int c = 0;
  int clock = -1;  // Next/Last
};

/* Constraint of Delta at a location: the clock value must satisfy
 * (op, c) exactly when `required` is true. */
struct DeltaConstraint {
  int clock;
  CmpOp op;
  int c;
  bool required;
};

/* State-Clock automaton: locations labelled with propositions (and, for
 * compiled automata, full closure truth), clock constraints per location,
 * explicit switch relation and a family of Buchi acceptance sets. */
struct ScAutomaton {
  std::vector<int> props; // atlas ids forming the alphabet 𝒫

  struct Clock {
    int arg = -1;          // closure index of the clock's argument (-1: anchor)
    bool future = false;   // prophecy vs history
    bool att_sensitive = false;
    std::string name;
  };
  std::vector<Clock> clocks;

  struct Location {
    uint64_t closure_bits = 0; // compiled automata
    uint64_t prop_truth = 0;   // bit i <-> props[i]
    uint64_t arg_truth = 0;    // bit j <-> clocks[j]'s argument true here
    std::vector<DeltaConstraint> delta;
    bool initial = false;
    std::string name;
  };
  std::vector<Location> locations;

  /* Switch relation between distinct locations (time flow within one
   * location is always allowed at the region level). */
  std::vector<std::vector<bool>> switch_ok;

  struct Family {
    std::vector<bool> locs;   // location-set part (Until / hand-authored)
    int prophecy_clock = -1;  // >= 0: finiteness obligation of that clock
  };
  std::vector<Family> families;

  /* Compiled-only tableau structure (empty for hand-authored automata). */
  std::vector<ClosureNode> closure;
  int root = -1;

  int cmax = 0;

  int num_locations() const { return static_cast<int>(locations.size()); }
  bool bit(int loc, int closure_idx) const {
    return (locations[loc].closure_bits >> closure_idx) & 1u;
  }
  bool arg_true(int loc, int clock) const {
    int a = clocks[clock].arg;
    if (a < 0) return false;
    return (locations[loc].arg_truth >> clock) & 1u;
  }
  std::vector<int> initial_locations() const;
  /* Truth of every alphabet proposition at a location, as literal pairs. */
  std::vector<std::pair<int, bool>> prop_literals(int loc) const;
};

/* Tableau construction: locations are the consistent subsets of the
 * subformula closure, switches follow the until/since unrolling rules,
 * Delta encodes the next/last obligations on prophecy/history clocks, and
 * acceptance has one set per until obligation plus one finiteness
 * obligation per prophecy clock. */
ScAutomaton compile(const SclFormula& psi, const PropositionAtlas& atlas);

/* Hand-authored automaton text:
 *   loc <name> props={p,q} delta="x_p<=2 & y_q=1" init accept=0,1
 *   edge <name> -> <name>
 * Clock variables are x_<prop> (history) and y_<prop> (prophecy).
 * accept=i puts the location into Buchi set i. */
ScAutomaton parse_sc_automaton(const std::string& text, const PropositionAtlas& atlas);

std::string describe(const ScAutomaton& a, const PropositionAtlas& atlas);

} // namespace motorway
