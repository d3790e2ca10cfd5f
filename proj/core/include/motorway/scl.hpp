#pragma once

#include <memory>
#include <string>
#include <vector>

#include "motorway/mlsls.hpp"

namespace motorway {

enum class SclKind { Prop, Or, Not, Until, Since, Next, Last };

struct SclNode;
using SclFormula = std::shared_ptr<const SclNode>;

/* State-Clock Logic over an alphabet of proposition ids. Next carries the
 * time-until-next operator, Last time-since-last; constants are naturals. */
struct SclNode {
  SclKind kind;
  int prop = -1;       // Prop
  CmpOp op = CmpOp::EQ; // Next / Last
  int c = 0;            // Next / Last
  SclFormula child_a, child_b;

  static SclFormula prop(int id);
  static SclFormula disj(SclFormula a, SclFormula b);
  static SclFormula negate(SclFormula a);
  static SclFormula conj(SclFormula a, SclFormula b); // !(!a | !b)
  static SclFormula implies(SclFormula a, SclFormula b); // !a | b
  static SclFormula until(SclFormula a, SclFormula b);
  static SclFormula since(SclFormula a, SclFormula b);
  static SclFormula next(CmpOp op, int c, SclFormula a);
  static SclFormula last(CmpOp op, int c, SclFormula a);
};

bool scl_equal(const SclFormula& a, const SclFormula& b);

/* Syntax: proposition names, `!`, `&`, `|`, `->`, `U`, `S`,
 * `next[~c] psi`, `last[~c] psi`, parentheses. Precedence:
 * ! and next/last > & > | > -> > U/S (right-associative).
 * `&` and `->` are sugar over Or/Not. Names resolve in the atlas. */
SclFormula parse_scl(const std::string& text, const PropositionAtlas& atlas);
std::string print_scl(const SclFormula& f, const PropositionAtlas& atlas);

/* Largest constant appearing under next/last (0 when none). */
int max_constant(const SclFormula& f);

} // namespace motorway
