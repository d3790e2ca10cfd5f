#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace motorway {

struct sequence_error : std::runtime_error {
  explicit sequence_error(const std::string& m) : std::runtime_error(m) {}
};

/* Real interval with explicit border shapes. */
struct Interval {
  double lo = 0.0, hi = 0.0;
  bool lo_closed = true, hi_closed = true;

  static Interval point(double t) { return {t, t, true, true}; }
  static Interval open(double a, double b) { return {a, b, false, false}; }
  static Interval closed(double a, double b) { return {a, b, true, true}; }

  bool is_point(double tol = 1e-9) const { return hi - lo <= tol && lo_closed && hi_closed; }
  double length() const { return hi - lo; }
  bool contains(double t, double tol = 1e-9) const;
  bool valid() const;
  std::string to_string() const;
};

/* Truth of a subset of atlas propositions, by id. Propositions absent from
 * the map are unconstrained (unknown). */
struct LiteralState {
  std::map<int, bool> lits;

  void set(int id, bool v) { lits[id] = v; }
  std::optional<bool> truth(int id) const {
    auto it = lits.find(id);
    if (it == lits.end()) return std::nullopt;
    return it->second;
  }
  bool operator==(const LiteralState& o) const { return lits == o.lits; }
  std::string to_string() const;
};

struct TsPhase {
  LiteralState state;
  Interval iv;
};

/* Timed sequence of states: phases of constant proposition truth over
 * adjacent intervals. */
struct TimedStateSequence {
  std::vector<TsPhase> phases;

  bool empty() const { return phases.empty(); }
  double start_time() const;
  double end_time() const;
  /* End border shape: true when the last interval is right-closed. */
  bool end_closed() const;

  /* Adjacency: consecutive intervals share an endpoint with complementary
   * closedness; throws otherwise. */
  void validate(double tol = 1e-9) const;

  /* Canonical refinement alternating point and open phases. The first phase
   * becomes a point phase when the sequence starts closed. */
  TimedStateSequence refined(double tol = 1e-9) const;

  /* Merge adjacent phases with equal states. */
  TimedStateSequence fused(double tol = 1e-9) const;

  /* Restriction to [0, t]; the final phase is cut (border closed at t). */
  TimedStateSequence truncated(double t, double tol = 1e-9) const;

  /* State valid at time t. */
  const LiteralState& state_at(double t, double tol = 1e-9) const;

  std::string to_string() const;
};

} // namespace motorway
