#include "motorway/timed_sequence.hpp"

#include <cmath>
#include <sstream>

namespace motorway {

bool Interval::contains(double t, double tol) const {
  if (t < lo - tol || t > hi + tol) return false;
  if (std::abs(t - lo) <= tol && !lo_closed && std::abs(t - hi) > tol) return false;
  if (std::abs(t - hi) <= tol && !hi_closed && std::abs(t - lo) > tol) return false;
  // degenerate: for a point interval both borders are closed by validity
  return true;
}

bool Interval::valid() const {
  if (!(lo <= hi)) return false;
  if (lo == hi && !(lo_closed && hi_closed)) return false;
  return true;
}

std::string Interval::to_string() const {
  std::ostringstream os;
  os << (lo_closed ? "[" : "(") << lo << "," << hi << (hi_closed ? "]" : ")");
  return os.str();
}

std::string LiteralState::to_string() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [id, v] : lits) {
    if (!first) os << ",";
    first = false;
    os << (v ? "+" : "-") << id;
  }
  os << "}";
  return os.str();
}

double TimedStateSequence::start_time() const {
  if (phases.empty()) throw sequence_error("empty sequence");
  return phases.front().iv.lo;
}

double TimedStateSequence::end_time() const {
  if (phases.empty()) throw sequence_error("empty sequence");
  return phases.back().iv.hi;
}

bool TimedStateSequence::end_closed() const {
  if (phases.empty()) throw sequence_error("empty sequence");
  return phases.back().iv.hi_closed;
}

void TimedStateSequence::validate(double tol) const {
  for (size_t i = 0; i < phases.size(); ++i) {
    const Interval& iv = phases[i].iv;
    if (!iv.valid()) throw sequence_error("invalid interval " + iv.to_string());
    if (i > 0) {
      const Interval& prev = phases[i - 1].iv;
      if (std::abs(prev.hi - iv.lo) > tol)
        throw sequence_error("intervals not adjacent: " + prev.to_string() + " then " + iv.to_string());
      if (prev.hi_closed == iv.lo_closed)
        throw sequence_error("border shapes not complementary at t=" + std::to_string(iv.lo));
    }
  }
}

TimedStateSequence TimedStateSequence::refined(double tol) const {
  validate(tol);
  TimedStateSequence out;
  for (const auto& ph : phases) {
    const Interval& iv = ph.iv;
    if (iv.is_point(tol)) {
      out.phases.push_back(ph);
      continue;
    }
    if (iv.lo_closed) out.phases.push_back({ph.state, Interval::point(iv.lo)});
    out.phases.push_back({ph.state, Interval::open(iv.lo, iv.hi)});
    if (iv.hi_closed) out.phases.push_back({ph.state, Interval::point(iv.hi)});
  }
  return out;
}

TimedStateSequence TimedStateSequence::fused(double tol) const {
  TimedStateSequence out;
  for (const auto& ph : phases) {
    if (!out.phases.empty() && out.phases.back().state == ph.state &&
        std::abs(out.phases.back().iv.hi - ph.iv.lo) <= tol &&
        out.phases.back().iv.hi_closed != ph.iv.lo_closed) {
      out.phases.back().iv.hi = ph.iv.hi;
      out.phases.back().iv.hi_closed = ph.iv.hi_closed;
    } else {
      out.phases.push_back(ph);
    }
  }
  return out;
}

TimedStateSequence TimedStateSequence::truncated(double t, double tol) const {
  TimedStateSequence out;
  for (const auto& ph : phases) {
    if (ph.iv.lo > t + tol) break;
    TsPhase p = ph;
    if (p.iv.hi > t) {
      p.iv.hi = t;
      p.iv.hi_closed = true;
      if (p.iv.hi - p.iv.lo <= tol) {
        p.iv = Interval::point(p.iv.lo);
        if (!ph.iv.lo_closed) continue; // degenerate open sliver
      }
    }
    out.phases.push_back(p);
  }
  return out;
}

const LiteralState& TimedStateSequence::state_at(double t, double tol) const {
  // prefer point phases on hits
  for (const auto& ph : phases)
    if (ph.iv.is_point(tol) && std::abs(ph.iv.lo - t) <= tol) return ph.state;
  for (const auto& ph : phases)
    if (ph.iv.contains(t, tol)) return ph.state;
  throw sequence_error("time " + std::to_string(t) + " not covered by sequence");
}

std::string TimedStateSequence::to_string() const {
  std::ostringstream os;
  os << "<";
  for (size_t i = 0; i < phases.size(); ++i) {
    if (i) os << ",";
    os << "(" << phases[i].state.to_string() << "," << phases[i].iv.to_string() << ")";
  }
  os << ">";
  return os.str();
}

} // namespace motorway
