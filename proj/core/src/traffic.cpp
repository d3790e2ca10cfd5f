#include "motorway/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace motorway {

bool RoadConfig::has_car(const CarId& c) const {
  return std::find(car_ids.begin(), car_ids.end(), c) != car_ids.end();
}

void RoadConfig::validate() const {
  if (lane_count < 1) throw model_error("road needs at least one lane");
  if (car_ids.empty()) throw model_error("road needs at least one car");
  std::set<CarId> seen;
  for (const auto& c : car_ids) {
    if (!seen.insert(c).second) throw model_error("duplicate car id " + c);
  }
}

void DynamicBounds::validate() const {
  if (!(acc_min < 0.0)) throw model_error("acc_min must be negative");
  if (!(acc_max > 0.0)) throw model_error("acc_max must be positive");
  if (!(spd_max > 0.0)) throw model_error("spd_max must be positive");
}

namespace {
template <typename M>
const typename M::mapped_type& lookup(const M& m, const CarId& c, const char* what) {
  auto it = m.find(c);
  if (it == m.end()) throw model_error(std::string("unknown car ") + c + " in " + what);
  return it->second;
}
} // namespace

const std::set<Lane>& TrafficSnapshot::res_of(const CarId& c) const { return lookup(res, c, "res"); }
const std::set<Lane>& TrafficSnapshot::clm_of(const CarId& c) const { return lookup(clm, c, "clm"); }
double TrafficSnapshot::pos_of(const CarId& c) const { return lookup(pos, c, "pos"); }
double TrafficSnapshot::spd_of(const CarId& c) const { return lookup(spd, c, "spd"); }
double TrafficSnapshot::acc_of(const CarId& c) const { return lookup(acc, c, "acc"); }

std::vector<CarId> TrafficSnapshot::cars() const {
  std::vector<CarId> out;
  out.reserve(pos.size());
  for (const auto& [c, _] : pos) out.push_back(c);
  return out;
}

void TrafficSnapshot::check_sanity(const RoadConfig& road) const {
  for (const auto& c : road.car_ids) {
    const auto& r = res_of(c);
    const auto& cl = clm_of(c);
    pos_of(c);
    spd_of(c);
    acc_of(c);
    if (r.empty() || r.size() > 2)
      throw model_error("car " + c + ": |res| must be 1 or 2");
    if (cl.size() > 1) throw model_error("car " + c + ": |clm| must be <= 1");
    for (Lane n : r) {
      if (cl.count(n)) throw model_error("car " + c + ": res and clm overlap");
      if (n < 1 || n > road.lane_count)
        throw model_error("car " + c + ": lane out of range");
    }
    for (Lane n : cl) {
      if (n < 1 || n > road.lane_count)
        throw model_error("car " + c + ": claimed lane out of range");
    }
  }
}

std::string Action::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case ActionKind::Claim: os << "c(" << car << "," << lane << ")"; break;
    case ActionKind::WithdrawClaim: os << "wd_c(" << car << ")"; break;
    case ActionKind::Reserve: os << "r(" << car << ")"; break;
    case ActionKind::WithdrawReserve: os << "wd_r(" << car << "," << lane << ")"; break;
    case ActionKind::SetAcc: os << "acc(" << car << "," << value << ")"; break;
  }
  return os.str();
}

void TimedWord::push(Action a, double t) {
  if (!entries.empty() && t < entries.back().second - 1e-12)
    throw model_error("timed word timestamps must be non-decreasing");
  entries.emplace_back(std::move(a), t);
}

double TimedWord::last_time() const {
  return entries.empty() ? 0.0 : entries.back().second;
}

void TimedWord::validate() const {
  for (size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].second < entries[i - 1].second - 1e-12)
      throw model_error("timed word timestamps must be non-decreasing");
  }
  for (const auto& [a, t] : entries) {
    if (t < 0.0) throw model_error("timed word timestamps must be non-negative");
    if (!std::isfinite(t)) throw model_error("timed word timestamp not finite");
  }
}

TimedWord TimedWord::restricted_to(const CarId& c) const {
  TimedWord out;
  for (const auto& [a, t] : entries)
    if (a.car == c) out.entries.emplace_back(a, t);
  return out;
}

std::string TimedWord::to_string() const {
  std::ostringstream os;
  os << "<";
  for (size_t i = 0; i < entries.size(); ++i) {
    if (i) os << ",";
    os << "(" << entries[i].first.to_string() << "," << entries[i].second << ")";
  }
  os << ">";
  return os.str();
}

TrafficSnapshot pass_time(const TrafficSnapshot& ts, double t) {
  if (t < 0.0 || !std::isfinite(t)) throw model_error("pass_time: t must be >= 0 and finite");
  TrafficSnapshot out = ts;
  for (auto& [c, p] : out.pos) {
    const double v = ts.spd_of(c);
    const double a = ts.acc_of(c);
    p = p + v * t + 0.5 * a * t * t;
    out.spd[c] = v + a * t;
  }
  return out;
}

TrafficSnapshot apply_action(const TrafficSnapshot& ts, const Action& act,
                             const RoadConfig& road, const TransitionOptions& opt) {
  if (!road.has_car(act.car)) throw model_error("apply_action: unknown car " + act.car);
  TrafficSnapshot out = ts;
  switch (act.kind) {
    case ActionKind::SetAcc:
      if (!std::isfinite(act.value)) throw model_error("acc value must be finite");
      out.acc[act.car] = act.value;
      break;
    case ActionKind::Claim: {
      if (act.lane < 1 || act.lane > road.lane_count)
        throw model_error("claim: lane out of range");
      if (opt.check_discrete_sanity) {
        const auto& r = ts.res_of(act.car);
        if (r.count(act.lane)) throw model_error("claim: lane already reserved");
        bool adjacent = r.count(act.lane - 1) || r.count(act.lane + 1);
        if (!adjacent) throw model_error("claim: lane not adjacent to reservation");
      }
      out.clm[act.car] = {act.lane};
      break;
    }
    case ActionKind::WithdrawClaim:
      out.clm[act.car] = {};
      break;
    case ActionKind::Reserve: {
      const auto& cl = ts.clm_of(act.car);
      if (cl.empty()) throw model_error("reserve: no claimed lane");
      auto r = ts.res_of(act.car);
      r.insert(cl.begin(), cl.end());
      if (opt.check_discrete_sanity && r.size() > 2)
        throw model_error("reserve: reservation would span more than two lanes");
      out.res[act.car] = std::move(r);
      out.clm[act.car] = {};
      break;
    }
    case ActionKind::WithdrawReserve: {
      const auto& r = ts.res_of(act.car);
      if (!r.count(act.lane))
        throw model_error("withdraw_reserve: lane not in reservation");
      out.res[act.car] = {act.lane};
      break;
    }
  }
  return out;
}

TrafficSnapshot Evolution::at(double t) const {
  if (samples.empty()) throw model_error("empty evolution");
  if (t < samples.front().second - 1e-12 || t > samples.back().second + 1e-12)
    throw model_error("time outside evolution span");
  // last sample at or before t; ties resolve to the post-action snapshot
  size_t i = 0;
  for (size_t k = 0; k < samples.size(); ++k)
    if (samples[k].second <= t + 1e-12) i = k;
  return pass_time(samples[i].first, std::max(0.0, t - samples[i].second));
}

Evolution run_word(const TrafficSnapshot& ts0, const TimedWord& w, double horizon,
                   const RoadConfig& road, const TransitionOptions& opt) {
  w.validate();
  if (horizon < w.last_time() - 1e-12)
    throw model_error("run_word: horizon before last action timestamp");
  Evolution ev;
  TrafficSnapshot cur = ts0;
  double now = 0.0;
  ev.samples.emplace_back(cur, now);
  for (size_t i = 0; i < w.entries.size(); ++i) {
    const auto& [a, t] = w.entries[i];
    if (t > now) {
      cur = pass_time(cur, t - now);
      now = t;
      ev.samples.emplace_back(cur, now);
    }
    try {
      cur = apply_action(cur, a, road, opt);
    } catch (const model_error& e) {
      throw model_error("run_word: action #" + std::to_string(i) + " (" +
                        a.to_string() + "): " + e.what());
    }
    // replace the sample at `now` with the post-action snapshot
    if (!ev.samples.empty() && std::abs(ev.samples.back().second - now) < 1e-12)
      ev.samples.back().first = cur;
    else
      ev.samples.emplace_back(cur, now);
  }
  if (horizon > now) {
    cur = pass_time(cur, horizon - now);
    ev.samples.emplace_back(cur, horizon);
  }
  return ev;
}

double gap(const TrafficSnapshot& ts, const CarId& rear, const CarId& front,
           const GeometryTable& geom) {
  auto it = geom.find(rear);
  if (it == geom.end()) throw model_error("gap: no geometry for car " + rear);
  return ts.pos_of(front) - (ts.pos_of(rear) + it->second.size);
}

} // namespace motorway
