#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace motorway {

using CarId = std::string;
using Lane = int;

struct model_error : std::runtime_error {
  explicit model_error(const std::string& msg) : std::runtime_error(msg) {}
};

/* Fixed road layout: lanes 1..lane_count, one driving direction, and the
 * finite set of car identifiers present on it. */
struct RoadConfig {
  int lane_count = 1;
  std::vector<CarId> car_ids;

  bool has_car(const CarId& c) const;
  void validate() const;
};

/* Physical length and braking distance of one car. The sensor function of
 * the original model is replaced by an explicit table of these. */
struct CarGeometry {
  double size = 0.0;
  double braking_distance = 0.0;
};

using GeometryTable = std::map<CarId, CarGeometry>;

/* Bounds on the dynamic behaviour along the lanes. Speeds live in
 * [0, spd_max], accelerations in [acc_min, acc_max]. */
struct DynamicBounds {
  double acc_min = -10.0;
  double acc_max = 5.0;
  double spd_max = 13.0;

  void validate() const;
  bool speed_ok(double v, double tol = 1e-9) const {
    return v >= -tol && v <= spd_max + tol;
  }
  bool acc_ok(double a, double tol = 1e-9) const {
    return a >= acc_min - tol && a <= acc_max + tol;
  }
};

/* The situation on the road at one instant: reserved lanes, claimed lane,
 * rear-end position, speed and acceleration of every car. */
struct TrafficSnapshot {
  std::map<CarId, std::set<Lane>> res;
  std::map<CarId, std::set<Lane>> clm;
  std::map<CarId, double> pos;
  std::map<CarId, double> spd;
  std::map<CarId, double> acc;

  const std::set<Lane>& res_of(const CarId& c) const;
  const std::set<Lane>& clm_of(const CarId& c) const;
  double pos_of(const CarId& c) const;
  double spd_of(const CarId& c) const;
  double acc_of(const CarId& c) const;

  std::vector<CarId> cars() const;

  /* Sanity conditions: every car present in all five maps, 1 <= |res| <= 2,
   * |clm| <= 1, res and clm disjoint, lanes within the road. */
  void check_sanity(const RoadConfig& road) const;
};

enum class ActionKind { Claim, WithdrawClaim, Reserve, WithdrawReserve, SetAcc };

/* One discrete or acceleration action of a single car. */
struct Action {
  ActionKind kind;
  CarId car;
  Lane lane = 0;      // Claim / WithdrawReserve
  double value = 0.0; // SetAcc

  static Action claim(CarId c, Lane n) { return {ActionKind::Claim, std::move(c), n, 0.0}; }
  static Action withdraw_claim(CarId c) { return {ActionKind::WithdrawClaim, std::move(c), 0, 0.0}; }
  static Action reserve(CarId c) { return {ActionKind::Reserve, std::move(c), 0, 0.0}; }
  static Action withdraw_reserve(CarId c, Lane n) { return {ActionKind::WithdrawReserve, std::move(c), n, 0.0}; }
  static Action set_acc(CarId c, double a) { return {ActionKind::SetAcc, std::move(c), 0, a}; }

  std::string to_string() const;
};

/* Sequence of time-stamped actions with non-decreasing timestamps. */
struct TimedWord {
  std::vector<std::pair<Action, double>> entries;

  void push(Action a, double t);
  double last_time() const;
  void validate() const;
  /* Entries of a single car, timestamps kept. */
  TimedWord restricted_to(const CarId& c) const;
  std::string to_string() const;
};

/* A materialised transition sequence: snapshots at time 0, at every action
 * timestamp and at the horizon. */
struct Evolution {
  /* (snapshot, time); strictly increasing times except that several actions
   * at one timestamp leave a single sampled snapshot (post-actions). */
  std::vector<std::pair<TrafficSnapshot, double>> samples;

  const TrafficSnapshot& at_end() const { return samples.back().first; }
  /* Snapshot valid at absolute time t (segments evolve with pass_time). */
  TrafficSnapshot at(double t) const;
  double end_time() const { return samples.back().second; }
};

struct TransitionOptions {
  bool check_discrete_sanity = true; // claim adjacency, reserve merging rules
};

/* Kinematic time passage: pos' = pos + spd t + 1/2 acc t^2, spd' = spd + acc t.
 * res, clm, acc unchanged. Speeds are not clamped here; bounds are a
 * property of the decision problems, not of the transition semantics. */
TrafficSnapshot pass_time(const TrafficSnapshot& ts, double t);

TrafficSnapshot apply_action(const TrafficSnapshot& ts, const Action& a,
                             const RoadConfig& road,
                             const TransitionOptions& opt = {});

/* Alternates pass_time segments and actions of w; final snapshot at horizon.
 * Actions sharing a timestamp apply in word order. */
Evolution run_word(const TrafficSnapshot& ts0, const TimedWord& w, double horizon,
                   const RoadConfig& road, const TransitionOptions& opt = {});

/* Free space between rear car's front end and front car's rear end; negative
 * when overlapping. */
double gap(const TrafficSnapshot& ts, const CarId& rear, const CarId& front,
           const GeometryTable& geom);

} // namespace motorway
