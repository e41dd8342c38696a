// Copyright 2026 The facsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "facsim/case_engine.hpp"
#include "facsim/common.hpp"
#include "facsim/config.hpp"
#include "facsim/event_log.hpp"
#include "facsim/io.hpp"
#include "facsim/population.hpp"
#include "facsim/rng.hpp"
#include "facsim/seirs.hpp"
#include "facsim/visitation.hpp"
#include "facsim/workforce.hpp"
#include "facsim/world.hpp"

namespace facsim {

struct ForecastBundle {
  std::vector<SeirsState> day0;           // per county, estimated the day before the start date
  std::vector<CountyForecast> forecasts;  // per county, `horizon` days from the start date
};

/// Day-0 compartments for every county, estimated as of the day before the
/// start date (the E estimate reads the start date's infections).
inline std::vector<SeirsState> estimate_day0_states(const RunConfig& cfg, const Inputs& in) {
  std::vector<SeirsState> out;
  const Date as_of = cfg.start_date.plus_days(-1);
  for (const auto& h : in.case_histories()) {
    if (h.last_date() < cfg.start_date)
      throw ConfigError("county " + std::to_string(h.county) + ": case history ends " + h.last_date().iso() +
                        ", before the start date " + cfg.start_date.iso());
    out.push_back(estimate_compartments(h, cfg.seirs, as_of));
  }
  return out;
}

inline ForecastBundle compute_forecasts(const RunConfig& cfg, const Inputs& in) {
  cfg.validate();
  ForecastBundle b;
  b.day0 = estimate_day0_states(cfg, in);
  const auto histories = in.case_histories();
  for (std::size_t c = 0; c < histories.size(); ++c) {
    const auto& h = histories[c];
    if (cfg.forecast_source == ForecastSource::Seirs) {
      b.forecasts.push_back(run_seirs(b.day0[c], cfg.seirs, h.population, cfg.horizon, h.county));
      continue;
    }
    // Historical: the smoothed, multiplied case series over the run window.
    const Date last = cfg.start_date.plus_days(cfg.horizon - 1);
    if (h.last_date() < last)
      throw ConfigError("county " + std::to_string(h.county) + ": historical forecast needs cases through " +
                        last.iso());
    const auto infections = estimate_infections(smooth_and_scale(h.reported, cfg.seirs.smoothing_window),
                                                h.first_date, cfg.seirs);
    CountyForecast f;
    f.county = h.county;
    const auto first = static_cast<std::size_t>(cfg.start_date.days_since(h.first_date));
    f.infections.assign(infections.begin() + static_cast<std::ptrdiff_t>(first),
                        infections.begin() + static_cast<std::ptrdiff_t>(first) + cfg.horizon);
    b.forecasts.push_back(std::move(f));
  }
  return b;
}

enum class ActionKind : std::uint8_t { RecoveryBatch, NewCase, Visitation, Attendance };

/// `ref` is the county for NewCase, the visitor-assignment index for
/// Visitation and the HCW index for Attendance.
struct Action {
  ActionKind kind = ActionKind::RecoveryBatch;
  std::int64_t ref = -1;
  AgentId agent = -1;

  friend bool operator==(const Action&, const Action&) = default;
};

using ActionQueue = std::vector<Action>;

struct DailyQuota {
  CountyId county = 0;
  double infections = 0.0;      // forecast
  double potential_cases = 0.0;  // inflated for blocked exposures
  std::int64_t exposures = 0;    // stochastically rounded
};

/// One simulation run. Inputs are read once; all state lives in the world
/// and the event log.
class Simulation {
 public:
  Simulation(RunConfig cfg, Inputs inputs)
      : cfg_(std::move(cfg)), inputs_(std::move(inputs)), engine_(cfg_.cases) {
    cfg_.validate();
  }

  /// Replace the SEIRS output (must be called before initialize()).
  void set_forecasts(std::vector<CountyForecast> f) { forecasts_override_ = std::move(f); }
  void set_day0_states(std::vector<SeirsState> s) { day0_override_ = std::move(s); }

  void initialize() {
    if (initialized_) throw std::logic_error("simulation already initialized");
    const auto seed = cfg_.seed;
    const std::size_t n_counties = inputs_.world.counties.size();

    if (!forecasts_override_ || !day0_override_) {
      auto b = compute_forecasts(cfg_, inputs_);
      forecasts_ = forecasts_override_ ? *forecasts_override_ : std::move(b.forecasts);
      day0_ = day0_override_ ? *day0_override_ : std::move(b.day0);
    } else {
      forecasts_ = *forecasts_override_;
      day0_ = *day0_override_;
    }
    if (forecasts_.size() != n_counties || day0_.size() != n_counties)
      throw ConfigError("need one forecast and one day-0 state per county");
    for (const auto& f : forecasts_)
      if (f.infections.size() < static_cast<std::size_t>(cfg_.horizon))
        throw ConfigError("forecast for county " + std::to_string(f.county) + " is shorter than the horizon");

    auto world_rng = RngStream::derive(seed, "world", 0);
    world_ = synthesize_world(inputs_.world, world_rng);

    targets_ = compute_staff_targets(inputs_.pbj, world_, cfg_.workforce);
    auto hcw_rng = RngStream::derive(seed, "workforce", 0);
    assign_hcws(world_, targets_, cfg_.workforce, hcw_rng);

    const auto rates = inputs_.vaccination_rates(cfg_);
    auto vacc_rng = RngStream::derive(seed, "vaccination", 0);
    assign_vaccinations(world_, rates, vacc_rng);
    auto imm_rng = RngStream::derive(seed, "immunity", 0);
    assign_vaccine_immunity(world_, cfg_.cases.v_eff, imm_rng);

    county_vacc_.assign(n_counties, 0.0);
    for (std::size_t c = 0; c < n_counties; ++c)
      county_vacc_[c] = rates.county_rate(static_cast<CountyId>(c), world_.county_age_counts(static_cast<CountyId>(c)));

    auto hosp_rng = RngStream::derive(seed, "hospital_init", 0);
    init_covid_hospitalizations(world_, cfg_.hospital_init.scaled(world_.scale_factor), cfg_.cases.los, log_,
                                hosp_rng);
    auto inf_rng = RngStream::derive(seed, "community_init", 0);
    init_community_infections(world_, day0_, cfg_.cases, log_, inf_rng);

    auto vis_rng = RngStream::derive(seed, "visitors", 0);
    const CommunityIndex index(world_);
    for (AgentId r : world_.nh_residents()) {
      VisitorAssignment va = assign_visitors(r, world_, index, cfg_.visitation, vis_rng);
      const Agent& res = world_.agent(r);
      Event e = agent_event(EventKind::VisitorsAssigned, 0, res);
      e.facility = va.facility;
      e.subject = r;
      e.code = va.drawn_count;
      log_.append(e);
      for (const auto& v : va.visitors) {
        Event x = agent_event(EventKind::VisitorAssigned, 0, world_.agent(v.agent));
        x.facility = va.facility;
        x.subject = r;
        x.code = v.index;
        x.value = v.daily_probability;
        log_.append(x);
      }
      if (static_cast<int>(va.visitors.size()) < va.drawn_count) {
        Event s = agent_event(EventKind::VisitorShortfall, 0, res);
        s.facility = va.facility;
        s.code = va.drawn_count - static_cast<int>(va.visitors.size());
        log_.append(s);
      }
      visitors_.push_back(std::move(va));
    }
    world_.visitors = visitors_;

    const auto [acute, icu] = covid_census(world_);
    Event c;
    c.kind = EventKind::InitialCensus;
    c.value = static_cast<double>(acute);
    c.value2 = static_cast<double>(icu);
    log_.append(c);

    world_.initialized = true;
    initialized_ = true;
  }

  /// Exposures to create in each county today. Pure given (seed, day).
  std::vector<DailyQuota> daily_quotas(int day) const {
    require_initialized();
    auto rng = RngStream::derive(cfg_.seed, "quota", day);
    std::vector<DailyQuota> out;
    for (std::size_t c = 0; c < forecasts_.size(); ++c) {
      DailyQuota q;
      q.county = static_cast<CountyId>(c);
      q.infections = forecasts_[c].infections[static_cast<std::size_t>(day)];
      q.potential_cases = inflate_to_exposures(q.infections, county_vacc_[c], cfg_.cases.v_eff);
      q.exposures = stochastic_round(q.potential_cases, rng);
      out.push_back(q);
    }
    return out;
  }

  /// One recovery batch, one action per exposure, one visitation action per
  /// current NH resident and one attendance action per HCW, unshuffled.
  ActionQueue enqueue_daily_actions(int day) const {
    require_initialized();
    if (day < 0 || day >= cfg_.horizon)
      throw ConfigError("day " + std::to_string(day) + " outside the horizon");
    ActionQueue q;
    q.push_back({ActionKind::RecoveryBatch, -1, -1});
    for (const auto& d : daily_quotas(day))
      for (std::int64_t k = 0; k < d.exposures; ++k) q.push_back({ActionKind::NewCase, d.county, -1});
    for (std::size_t i = 0; i < visitors_.size(); ++i) {
      const Agent& r = world_.agent(visitors_[i].resident);
      if (r.alive && r.location.kind == LocationKind::NursingHome)
        q.push_back({ActionKind::Visitation, static_cast<std::int64_t>(i), r.id});
    }
    for (std::size_t i = 0; i < world_.hcws.size(); ++i)
      q.push_back({ActionKind::Attendance, static_cast<std::int64_t>(i), world_.hcws[i].agent});
    return q;
  }

  void shuffle_actions(ActionQueue& q, int day) const {
    auto rng = RngStream::derive(cfg_.seed, "shuffle", day);
    rng.shuffle(q);
  }

  /// Executes `q` in order for `day`.
  void execute(const ActionQueue& q, int day) {
    require_initialized();
    auto case_rng = RngStream::derive(cfg_.seed, "cases", day);
    auto visit_rng = RngStream::derive(cfg_.seed, "visits", day);
    auto work_rng = RngStream::derive(cfg_.seed, "attendance", day);
    for (const Action& a : q) {
      switch (a.kind) {
        case ActionKind::RecoveryBatch:
          engine_.process_recoveries(world_, day, log_);
          break;
        case ActionKind::NewCase:
          engine_.expose(static_cast<CountyId>(a.ref), day, world_, log_, case_rng);
          break;
        case ActionKind::Visitation:
          run_visitation(a, day, visit_rng);
          break;
        case ActionKind::Attendance:
          run_attendance(a, day, work_rng);
          break;
      }
    }
  }

  /// Runs the current day and advances the clock.
  void step() {
    require_initialized();
    if (day_ >= cfg_.horizon) throw std::logic_error("simulation already reached its horizon");
    for (const auto& d : daily_quotas(day_)) {
      Event e;
      e.day = day_;
      e.kind = EventKind::ExposureQuota;
      e.county = d.county;
      e.code = d.exposures;
      e.value = d.potential_cases;
      e.value2 = d.infections;
      log_.append(e);
    }
    ActionQueue q = enqueue_daily_actions(day_);
    shuffle_actions(q, day_);
    execute(q, day_);
    engine_.end_of_day(world_);
    const auto [acute, icu] = covid_census(world_);
    Event c;
    c.day = day_;
    c.kind = EventKind::Census;
    c.value = static_cast<double>(acute);
    c.value2 = static_cast<double>(icu);
    log_.append(c);
    ++day_;
  }

  void run() {
    if (!initialized_) initialize();
    while (day_ < cfg_.horizon) step();
  }

  const RunConfig& config() const { return cfg_; }
  const Inputs& inputs() const { return inputs_; }
  const World& world() const { return world_; }
  World& world() { return world_; }
  const EventLog& log() const { return log_; }
  EventLog& log() { return log_; }
  const std::vector<CountyForecast>& forecasts() const { return forecasts_; }
  const std::vector<SeirsState>& day0_states() const { return day0_; }
  const std::vector<FacilityStaffTarget>& staff_targets() const { return targets_; }
  const std::vector<double>& county_vaccination() const { return county_vacc_; }
  int day() const { return day_; }
  bool initialized() const { return initialized_; }

 private:
  void require_initialized() const {
    if (!initialized_) throw ConfigError("world is not initialized");
  }

  void log_skipped(const Action& a, int day) {
    Event e;
    e.day = day;
    e.kind = EventKind::Skipped;
    e.agent = a.agent;
    e.code = static_cast<std::int64_t>(a.kind);
    log_.append(e);
  }

  void run_visitation(const Action& a, int day, RngStream& rng) {
    const Agent* r = world_.find(a.agent);
    if (!r || !r->alive || r->location.kind != LocationKind::NursingHome) {
      log_skipped(a, day);
      return;
    }
    const auto& va = visitors_[static_cast<std::size_t>(a.ref)];
    for (const auto& o : simulate_visits(va, cfg_.visit_policy, cfg_.visitation, day, world_, tracker_, rng)) {
      Event e = agent_event(o.barrier == 0 ? EventKind::Visit : EventKind::VisitBlocked, day, world_.agent(o.visitor));
      e.facility = va.facility;
      e.subject = r->id;
      e.subject_state = code_of(r->state);
      e.code = o.barrier;
      e.value = o.visitor_index;
      log_.append(e);
    }
  }

  void run_attendance(const Action& a, int day, RngStream& rng) {
    const Agent* ag = world_.find(a.agent);
    if (!ag) {
      log_skipped(a, day);
      return;
    }
    const auto& h = world_.hcws[static_cast<std::size_t>(a.ref)];
    const AttendanceOutcome o = simulate_attendance(h, *ag, cfg_.workforce, rng);
    Event e = agent_event(o.attended ? EventKind::Attendance : EventKind::Absence, day, *ag);
    e.facility = o.facility;
    e.subject = static_cast<AgentId>(index_of(h.type));
    if (o.attended) e.value = o.hours;
    else e.code = static_cast<std::int64_t>(*o.reason);
    log_.append(e);
  }

  RunConfig cfg_;
  Inputs inputs_;
  CaseEngine engine_;
  World world_;
  EventLog log_;
  std::optional<std::vector<CountyForecast>> forecasts_override_;
  std::optional<std::vector<SeirsState>> day0_override_;
  std::vector<CountyForecast> forecasts_;
  std::vector<SeirsState> day0_;
  std::vector<double> county_vacc_;
  std::vector<FacilityStaffTarget> targets_;
  std::vector<VisitorAssignment> visitors_;
  VisitTracker tracker_;
  bool initialized_ = false;
  int day_ = 0;
};

}  // namespace facsim
