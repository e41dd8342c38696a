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

// End-to-end acceptance checks. Every number compared here is recomputed
// from the event log, the inputs or a closed form; the library's own
// validation code is deliberately not used.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "facsim/facsim.hpp"

using namespace facsim;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double binom_sd(double n, double p) { return std::sqrt(n * p * (1.0 - p)); }

RunConfig with_age2_row(RunConfig c) {
  if (!c.cases.severity.reported[0][2]) c.cases.severity.reported[0][2] = SeverityRow{0.05, 0.80, 0.12, 0.03};
  return c;
}

SynthBundle desk_bundle() {
  const auto spec = synth_spec_from_json(json::parse(read_text_file(FACSIM_SOURCE_DIR "/configs/desk_synth.json")));
  auto rng = RngStream::derive(1, "synth", 0);
  return synth_inputs(spec, rng);
}

// Zero forecasts and a fully susceptible start.
void quiet(Simulation& sim, std::size_t counties, int horizon) {
  std::vector<CountyForecast> f;
  for (std::size_t c = 0; c < counties; ++c)
    f.push_back({static_cast<CountyId>(c), std::vector<double>(static_cast<std::size_t>(horizon), 0.0)});
  sim.set_forecasts(f);
  sim.set_day0_states(std::vector<SeirsState>(counties));
}

// ------------------------------------------------------------------ 1

Outcome pattern1(const SynthBundle& desk) {
  std::string detail;
  bool pass = true;
  for (double v_eff : {0.0, 0.24}) {
    RunConfig cfg = desk.config;
    cfg.cases.v_eff = v_eff;
    Simulation sim(cfg, desk.inputs);
    sim.run();
    std::map<std::pair<CountyId, int>, double> forecast;
    std::map<std::pair<CountyId, int>, std::int64_t> cases, blocked_day, shortfall;
    std::map<CountyId, std::int64_t> blocked, vacc_cases;
    for (const auto& e : sim.log()) {
      const auto k = std::make_pair(e.county, e.day);
      if (e.kind == EventKind::ExposureQuota) forecast[k] = e.value2;
      if (e.kind == EventKind::Case) {
        ++cases[k];
        if (e.vaccinated == 1) ++vacc_cases[e.county];
      }
      if (e.kind == EventKind::BlockedExposure) {
        ++blocked[e.county];
        ++blocked_day[k];
      }
      if (e.kind == EventKind::ExposureShortfall) ++shortfall[k];
    }
    if (v_eff == 0.0) {
      // modeled cases are the forecast rounded to a neighbouring integer
      int bad = 0;
      for (const auto& [k, f] : forecast) {
        const auto n = cases[k];
        if (std::abs(static_cast<double>(n) - f) >= 1.0 || blocked_day[k] != 0 || shortfall[k] != 0) ++bad;
      }
      pass &= bad == 0 && !forecast.empty();
      detail += std::to_string(forecast.size()) + " county-days, " + std::to_string(bad) + " off forecast; ";
    } else {
      // Each vaccinated pick is blocked with probability v_eff.
      double worst = 0.0;
      for (const auto& [c, b] : blocked) {
        const double n = static_cast<double>(b + vacc_cases[c]);
        const double z = std::abs(static_cast<double>(b) - n * v_eff) / binom_sd(n, v_eff);
        worst = std::max(worst, z);
      }
      pass &= worst <= 3.0 && blocked.size() == desk.inputs.world.counties.size();
      detail += fmt("V_eff 0.24 worst |z| %.2f over %g counties", worst, static_cast<double>(blocked.size()));
    }
  }
  return {pass, detail};
}

// ------------------------------------------------------------------ 2, 3

// A large, barely vaccinated world fed fixed forecasts so that each age
// group yields well over 5,000 reported non-vaccinated cases.
struct BigRun {
  std::array<std::array<std::int64_t, 4>, kNumAgeGroups> reported_nv{};
  std::int64_t total = 0, reported = 0;
};

BigRun big_run() {
  SynthSpec spec;
  spec.start_date = Date(2021, 12, 15);
  spec.history_days = 120;
  spec.scale_factor = 0.04;
  spec.bbox = {33.0, 37.0, -82.0, -76.0};
  spec.nh_capacity_min = 40;
  spec.nh_capacity_max = 60;
  spec.vaccination_targets = {0.02, 0.02, 0.02};
  spec.vaccination_spread = 0.0;
  for (int c = 0; c < 5; ++c) {
    SynthCounty k;
    k.name = "C" + std::to_string(c);
    k.population = 80000;
    k.age_shares = {0.45, 0.45, 0.10};
    k.lat = 35.0 + 0.2 * c;
    k.lon = -79.0;
    k.nursing_homes = 2;
    k.acute_beds = 400;
    k.icu_beds = 100;
    k.base_cases = 1.0;
    spec.counties.push_back(k);
  }
  spec.run_config = to_json(with_age2_row(RunConfig{}));
  auto rng = RngStream::derive(11, "synth", 0);
  auto b = synth_inputs(spec, rng);
  RunConfig cfg = b.config;
  cfg.seed = 11;
  cfg.horizon = 30;
  cfg.cases.case_age_dist = {0.45, 0.45, 0.10};
  cfg.vaccination_input_rates = {0.02, 0.02, 0.02};
  Simulation sim(cfg, b.inputs);
  std::vector<CountyForecast> f;
  for (int c = 0; c < 5; ++c) f.push_back({c, std::vector<double>(30, 1100.0)});
  sim.set_forecasts(f);
  sim.set_day0_states(std::vector<SeirsState>(5));
  sim.run();
  BigRun r;
  for (const auto& e : sim.log()) {
    if (e.kind != EventKind::Case) continue;
    ++r.total;
    if (e.code != 1) continue;
    ++r.reported;
    if (e.vaccinated == 0)
      ++r.reported_nv[static_cast<std::size_t>(e.age_group)][static_cast<std::size_t>(e.covid_state) - 2];
  }
  return r;
}

Outcome pattern2(const BigRun& r) {
  const std::array<std::array<double, 4>, 2> target{{{0.050, 0.935, 0.012, 0.003}, {0.05, 0.904, 0.037, 0.009}}};
  bool pass = true;
  std::string detail;
  for (std::size_t a = 0; a < 2; ++a) {
    std::int64_t n = 0;
    for (auto x : r.reported_nv[a]) n += x;
    double worst = 0.0;
    for (std::size_t s = 0; s < 4; ++s)
      worst = std::max(worst, std::abs(static_cast<double>(r.reported_nv[a][s]) / static_cast<double>(n) - target[a][s]));
    pass &= n >= 5000 && worst <= 0.01;
    if (a) detail += "; ";
    detail += fmt("age %g: n=%g max dev %.4f", static_cast<double>(a), static_cast<double>(n), worst);
  }
  return {pass, detail};
}

Outcome reported_fraction(const BigRun& r) {
  const double f = static_cast<double>(r.reported) / static_cast<double>(r.total);
  return {r.total >= 10000 && std::abs(f - 0.125) <= 0.01,
          fmt("%.4f of %g cases", f, static_cast<double>(r.total))};
}

// ------------------------------------------------------------------ 4

Outcome pattern3(const EventLog& log) {
  const std::array<double, 4> count_target{0.15, 0.45, 0.25, 0.15};
  const std::array<double, 3> daily_target{0.50, 0.16, 0.03};
  std::array<double, 4> counts{};
  double residents = 0;
  std::array<double, 3> days{}, selected{};
  int n_days = 0;
  for (const auto& e : log) {
    if (e.kind == EventKind::VisitorsAssigned) {
      ++counts[static_cast<std::size_t>(e.code)];
      ++residents;
    } else if (e.kind == EventKind::Visit || e.kind == EventKind::VisitBlocked) {
      const auto k = static_cast<std::size_t>(e.value) - 1;
      ++days[k];
      // barrier 1 is the daily draw itself; anything later was selected
      selected[k] += e.code != 1;
    } else if (e.kind == EventKind::Census) {
      ++n_days;
    }
  }
  double worst_share = 0.0;
  for (std::size_t k = 0; k < 4; ++k) worst_share = std::max(worst_share, std::abs(counts[k] / residents - count_target[k]));
  double worst_z = 0.0;
  for (std::size_t k = 0; k < 3; ++k)
    worst_z = std::max(worst_z, std::abs(selected[k] - days[k] * daily_target[k]) / binom_sd(days[k], daily_target[k]));
  const bool pass = residents >= 2000 && n_days >= 30 && worst_share <= 0.02 && worst_z <= 3.0;
  return {pass, fmt("%g residents x %g days; share dev %.4f; daily-rate worst |z| %.2f", residents, n_days, worst_share,
                    worst_z)};
}

// ------------------------------------------------------------------ 5

Outcome pattern4(const SynthBundle& desk) {
  RunConfig cfg = desk.config;
  cfg.hospital_init.severe_count = cfg.hospital_init.critical_count = 0;
  Simulation sim(cfg, desk.inputs);
  quiet(sim, desk.inputs.world.counties.size(), cfg.horizon);
  sim.run();
  std::map<FacilityId, double> hours;
  std::int64_t sick = 0;
  for (const auto& e : sim.log()) {
    if (e.kind == EventKind::Attendance) hours[e.facility] += e.value;
    sick += e.kind == EventKind::Case;
  }
  std::vector<double> ratio;
  for (const auto& p : desk.inputs.pbj) {
    const double target = p.nurse_hours + p.non_nurse_hours;
    if (target > 0) ratio.push_back(hours[p.facility] / cfg.horizon / target);
  }
  double mean = 0, var = 0;
  for (double x : ratio) mean += x;
  mean /= static_cast<double>(ratio.size());
  for (double x : ratio) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / static_cast<double>(ratio.size()));
  const bool pass = ratio.size() >= 20 && sick == 0 && mean >= 0.98 && mean <= 1.02 && sd <= 0.06;
  return {pass, fmt("%g homes, mean %.4f, std %.4f", static_cast<double>(ratio.size()), mean, sd)};
}

// ------------------------------------------------------------------ 6

struct Ld {
  long double S, E, I, R;
};

Outcome seirs(const SynthBundle& desk) {
  bool pass = true;
  std::string detail;
  const SeirsParams p = desk.config.seirs;

  // conservation over every county-day of the desk forecasts
  const auto fb = compute_forecasts(desk.config, desk.inputs);
  double worst = 0.0;
  for (const auto& s0 : fb.day0)
    for (const auto& s : seirs_trajectory(s0, p, desk.config.horizon)) worst = std::max(worst, std::abs(s.total() - 1.0));
  pass &= worst <= 1e-9;
  detail += fmt("max |S+E+I+R-1| %.1e; ", worst);

  // constant incidence: one infection a day in a population of 600
  const std::vector<double> ones(200, 1.0);
  const auto s = estimate_compartments_from_infections(ones, 600.0, 150, p);
  const double err = std::max({std::abs(s.I - 0.01), std::abs(s.E - 0.01), std::abs(s.R - 0.15), std::abs(s.S - 0.83)});
  pass &= err <= 1e-9;
  detail += fmt("constant-incidence err %.1e; ", err);

  // independent long-double Euler integrator on 30-day infection totals
  double worst_rel = 0.0;
  for (std::size_t c = 0; c < fb.day0.size(); ++c) {
    const long double beta = static_cast<long double>(p.re) / p.infectious_days;
    const long double sigma = 1.0L / p.exposure_days, gamma = 1.0L / p.infectious_days, omega = 1.0L / p.immunity_days;
    Ld x{fb.day0[c].S, fb.day0[c].E, fb.day0[c].I, fb.day0[c].R};
    long double total = 0;
    for (int d = 0; d < 30; ++d) {
      total += sigma * x.E;
      const long double inf = beta * x.S * x.I, on = sigma * x.E, rec = gamma * x.I, wan = omega * x.R;
      x = {x.S - inf + wan, x.E + inf - on, x.I + on - rec, x.R + rec - wan};
    }
    total *= static_cast<long double>(desk.inputs.world.counties[c].population);
    const auto f = run_seirs(fb.day0[c], p, static_cast<double>(desk.inputs.world.counties[c].population), 30);
    double model = 0;
    for (double v : f.infections) model += v;
    worst_rel = std::max(worst_rel, static_cast<double>(std::abs(model - total) / total));
  }
  pass &= worst_rel <= 1e-3;
  detail += fmt("naive integrator worst rel diff %.1e", worst_rel);
  return {pass, detail};
}

// ------------------------------------------------------------------ 7

// target_t = round((share_t * hours + carry) / (shift * p_t)) in type order.
std::array<std::int64_t, 4> oracle_targets(double hours, const WorkforceParams& w) {
  std::array<std::int64_t, 4> t{};
  double carry = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    const double per = w.shift_hours * w.workday_probability[k];
    const double want = w.hours_share[k] * hours + carry;
    t[k] = std::max<std::int64_t>(0, std::llround(want / per));
    carry = want - static_cast<double>(t[k]) * per;
  }
  return t;
}

double haversine(double la1, double lo1, double la2, double lo2) {
  const double r = 3958.7613, rad = 3.14159265358979323846 / 180.0;
  const double a = std::pow(std::sin((la2 - la1) * rad / 2), 2) +
                   std::cos(la1 * rad) * std::cos(la2 * rad) * std::pow(std::sin((lo2 - lo1) * rad / 2), 2);
  return 2 * r * std::asin(std::min(1.0, std::sqrt(a)));
}

std::vector<std::string> hcw_violations(const Simulation& sim) {
  const World& w = sim.world();
  const WorkforceParams& wp = sim.config().workforce;
  const auto k = static_cast<std::size_t>(wp.contract_facility_count);
  std::vector<std::string> bad;
  std::map<FacilityId, std::array<std::int64_t, 5>> got;  // ft, pt, ms primary, ms secondary, contract listings
  std::set<AgentId> seen;
  bool unique = true, single = true, ms_shape = true, ms_distinct = true, contract = true;
  std::array<double, 5> over{};  // ms>50, ms>100, c>50, c>100, c>200
  double n_ms = 0, n_c = 0;
  auto miles = [&](CountyId home, FacilityId f) {
    const auto& a = w.counties[static_cast<std::size_t>(home)];
    const auto& b = w.counties[static_cast<std::size_t>(w.facilities[static_cast<std::size_t>(f)].county)];
    return &a == &b ? 0.0 : haversine(a.lat, a.lon, b.lat, b.lon);
  };
  for (const auto& h : w.hcws) {
    unique &= seen.insert(h.agent).second;
    switch (h.type) {
      case HcwType::SingleSiteFullTime:
      case HcwType::SingleSitePartTime:
        single &= h.primary != kNoFacility && h.secondary.empty();
        ++got[h.primary][h.type == HcwType::SingleSiteFullTime ? 0 : 1];
        break;
      case HcwType::Multisite: {
        ms_shape &= h.primary != kNoFacility && h.secondary.size() == 1;
        if (h.secondary.size() != 1) break;
        ms_distinct &= h.secondary[0] != h.primary;
        ++got[h.primary][2];
        ++got[h.secondary[0]][3];
        ++n_ms;
        const double m = miles(h.home_county, h.secondary[0]);
        over[0] += m > 50;
        over[1] += m > 100;
        break;
      }
      case HcwType::Contract: {
        const std::set<FacilityId> fs(h.secondary.begin(), h.secondary.end());
        contract &= h.secondary.size() == k && fs.size() == k;
        double m = 0;
        for (FacilityId f : h.secondary) {
          ++got[f][4];
          m = std::max(m, miles(h.home_county, f));
        }
        ++n_c;
        over[2] += m > 50;
        over[3] += m > 100;
        over[4] += m > 200;
        break;
      }
    }
  }
  bool targets = true;
  for (const auto& p : sim.inputs().pbj) {
    const auto t = oracle_targets(p.nurse_hours + p.non_nurse_hours, wp);
    const auto& g = got[p.facility];
    targets &= g[0] == t[0] && g[1] == t[1] && g[2] == t[2] && g[3] == t[2] &&
               g[4] == t[3] * static_cast<std::int64_t>(k);
  }
  const std::array<double, 5> caps{wp.caps.multisite_over_50, wp.caps.multisite_over_100, wp.caps.contract_over_50,
                                   wp.caps.contract_over_100, wp.caps.contract_over_200};
  const std::array<const char*, 5> cap_names{"multisite>50", "multisite>100", "contract>50", "contract>100",
                                             "contract>200"};
  if (!targets) bad.push_back("targets");
  if (!unique) bad.push_back("uniqueness");
  if (!single) bad.push_back("single-site");
  if (!ms_shape) bad.push_back("multisite shape");
  if (!ms_distinct) bad.push_back("multisite distinct");
  if (!contract) bad.push_back("contract count");
  for (std::size_t i = 0; i < 5; ++i) {
    const double n = i < 2 ? n_ms : n_c;
    if (n > 0 && over[i] / n > caps[i]) bad.push_back(cap_names[i]);
  }
  return bad;
}

Outcome hcw_sweep(const SynthBundle& desk) {
  int failed = 0;
  std::string first;
  std::size_t hcws = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    RunConfig cfg = desk.config;
    cfg.seed = seed;
    try {
      Simulation sim(cfg, desk.inputs);
      sim.initialize();
      hcws = sim.world().hcws.size();
      const auto v = hcw_violations(sim);
      if (!v.empty()) {
        ++failed;
        if (first.empty()) first = "seed " + std::to_string(seed) + ": " + v.front();
      }
    } catch (const std::exception& e) {
      ++failed;
      if (first.empty()) first = "seed " + std::to_string(seed) + ": " + e.what();
    }
  }
  return {failed == 0, std::to_string(20 - failed) + "/20 seeds satisfy all eleven criteria (" +
                           std::to_string(hcws) + " HCWs)" + (first.empty() ? "" : "; " + first)};
}

// ------------------------------------------------------------------ 8

Outcome los() {
  const LosDistribution d;
  RngStream rng = RngStream::derive(8, "los", 0);
  const int n = 100000;
  double sum = 0;
  int lo = 1000, hi = -1;
  for (int i = 0; i < n; ++i) {
    const int x = d.sample(rng);
    sum += x;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  // mean of N(3, 5) truncated to [1, 50]
  auto pdf = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2 * 3.14159265358979323846); };
  auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  const double a = (1.0 - 3.0) / 5.0, b = (50.0 - 3.0) / 5.0;
  const double analytic = 3.0 + 5.0 * (pdf(a) - pdf(b)) / (cdf(b) - cdf(a));
  const double mean = sum / n;
  return {lo >= 1 && hi <= 50 && std::abs(mean - analytic) <= 0.1,
          fmt("range [%g, %g], mean %.4f vs analytic %.4f", lo, hi, mean, analytic)};
}

// ------------------------------------------------------------------ 9

Outcome determinism(const SynthBundle& desk) {
  auto csv = [&](std::uint64_t seed) {
    RunConfig cfg = desk.config;
    cfg.seed = seed;
    Simulation sim(cfg, desk.inputs);
    sim.run();
    return sim.log().to_csv();
  };
  const auto a = csv(5), b = csv(5), c = csv(6);
  return {a == b && a != c, fmt("%g bytes; same seed identical: %g; other seed differs: %g",
                                static_cast<double>(a.size()), a == b, a != c)};
}

// ------------------------------------------------------------------ 10

Outcome ledger(const EventLog& log, const RunConfig& cfg, double scale) {
  const auto want_acute = std::llround(static_cast<double>(cfg.hospital_init.severe_count) * scale);
  const auto want_icu = std::llround(static_cast<double>(cfg.hospital_init.critical_count) * scale);
  std::int64_t acute = 0, icu = 0, init_acute = 0, init_icu = 0, bad_days = 0, days = 0, nonreported = 0;
  bool day0 = false;
  std::map<AgentId, std::int64_t> reported;
  for (const auto& e : log) {
    switch (e.kind) {
      case EventKind::InitAdmission:
        (e.covid_state == static_cast<int>(CovidState::Critical) ? init_icu : init_acute)++;
        break;
      case EventKind::InitialCensus:
        day0 = e.value == static_cast<double>(want_acute) && e.value2 == static_cast<double>(want_icu) &&
               init_acute == want_acute && init_icu == want_icu;
        acute = init_acute;
        icu = init_icu;
        break;
      case EventKind::Case: reported[e.agent] = e.code; break;
      case EventKind::Admission:
        (e.covid_state == static_cast<int>(CovidState::Critical) ? icu : acute)++;
        if (reported.count(e.agent) == 0 || reported[e.agent] != 1) ++nonreported;
        break;
      case EventKind::Discharge: (e.code == 1 ? icu : acute)--; break;
      case EventKind::Census:
        ++days;
        bad_days += e.value != static_cast<double>(acute) || e.value2 != static_cast<double>(icu);
        break;
      default: break;
    }
  }
  return {day0 && bad_days == 0 && nonreported == 0 && days > 0,
          fmt("day-0 census %g/%g (want %g/%g)", static_cast<double>(init_acute), static_cast<double>(init_icu),
              static_cast<double>(want_acute), static_cast<double>(want_icu)) +
              fmt("; %g of %g days off; %g nonreported admissions", static_cast<double>(bad_days),
                  static_cast<double>(days), static_cast<double>(nonreported))};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::printf("%s [%2d] %-22s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
  };

  const SynthBundle desk = desk_bundle();
  Simulation base(desk.config, desk.inputs);
  base.run();

  report(1, "case counts", [&] { return pattern1(desk); });
  BigRun big;
  bool big_ok = false;
  std::string big_err;
  try {
    big = big_run();
    big_ok = true;
  } catch (const std::exception& e) {
    big_err = e.what();
  }
  report(2, "severity proportions", [&] { return big_ok ? pattern2(big) : Outcome{false, big_err}; });
  report(3, "reported fraction", [&] { return big_ok ? reported_fraction(big) : Outcome{false, big_err}; });
  report(4, "visitation", [&] { return pattern3(base.log()); });
  report(5, "staffing hours", [&] { return pattern4(desk); });
  report(6, "SEIRS", [&] { return seirs(desk); });
  report(7, "HCW assignment", [&] { return hcw_sweep(desk); });
  report(8, "length of stay", [] { return los(); });
  report(9, "determinism", [&] { return determinism(desk); });
  report(10, "hospital ledger",
         [&] { return ledger(base.log(), base.config(), desk.inputs.world.scale_factor); });

  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
