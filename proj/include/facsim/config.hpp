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

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "facsim/case_engine.hpp"
#include "facsim/common.hpp"
#include "facsim/population.hpp"
#include "facsim/seirs.hpp"
#include "facsim/visitation.hpp"
#include "facsim/workforce.hpp"

namespace facsim {

using json = nlohmann::ordered_json;

enum class ForecastSource { Seirs, Historical };

/// Pass/fail thresholds used by `validate`.
struct ValidationTolerances {
  double severity_abs_tol = 0.01;
  std::int64_t severity_min_cases = 5000;
  double reported_fraction_tol = 0.01;
  std::int64_t reported_min_cases = 10000;
  double visitor_share_tol = 0.02;
  std::int64_t visitor_share_min_residents = 2000;
  double sigma_bound = 3.0;
  double pattern4_mean_min = 0.98;
  double pattern4_mean_max = 1.02;
  double pattern4_std_max = 0.06;
};

/// Input file locations, relative to the config file's directory.
struct InputPaths {
  std::string world = "world.json";
  std::string cases = "covid19_cases.csv";
  std::string vaccinations = "vaccinations_by_age.csv";
  std::string pbj = "PBJ.csv";
};

struct RunConfig {
  std::uint64_t seed = 1;
  Date start_date{2021, 12, 15};
  int horizon = 30;
  ForecastSource forecast_source = ForecastSource::Seirs;

  SeirsParams seirs;
  CaseEngineParams cases;
  std::array<double, kNumAgeGroups> vaccination_input_rates{0.47, 0.74, 0.92};
  double hcw_vaccination_rate = 0.80;
  double nh_resident_vaccination_rate = 0.87;
  InitHospitalization hospital_init;
  VisitationParams visitation;
  VisitPolicy visit_policy;
  WorkforceParams workforce;
  InputPaths inputs;
  ValidationTolerances validation;

  void validate() const {
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    seirs.validate();
    cases.validate();
    hospital_init.validate();
    visitation.validate();
    visit_policy.validate();
    workforce.validate();
    for (double p : vaccination_input_rates)
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("vaccination input rate outside [0, 1]");
    for (double p : {hcw_vaccination_rate, nh_resident_vaccination_rate})
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("group vaccination rate outside [0, 1]");
  }
};

namespace detail {

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& out, const std::string& where) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
    return;
  }
  T v{};
  read(j, key, v, where);
  out = v;
}

inline json optional_json(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

inline json severity_rows_json(const std::array<std::optional<SeverityRow>, kNumAgeGroups>& rows) {
  json a = json::array();
  for (const auto& r : rows) a.push_back(r ? json(*r) : json(nullptr));
  return a;
}

inline json hcw_array_json(const std::array<double, kNumHcwTypes>& v) {
  json o = json::object();
  for (auto t : kHcwTypes) o[name_of(t)] = v[index_of(t)];
  return o;
}

inline void read_hcw_array(const json& j, const char* key, std::array<double, kNumHcwTypes>& out,
                           const std::string& where) {
  if (!j.contains(key)) return;
  const json& o = j.at(key);
  const std::string w = where + "." + key;
  reject_unknown_keys(o, {"single_site_full_time", "single_site_part_time", "multisite", "contract"}, w);
  for (auto t : kHcwTypes) read(o, name_of(t), out[index_of(t)], w);
}

}  // namespace detail

inline json to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["start_date"] = c.start_date.iso();
  j["horizon"] = c.horizon;
  j["forecast_source"] = c.forecast_source == ForecastSource::Seirs ? "seirs" : "historical";
  j["v_eff"] = c.cases.v_eff;
  j["reported_fraction"] = c.cases.severity.reported_fraction;

  json mult = json::array();
  for (const auto& m : c.seirs.case_multipliers)
    mult.push_back({{"multiplier", m.multiplier},
                    {"first", m.first.iso()},
                    {"last", m.last ? json(m.last->iso()) : json(nullptr)}});
  j["seirs"] = {{"infectious_days", c.seirs.infectious_days}, {"exposure_days", c.seirs.exposure_days},
                {"immunity_days", c.seirs.immunity_days},     {"r0", c.seirs.r0},
                {"re", c.seirs.re},                           {"alpha", c.seirs.alpha},
                {"smoothing_window", c.seirs.smoothing_window}, {"case_multipliers", mult}};
  j["vaccination"] = {{"input_rates", c.vaccination_input_rates},
                      {"hcw_rate", c.hcw_vaccination_rate},
                      {"nh_resident_rate", c.nh_resident_vaccination_rate}};
  j["hospital_init"] = {{"severe_count", c.hospital_init.severe_count},
                        {"critical_count", c.hospital_init.critical_count},
                        {"age_dist", c.hospital_init.age_dist}};
  const auto& sev = c.cases.severity;
  j["cases"] = {
      {"age_dist", c.cases.case_age_dist},
      {"community_case_days", c.cases.community_case_days},
      {"severity",
       {{"reported",
         {{"not_vaccinated", detail::severity_rows_json(sev.reported[0])},
          {"vaccinated", detail::severity_rows_json(sev.reported[1])}}},
        {"nonreported", {{"not_vaccinated", sev.nonreported[0]}, {"vaccinated", sev.nonreported[1]}}}}}};
  j["los"] = {{"mean", c.cases.los.mean}, {"sd", c.cases.los.sd}, {"min", c.cases.los.min}, {"max", c.cases.los.max}};
  j["visitation"] = {{"enabled", c.visit_policy.enabled},
                     {"count_probs", c.visitation.count_probs},
                     {"daily_probs", c.visitation.daily_probs},
                     {"age_dists", c.visitation.age_dists},
                     {"mild_visit_factor", c.visitation.mild_visit_factor},
                     {"require_vaccination_proof", c.visit_policy.require_vaccination_proof},
                     {"proof_required_facilities", c.visit_policy.proof_required_facilities},
                     {"max_visits_per_week", detail::optional_json(c.visit_policy.max_visits_per_week)},
                     {"max_visits_per_month", detail::optional_json(c.visit_policy.max_visits_per_month)}};
  const auto& wf = c.workforce;
  j["workforce"] = {{"workday_probability", detail::hcw_array_json(wf.workday_probability)},
                    {"hours_share", detail::hcw_array_json(wf.hours_share)},
                    {"contract_facility_count", wf.contract_facility_count},
                    {"shift_hours", wf.shift_hours},
                    {"mild_attendance_factor", wf.mild_attendance_factor},
                    {"distance_caps",
                     {{"multisite_over_50", wf.caps.multisite_over_50},
                      {"multisite_over_100", wf.caps.multisite_over_100},
                      {"contract_over_50", wf.caps.contract_over_50},
                      {"contract_over_100", wf.caps.contract_over_100},
                      {"contract_over_200", wf.caps.contract_over_200}}}};
  j["inputs"] = {{"world", c.inputs.world},
                 {"cases", c.inputs.cases},
                 {"vaccinations", c.inputs.vaccinations},
                 {"pbj", c.inputs.pbj}};
  const auto& v = c.validation;
  j["validation"] = {{"severity_abs_tol", v.severity_abs_tol},
                     {"severity_min_cases", v.severity_min_cases},
                     {"reported_fraction_tol", v.reported_fraction_tol},
                     {"reported_min_cases", v.reported_min_cases},
                     {"visitor_share_tol", v.visitor_share_tol},
                     {"visitor_share_min_residents", v.visitor_share_min_residents},
                     {"sigma_bound", v.sigma_bound},
                     {"pattern4_mean_min", v.pattern4_mean_min},
                     {"pattern4_mean_max", v.pattern4_mean_max},
                     {"pattern4_std_max", v.pattern4_std_max}};
  return j;
}

/// Keys not present keep their defaults; unknown keys are an error.
inline RunConfig run_config_from_json(const json& j) {
  using detail::read;
  RunConfig c;
  const std::string root = "config";
  detail::reject_unknown_keys(j,
                              {"seed", "start_date", "horizon", "forecast_source", "v_eff", "reported_fraction",
                               "seirs", "vaccination", "hospital_init", "cases", "los", "visitation",
                               "workforce", "inputs", "validation"},
                              root);
  read(j, "seed", c.seed, root);
  if (j.contains("start_date")) c.start_date = Date::parse(j.at("start_date").get<std::string>());
  read(j, "horizon", c.horizon, root);
  if (j.contains("forecast_source")) {
    const auto s = j.at("forecast_source").get<std::string>();
    if (s == "seirs") c.forecast_source = ForecastSource::Seirs;
    else if (s == "historical") c.forecast_source = ForecastSource::Historical;
    else throw ConfigError("config.forecast_source: expected 'seirs' or 'historical'");
  }
  read(j, "v_eff", c.cases.v_eff, root);
  read(j, "reported_fraction", c.cases.severity.reported_fraction, root);

  if (j.contains("seirs")) {
    const json& s = j.at("seirs");
    const std::string w = "config.seirs";
    detail::reject_unknown_keys(s, {"infectious_days", "exposure_days", "immunity_days", "r0", "re", "alpha",
                                    "smoothing_window", "case_multipliers"},
                                w);
    read(s, "infectious_days", c.seirs.infectious_days, w);
    read(s, "exposure_days", c.seirs.exposure_days, w);
    read(s, "immunity_days", c.seirs.immunity_days, w);
    read(s, "r0", c.seirs.r0, w);
    read(s, "re", c.seirs.re, w);
    read(s, "alpha", c.seirs.alpha, w);
    read(s, "smoothing_window", c.seirs.smoothing_window, w);
    if (s.contains("case_multipliers")) {
      c.seirs.case_multipliers.clear();
      for (const auto& m : s.at("case_multipliers")) {
        detail::reject_unknown_keys(m, {"multiplier", "first", "last"}, w + ".case_multipliers");
        MultiplierRange r;
        r.multiplier = m.at("multiplier").get<double>();
        r.first = Date::parse(m.at("first").get<std::string>());
        if (m.contains("last") && !m.at("last").is_null()) r.last = Date::parse(m.at("last").get<std::string>());
        c.seirs.case_multipliers.push_back(r);
      }
    }
  }
  if (j.contains("vaccination")) {
    const json& v = j.at("vaccination");
    const std::string w = "config.vaccination";
    detail::reject_unknown_keys(v, {"input_rates", "hcw_rate", "nh_resident_rate"}, w);
    read(v, "input_rates", c.vaccination_input_rates, w);
    read(v, "hcw_rate", c.hcw_vaccination_rate, w);
    read(v, "nh_resident_rate", c.nh_resident_vaccination_rate, w);
  }
  if (j.contains("hospital_init")) {
    const json& h = j.at("hospital_init");
    const std::string w = "config.hospital_init";
    detail::reject_unknown_keys(h, {"severe_count", "critical_count", "age_dist"}, w);
    read(h, "severe_count", c.hospital_init.severe_count, w);
    read(h, "critical_count", c.hospital_init.critical_count, w);
    read(h, "age_dist", c.hospital_init.age_dist, w);
  }
  if (j.contains("cases")) {
    const json& cs = j.at("cases");
    const std::string w = "config.cases";
    detail::reject_unknown_keys(cs, {"age_dist", "community_case_days", "severity"}, w);
    read(cs, "age_dist", c.cases.case_age_dist, w);
    read(cs, "community_case_days", c.cases.community_case_days, w);
    if (cs.contains("severity")) {
      const json& sv = cs.at("severity");
      detail::reject_unknown_keys(sv, {"reported", "nonreported"}, w + ".severity");
      auto& table = c.cases.severity;
      if (sv.contains("reported")) {
        const json& rep = sv.at("reported");
        const std::string wr = w + ".severity.reported";
        detail::reject_unknown_keys(rep, {"not_vaccinated", "vaccinated"}, wr);
        int vi = 0;
        for (const char* key : {"not_vaccinated", "vaccinated"}) {
          if (rep.contains(key)) {
            const json& rows = rep.at(key);
            if (!rows.is_array() || rows.size() != kNumAgeGroups)
              throw ConfigError(wr + "." + key + ": expected one row per age group");
            for (std::size_t a = 0; a < kNumAgeGroups; ++a)
              table.reported[vi][a] = rows[a].is_null() ? std::nullopt
                                                         : std::optional<SeverityRow>(rows[a].get<SeverityRow>());
          }
          ++vi;
        }
      }
      if (sv.contains("nonreported")) {
        const json& nr = sv.at("nonreported");
        const std::string wn = w + ".severity.nonreported";
        detail::reject_unknown_keys(nr, {"not_vaccinated", "vaccinated"}, wn);
        read(nr, "not_vaccinated", table.nonreported[0], wn);
        read(nr, "vaccinated", table.nonreported[1], wn);
      }
    }
  }
  if (j.contains("los")) {
    const json& l = j.at("los");
    const std::string w = "config.los";
    detail::reject_unknown_keys(l, {"mean", "sd", "min", "max"}, w);
    read(l, "mean", c.cases.los.mean, w);
    read(l, "sd", c.cases.los.sd, w);
    read(l, "min", c.cases.los.min, w);
    read(l, "max", c.cases.los.max, w);
  }
  if (j.contains("visitation")) {
    const json& v = j.at("visitation");
    const std::string w = "config.visitation";
    detail::reject_unknown_keys(v, {"enabled", "count_probs", "daily_probs", "age_dists", "mild_visit_factor",
                                    "require_vaccination_proof", "proof_required_facilities",
                                    "max_visits_per_week", "max_visits_per_month"},
                                w);
    read(v, "enabled", c.visit_policy.enabled, w);
    read(v, "count_probs", c.visitation.count_probs, w);
    read(v, "daily_probs", c.visitation.daily_probs, w);
    read(v, "age_dists", c.visitation.age_dists, w);
    read(v, "mild_visit_factor", c.visitation.mild_visit_factor, w);
    read(v, "require_vaccination_proof", c.visit_policy.require_vaccination_proof, w);
    read(v, "proof_required_facilities", c.visit_policy.proof_required_facilities, w);
    detail::read_optional(v, "max_visits_per_week", c.visit_policy.max_visits_per_week, w);
    detail::read_optional(v, "max_visits_per_month", c.visit_policy.max_visits_per_month, w);
  }
  if (j.contains("workforce")) {
    const json& wf = j.at("workforce");
    const std::string w = "config.workforce";
    detail::reject_unknown_keys(wf, {"workday_probability", "hours_share", "contract_facility_count",
                                     "shift_hours", "mild_attendance_factor", "distance_caps"},
                                w);
    detail::read_hcw_array(wf, "workday_probability", c.workforce.workday_probability, w);
    detail::read_hcw_array(wf, "hours_share", c.workforce.hours_share, w);
    read(wf, "contract_facility_count", c.workforce.contract_facility_count, w);
    read(wf, "shift_hours", c.workforce.shift_hours, w);
    read(wf, "mild_attendance_factor", c.workforce.mild_attendance_factor, w);
    if (wf.contains("distance_caps")) {
      const json& dc = wf.at("distance_caps");
      const std::string wc = w + ".distance_caps";
      detail::reject_unknown_keys(dc, {"multisite_over_50", "multisite_over_100", "contract_over_50",
                                       "contract_over_100", "contract_over_200"},
                                  wc);
      read(dc, "multisite_over_50", c.workforce.caps.multisite_over_50, wc);
      read(dc, "multisite_over_100", c.workforce.caps.multisite_over_100, wc);
      read(dc, "contract_over_50", c.workforce.caps.contract_over_50, wc);
      read(dc, "contract_over_100", c.workforce.caps.contract_over_100, wc);
      read(dc, "contract_over_200", c.workforce.caps.contract_over_200, wc);
    }
  }
  if (j.contains("inputs")) {
    const json& in = j.at("inputs");
    const std::string w = "config.inputs";
    detail::reject_unknown_keys(in, {"world", "cases", "vaccinations", "pbj"}, w);
    read(in, "world", c.inputs.world, w);
    read(in, "cases", c.inputs.cases, w);
    read(in, "vaccinations", c.inputs.vaccinations, w);
    read(in, "pbj", c.inputs.pbj, w);
  }
  if (j.contains("validation")) {
    const json& v = j.at("validation");
    const std::string w = "config.validation";
    detail::reject_unknown_keys(v, {"severity_abs_tol", "severity_min_cases", "reported_fraction_tol",
                                    "reported_min_cases", "visitor_share_tol", "visitor_share_min_residents",
                                    "sigma_bound", "pattern4_mean_min", "pattern4_mean_max", "pattern4_std_max"},
                                w);
    auto& t = c.validation;
    read(v, "severity_abs_tol", t.severity_abs_tol, w);
    read(v, "severity_min_cases", t.severity_min_cases, w);
    read(v, "reported_fraction_tol", t.reported_fraction_tol, w);
    read(v, "reported_min_cases", t.reported_min_cases, w);
    read(v, "visitor_share_tol", t.visitor_share_tol, w);
    read(v, "visitor_share_min_residents", t.visitor_share_min_residents, w);
    read(v, "sigma_bound", t.sigma_bound, w);
    read(v, "pattern4_mean_min", t.pattern4_mean_min, w);
    read(v, "pattern4_mean_max", t.pattern4_mean_max, w);
    read(v, "pattern4_std_max", t.pattern4_std_max, w);
  }
  return c;
}

}  // namespace facsim
