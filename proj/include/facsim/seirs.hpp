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

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "facsim/common.hpp"
#include "facsim/world.hpp"

namespace facsim {

/// Reported-to-infection multiplier in force over an inclusive date range.
/// An open `last` means "until further notice".
struct MultiplierRange {
  double multiplier = 1.0;
  Date first;
  std::optional<Date> last;

  bool covers(Date d) const { return d >= first && (!last || d <= *last); }
};

struct SeirsParams {
  std::vector<MultiplierRange> case_multipliers{
      {10.0, Date(2020, 2, 1), Date(2020, 6, 1)},
      {4.0, Date(2020, 10, 1), Date(2021, 12, 14)},
      {8.0, Date(2021, 12, 15), std::nullopt},
  };
  double infectious_days = 6.0;
  double exposure_days = 5.0;
  double immunity_days = 90.0;
  double r0 = 1.25;
  // Effective reproductive number of the forward run; scenario input.
  double re = 1.25;
  // Rate used to back out E from next-day infections.
  double alpha = 1.0 / 6.0;
  std::size_t smoothing_window = 10;

  double gamma() const { return 1.0 / infectious_days; }
  double sigma() const { return 1.0 / exposure_days; }
  double omega() const { return 1.0 / immunity_days; }
  double beta() const { return re * gamma(); }

  void validate() const {
    if (!(infectious_days > 0) || !(exposure_days > 0) || !(immunity_days > 0))
      throw ConfigError("SEIRS durations must be positive");
    if (!(re >= 0)) throw ConfigError("SEIRS re must be non-negative");
    if (!(r0 > 0)) throw ConfigError("SEIRS r0 must be positive");
    if (!(alpha > 0)) throw ConfigError("SEIRS alpha must be positive");
    if (smoothing_window == 0) throw ConfigError("smoothing window must be positive");
    for (const auto& m : case_multipliers) {
      if (!(m.multiplier >= 1.0)) throw ConfigError("case multipliers must be >= 1");
      if (m.last && *m.last < m.first) throw ConfigError("case multiplier range ends before it starts");
    }
  }

  /// Multiplier for a reporting date. Throws if no range covers it, naming
  /// the uncovered gap.
  double multiplier_on(Date d) const {
    for (const auto& m : case_multipliers)
      if (m.covers(d)) return m.multiplier;
    std::optional<Date> before, after;
    for (const auto& m : case_multipliers) {
      if (m.last && *m.last < d && (!before || *m.last > *before)) before = m.last;
      if (m.first > d && (!after || m.first < *after)) after = m.first;
    }
    std::string gap = (before ? before->plus_days(1).iso() : std::string("-inf")) + " .. " +
                      (after ? after->plus_days(-1).iso() : std::string("+inf"));
    throw ConfigError("no case multiplier covers " + d.iso() + " (schedule gap " + gap + ")");
  }
};

struct SeirsState {
  double S = 1.0;
  double E = 0.0;
  double I = 0.0;
  double R = 0.0;
  int day = 0;

  double total() const { return S + E + I + R; }
};

struct CountyCaseHistory {
  CountyId county = 0;
  double population = 0.0;
  Date first_date;
  std::vector<double> reported;

  Date last_date() const { return first_date.plus_days(static_cast<std::int64_t>(reported.size()) - 1); }
};

struct CountyForecast {
  CountyId county = 0;
  // Estimated new infections (persons) for each model day.
  std::vector<double> infections;
};

/// Trailing rolling mean (partial windows at the start average what is
/// available), rescaled so the smoothed total equals the reported total.
inline std::vector<double> smooth_and_scale(std::span<const double> cases, std::size_t window = 10) {
  if (cases.size() < window)
    throw ConfigError("case series has " + std::to_string(cases.size()) +
                      " days; smoothing needs at least " + std::to_string(window));
  std::vector<double> out(cases.size());
  double running = 0.0;
  double raw_total = 0.0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (cases[i] < 0) throw ConfigError("negative case count at index " + std::to_string(i));
    running += cases[i];
    raw_total += cases[i];
    if (i >= window) running -= cases[i - window];
    const std::size_t n = std::min(i + 1, window);
    out[i] = running / static_cast<double>(n);
  }
  if (raw_total == 0.0) return std::vector<double>(cases.size(), 0.0);
  double smooth_total = 0.0;
  for (double v : out) smooth_total += v;
  const double k = raw_total / smooth_total;
  for (double& v : out) v *= k;
  return out;
}

/// Smoothed reported cases times the multiplier in force on each date.
inline std::vector<double> estimate_infections(std::span<const double> smoothed, Date first_date,
                                               const SeirsParams& params) {
  std::vector<double> out(smoothed.size());
  for (std::size_t i = 0; i < smoothed.size(); ++i)
    out[i] = smoothed[i] * params.multiplier_on(first_date.plus_days(static_cast<std::int64_t>(i)));
  return out;
}

/// Days of infection history needed before the estimation day: 6 days of
/// infectious window for each of the 90 days in the immunity window.
inline std::size_t required_history_days(const SeirsParams& params) {
  return static_cast<std::size_t>(std::llround(params.immunity_days)) +
         static_cast<std::size_t>(std::llround(params.infectious_days)) - 1;
}

/// Day-`as_of` compartments from an estimated-infection series.
///
///   E = infections[as_of + 1] / (population * alpha)
///   I = sum of the last `infectious_days` days of infections / population
///   R = sum over the last `immunity_days` days of I_d / infectious_days
///   S = 1 - E - I - R
inline SeirsState estimate_compartments_from_infections(std::span<const double> infections,
                                                        double population, std::size_t as_of,
                                                        const SeirsParams& params,
                                                        const std::string& label = "county") {
  if (!(population > 0)) throw ConfigError(label + ": population must be positive");
  const auto inf_days = static_cast<std::size_t>(std::llround(params.infectious_days));
  const auto imm_days = static_cast<std::size_t>(std::llround(params.immunity_days));
  if (as_of + 1 >= infections.size())
    throw ConfigError(label + ": estimating E needs infections for the day after the estimation day");
  if (as_of + 1 < required_history_days(params))
    throw ConfigError(label + ": insufficient case history (" + std::to_string(as_of + 1) +
                      " days through the estimation day, need " +
                      std::to_string(required_history_days(params)) + ")");

  auto infectious_on = [&](std::size_t d) {
    double sum = 0.0;
    for (std::size_t k = d + 1 - inf_days; k <= d; ++k) sum += infections[k];
    return sum / population;
  };

  SeirsState s;
  s.E = infections[as_of + 1] / (population * params.alpha);
  s.I = infectious_on(as_of);
  // Total recovered up to day i minus total recovered up to day i - 90.
  double recovered = 0.0;
  for (std::size_t d = as_of + 1 - imm_days; d <= as_of; ++d)
    recovered += infectious_on(d) / params.infectious_days;
  s.R = recovered;
  s.S = 1.0 - s.E - s.I - s.R;
  if (s.S < 0.0)
    throw NumericalError(label + ": estimated susceptible share is negative (" +
                         format_double(s.S) + "); case inputs are outside the valid range");
  return s;
}

/// Smooth, convert to infections and estimate the compartments on `as_of`.
inline SeirsState estimate_compartments(const CountyCaseHistory& history, const SeirsParams& params,
                                        Date as_of) {
  const std::string label = "county " + std::to_string(history.county);
  if (as_of < history.first_date)
    throw ConfigError(label + ": estimation date precedes case history");
  const auto idx = static_cast<std::size_t>(as_of.days_since(history.first_date));
  const auto smoothed = smooth_and_scale(history.reported, params.smoothing_window);
  const auto infections = estimate_infections(smoothed, history.first_date, params);
  return estimate_compartments_from_infections(infections, history.population, idx, params, label);
}

/// One forward-Euler day of the SEIRS model.
inline SeirsState seirs_step(const SeirsState& s, const SeirsParams& p) {
  const double infection = p.beta() * s.S * s.I;
  const double onset = p.sigma() * s.E;
  const double recovery = p.gamma() * s.I;
  const double waning = p.omega() * s.R;
  SeirsState n;
  n.S = s.S - infection + waning;
  n.E = s.E + infection - onset;
  n.I = s.I + onset - recovery;
  n.R = s.R + recovery - waning;
  n.day = s.day + 1;
  return n;
}

/// States for days 0..horizon (horizon + 1 entries).
inline std::vector<SeirsState> seirs_trajectory(const SeirsState& state0, const SeirsParams& params,
                                                int horizon) {
  params.validate();
  if (horizon < 1) throw ConfigError("SEIRS horizon must be at least 1");
  constexpr double kTol = 1e-9;
  auto check = [&](const SeirsState& s) {
    for (double v : {s.S, s.E, s.I, s.R})
      if (!(v >= -kTol && v <= 1.0 + kTol))
        throw NumericalError("SEIRS diverged on day " + std::to_string(s.day));
  };
  std::vector<SeirsState> traj;
  traj.reserve(static_cast<std::size_t>(horizon) + 1);
  traj.push_back(state0);
  check(state0);
  for (int d = 0; d < horizon; ++d) {
    traj.push_back(seirs_step(traj.back(), params));
    check(traj.back());
  }
  return traj;
}

/// Daily new infections (E -> I flow times population) for `horizon` days.
inline CountyForecast run_seirs(const SeirsState& state0, const SeirsParams& params,
                                double population, int horizon, CountyId county = 0) {
  const auto traj = seirs_trajectory(state0, params, horizon);
  CountyForecast f;
  f.county = county;
  f.infections.resize(static_cast<std::size_t>(horizon));
  for (int d = 0; d < horizon; ++d)
    f.infections[static_cast<std::size_t>(d)] =
        std::max(0.0, params.sigma() * traj[static_cast<std::size_t>(d)].E * population);
  return f;
}

}  // namespace facsim
