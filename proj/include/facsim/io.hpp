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

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "facsim/common.hpp"
#include "facsim/config.hpp"
#include "facsim/population.hpp"
#include "facsim/rng.hpp"
#include "facsim/seirs.hpp"
#include "facsim/workforce.hpp"
#include "facsim/world.hpp"

namespace facsim {

inline constexpr std::string_view kCasesHeader = "county,date,cases";
inline constexpr std::string_view kVaccinationsHeader = "county,age_group,vaccination_rate";
inline constexpr std::string_view kPbjHeader = "facility_id,county,avg_daily_nurse_hours,avg_daily_non_nurse_hours";

struct Diagnostic {
  std::string file;
  std::size_t line = 0;    // 1-based, 0 when not tied to a line
  std::size_t column = 0;  // 1-based character column
  std::string message;

  std::string str() const {
    std::string s = file;
    if (line > 0) s += ":" + std::to_string(line);
    if (column > 0) s += ":" + std::to_string(column);
    return s + ": " + message;
  }
};

/// Every problem found while loading; nothing is returned when any exist.
class InputError : public std::runtime_error {
 public:
  explicit InputError(std::vector<Diagnostic> diags)
      : std::runtime_error(join(diags)), diags_(std::move(diags)) {}
  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  static std::string join(const std::vector<Diagnostic>& d) {
    std::string s;
    for (const auto& x : d) s += (s.empty() ? "" : "\n") + x.str();
    return s;
  }
  std::vector<Diagnostic> diags_;
};

struct CaseRow {
  CountyId county = 0;
  Date date;
  std::int64_t cases = 0;
  std::size_t line = 0;  // source line, 0 when generated
};

/// `county` is nullopt for the statewide rows.
struct VaccinationRow {
  std::optional<CountyId> county;
  AgeGroup age = AgeGroup::Under50;
  double rate = 0.0;
  std::size_t line = 0;
};

struct Inputs {
  WorldSpec world;
  std::vector<CaseRow> cases;  // sorted by (county, date), contiguous per county
  std::vector<VaccinationRow> vaccinations;
  std::vector<PbjRow> pbj;

  std::vector<CountyCaseHistory> case_histories() const {
    std::vector<CountyCaseHistory> out(world.counties.size());
    for (std::size_t c = 0; c < out.size(); ++c) {
      out[c].county = static_cast<CountyId>(c);
      out[c].population = static_cast<double>(world.counties[c].population);
    }
    for (const auto& r : cases) {
      auto& h = out[static_cast<std::size_t>(r.county)];
      if (h.reported.empty()) h.first_date = r.date;
      h.reported.push_back(static_cast<double>(r.cases));
    }
    return out;
  }

  VaccinationRates vaccination_rates(const RunConfig& cfg) const {
    VaccinationRates v;
    v.input_rates = cfg.vaccination_input_rates;
    v.hcw_rate = cfg.hcw_vaccination_rate;
    v.nh_resident_rate = cfg.nh_resident_vaccination_rate;
    v.county_rates.assign(world.counties.size(), {});
    for (const auto& r : vaccinations) {
      if (r.county) v.county_rates[static_cast<std::size_t>(*r.county)][index_of(r.age)] = r.rate;
      else v.state_rates[index_of(r.age)] = r.rate;
    }
    return v;
  }
};

namespace detail {

struct CsvField {
  std::string_view text;
  std::size_t column = 1;
};

inline std::vector<CsvField> split_fields(std::string_view line) {
  std::vector<CsvField> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back({line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start),
                   start + 1});
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

/// Lines of `text` without terminators; a trailing newline adds no line.
inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    out.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

class CsvReader {
 public:
  CsvReader(std::string file, std::string_view text, std::string_view header, std::vector<Diagnostic>& diags)
      : file_(std::move(file)), lines_(split_lines(text)), diags_(diags) {
    if (lines_.empty() || lines_[0] != header)
      error(1, 1, "header must be exactly '" + std::string(header) + "'");
    else
      ok_ = true;
  }

  bool ok() const { return ok_; }
  std::size_t size() const { return lines_.size(); }

  /// Fields of data line `i` (1-based file line i+1), or nullopt after
  /// reporting a field-count error.
  std::optional<std::vector<CsvField>> row(std::size_t i, std::size_t n_fields) {
    const auto line = lines_[i];
    if (!line.empty() && line.back() == '\r') {
      error(i + 1, line.size(), "CR line ending; files must use LF");
      return std::nullopt;
    }
    auto f = split_fields(line);
    if (f.size() != n_fields) {
      error(i + 1, 1, "expected " + std::to_string(n_fields) + " fields, found " + std::to_string(f.size()));
      return std::nullopt;
    }
    return f;
  }

  void error(std::size_t line, std::size_t col, std::string msg) {
    diags_.push_back({file_, line, col, std::move(msg)});
  }
  const std::string& file() const { return file_; }

 private:
  std::string file_;
  std::vector<std::string_view> lines_;
  std::vector<Diagnostic>& diags_;
  bool ok_ = false;
};

template <typename T>
bool parse_field(std::string_view s, T& out) {
  if (s.empty()) return false;
  auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc{} && r.ptr == s.data() + s.size();
}

inline std::optional<Date> parse_date_field(std::string_view s) {
  try {
    return Date::parse(std::string(s));
  } catch (const ConfigError&) {
    return std::nullopt;
  }
}

}  // namespace detail

inline std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError({{p.string(), 0, 0, "cannot open file"}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& p, std::string_view text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw ConfigError("write failed: " + p.string());
}

// ---------------------------------------------------------------- parsers

inline std::vector<CaseRow> parse_cases_csv(std::string_view text, const std::string& file,
                                            std::vector<Diagnostic>& diags) {
  std::vector<CaseRow> rows;
  detail::CsvReader rd(file, text, kCasesHeader, diags);
  if (!rd.ok()) return rows;
  for (std::size_t i = 1; i < rd.size(); ++i) {
    auto f = rd.row(i, 3);
    if (!f) continue;
    CaseRow r;
    r.line = i + 1;
    bool good = true;
    if (!detail::parse_field((*f)[0].text, r.county) || r.county < 0) {
      rd.error(i + 1, (*f)[0].column, "county must be a non-negative integer id");
      good = false;
    }
    if (auto d = detail::parse_date_field((*f)[1].text)) r.date = *d;
    else {
      rd.error(i + 1, (*f)[1].column, "date must be YYYY-MM-DD");
      good = false;
    }
    if (!detail::parse_field((*f)[2].text, r.cases)) {
      rd.error(i + 1, (*f)[2].column, "cases must be an integer");
      good = false;
    } else if (r.cases < 0) {
      rd.error(i + 1, (*f)[2].column, "negative case count");
      good = false;
    }
    if (good) rows.push_back(r);
  }
  return rows;
}

inline std::vector<VaccinationRow> parse_vaccinations_csv(std::string_view text, const std::string& file,
                                                          std::vector<Diagnostic>& diags) {
  std::vector<VaccinationRow> rows;
  detail::CsvReader rd(file, text, kVaccinationsHeader, diags);
  if (!rd.ok()) return rows;
  for (std::size_t i = 1; i < rd.size(); ++i) {
    auto f = rd.row(i, 3);
    if (!f) continue;
    VaccinationRow r;
    r.line = i + 1;
    bool good = true;
    if ((*f)[0].text != "state") {
      CountyId c = 0;
      if (!detail::parse_field((*f)[0].text, c) || c < 0) {
        rd.error(i + 1, (*f)[0].column, "county must be a non-negative integer id or 'state'");
        good = false;
      } else {
        r.county = c;
      }
    }
    int a = 0;
    if (!detail::parse_field((*f)[1].text, a) || a < 0 || a >= static_cast<int>(kNumAgeGroups)) {
      rd.error(i + 1, (*f)[1].column, "age_group must be 0, 1 or 2");
      good = false;
    } else {
      r.age = kAgeGroups[static_cast<std::size_t>(a)];
    }
    if (!detail::parse_field((*f)[2].text, r.rate) || !(r.rate >= 0.0 && r.rate <= 1.0)) {
      rd.error(i + 1, (*f)[2].column, "vaccination_rate must be a number in [0, 1]");
      good = false;
    }
    if (good) rows.push_back(r);
  }
  return rows;
}

inline std::vector<PbjRow> parse_pbj_csv(std::string_view text, const std::string& file,
                                         std::vector<Diagnostic>& diags) {
  std::vector<PbjRow> rows;
  detail::CsvReader rd(file, text, kPbjHeader, diags);
  if (!rd.ok()) return rows;
  for (std::size_t i = 1; i < rd.size(); ++i) {
    auto f = rd.row(i, 4);
    if (!f) continue;
    PbjRow r;
    bool good = true;
    if (!detail::parse_field((*f)[0].text, r.facility) || r.facility < 0) {
      rd.error(i + 1, (*f)[0].column, "facility_id must be a non-negative integer");
      good = false;
    }
    if (!detail::parse_field((*f)[1].text, r.county) || r.county < 0) {
      rd.error(i + 1, (*f)[1].column, "county must be a non-negative integer id");
      good = false;
    }
    if (!detail::parse_field((*f)[2].text, r.nurse_hours) || !(r.nurse_hours >= 0.0)) {
      rd.error(i + 1, (*f)[2].column, "avg_daily_nurse_hours must be a non-negative number");
      good = false;
    }
    if (!detail::parse_field((*f)[3].text, r.non_nurse_hours) || !(r.non_nurse_hours >= 0.0)) {
      rd.error(i + 1, (*f)[3].column, "avg_daily_non_nurse_hours must be a non-negative number");
      good = false;
    }
    if (good) rows.push_back(r);
  }
  return rows;
}

inline json world_to_json(const WorldSpec& w) {
  json j;
  j["scale_factor"] = w.scale_factor;
  j["bbox"] = {{"min_lat", w.bbox.min_lat}, {"max_lat", w.bbox.max_lat},
               {"min_lon", w.bbox.min_lon}, {"max_lon", w.bbox.max_lon}};
  json cs = json::array();
  for (const auto& c : w.counties)
    cs.push_back({{"id", c.id}, {"name", c.name}, {"population", c.population},
                  {"age_shares", c.age_shares}, {"lat", c.lat}, {"lon", c.lon}});
  j["counties"] = cs;
  json fs = json::array();
  for (const auto& f : w.facilities)
    fs.push_back({{"id", f.id},
                  {"kind", f.is_hospital() ? "hospital" : "nursing_home"},
                  {"county", f.county},
                  {"acute_beds", f.acute_beds},
                  {"icu_beds", f.icu_beds},
                  {"nh_capacity", f.nh_capacity},
                  {"nh_occupancy", f.nh_occupancy},
                  {"lat", f.lat},
                  {"lon", f.lon}});
  j["facilities"] = fs;
  return j;
}

/// Parses and validates a world spec. Errors name the JSON path.
inline WorldSpec world_from_json(const json& j) {
  WorldSpec w;
  detail::reject_unknown_keys(j, {"scale_factor", "bbox", "counties", "facilities"}, "world");
  try {
    w.scale_factor = j.at("scale_factor").get<double>();
    if (j.contains("bbox")) {
      const json& b = j.at("bbox");
      detail::reject_unknown_keys(b, {"min_lat", "max_lat", "min_lon", "max_lon"}, "world.bbox");
      w.bbox = {b.at("min_lat").get<double>(), b.at("max_lat").get<double>(), b.at("min_lon").get<double>(),
                b.at("max_lon").get<double>()};
    }
    std::size_t i = 0;
    for (const auto& c : j.at("counties")) {
      const std::string where = "world.counties[" + std::to_string(i++) + "]";
      detail::reject_unknown_keys(c, {"id", "name", "population", "age_shares", "lat", "lon"}, where);
      County k;
      k.id = c.at("id").get<CountyId>();
      k.name = c.at("name").get<std::string>();
      k.population = c.at("population").get<std::int64_t>();
      k.age_shares = c.at("age_shares").get<std::array<double, kNumAgeGroups>>();
      k.lat = c.at("lat").get<double>();
      k.lon = c.at("lon").get<double>();
      w.counties.push_back(k);
    }
    i = 0;
    for (const auto& f : j.at("facilities")) {
      const std::string where = "world.facilities[" + std::to_string(i++) + "]";
      detail::reject_unknown_keys(f, {"id", "kind", "county", "acute_beds", "icu_beds", "nh_capacity",
                                      "nh_occupancy", "lat", "lon"},
                                  where);
      Facility x;
      x.id = f.at("id").get<FacilityId>();
      const auto kind = f.at("kind").get<std::string>();
      if (kind == "hospital") x.kind = FacilityKind::Hospital;
      else if (kind == "nursing_home") x.kind = FacilityKind::NursingHome;
      else throw ConfigError(where + ".kind: expected 'hospital' or 'nursing_home'");
      x.county = f.at("county").get<CountyId>();
      x.acute_beds = f.value("acute_beds", 0);
      x.icu_beds = f.value("icu_beds", 0);
      x.nh_capacity = f.value("nh_capacity", 0);
      x.nh_occupancy = f.value("nh_occupancy", 0);
      x.lat = f.at("lat").get<double>();
      x.lon = f.at("lon").get<double>();
      w.facilities.push_back(x);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("world: ") + e.what());
  }
  w.validate();
  return w;
}

// ---------------------------------------------------------------- writers

inline std::string cases_to_csv(const std::vector<CaseRow>& rows) {
  std::string s(kCasesHeader);
  s += '\n';
  for (const auto& r : rows)
    s += std::to_string(r.county) + "," + r.date.iso() + "," + std::to_string(r.cases) + "\n";
  return s;
}

inline std::string vaccinations_to_csv(const std::vector<VaccinationRow>& rows) {
  std::string s(kVaccinationsHeader);
  s += '\n';
  for (const auto& r : rows)
    s += (r.county ? std::to_string(*r.county) : std::string("state")) + "," + std::to_string(index_of(r.age)) +
         "," + format_double(r.rate) + "\n";
  return s;
}

inline std::string pbj_to_csv(const std::vector<PbjRow>& rows) {
  std::string s(kPbjHeader);
  s += '\n';
  for (const auto& r : rows)
    s += std::to_string(r.facility) + "," + std::to_string(r.county) + "," + format_double(r.nurse_hours) + "," +
         format_double(r.non_nurse_hours) + "\n";
  return s;
}

inline std::string world_to_text(const WorldSpec& w) { return world_to_json(w).dump(2) + "\n"; }

// ---------------------------------------------------------------- loading

/// Cross-checks parsed inputs against the world and each other.
inline void cross_check_inputs(Inputs& in, const InputPaths& names, std::vector<Diagnostic>& diags) {
  const std::size_t n_counties = in.world.counties.size();

  std::stable_sort(in.cases.begin(), in.cases.end(), [](const CaseRow& a, const CaseRow& b) {
    return a.county != b.county ? a.county < b.county : a.date < b.date;
  });
  std::vector<std::size_t> case_rows(n_counties, 0);
  for (std::size_t i = 0; i < in.cases.size(); ++i) {
    const auto& r = in.cases[i];
    if (static_cast<std::size_t>(r.county) >= n_counties) {
      diags.push_back({names.cases, r.line, 1, "county " + std::to_string(r.county) + " is not in the world"});
      continue;
    }
    ++case_rows[static_cast<std::size_t>(r.county)];
    if (i > 0 && in.cases[i - 1].county == r.county) {
      const auto gap = r.date.days_since(in.cases[i - 1].date);
      if (gap == 0)
        diags.push_back({names.cases, r.line, 0,
                         "county " + std::to_string(r.county) + ": duplicate date " + r.date.iso()});
      else if (gap > 1)
        diags.push_back({names.cases, r.line, 0,
                         "county " + std::to_string(r.county) + ": missing dates after " +
                             in.cases[i - 1].date.iso()});
    }
  }
  for (std::size_t c = 0; c < n_counties; ++c)
    if (case_rows[c] == 0)
      diags.push_back({names.cases, 0, 0, "county " + std::to_string(c) + " has no case rows"});

  std::set<std::pair<int, std::size_t>> seen;
  for (const auto& r : in.vaccinations) {
    const int c = r.county ? *r.county : -1;
    if (r.county && static_cast<std::size_t>(*r.county) >= n_counties) {
      diags.push_back({names.vaccinations, r.line, 1, "county " + std::to_string(c) + " is not in the world"});
      continue;
    }
    if (!seen.insert({c, index_of(r.age)}).second)
      diags.push_back({names.vaccinations, r.line, 0,
                       (r.county ? "county " + std::to_string(c) : std::string("state")) +
                           ": duplicate row for age group " + std::to_string(index_of(r.age))});
    if (!r.county && !(r.rate > 0.0))
      diags.push_back({names.vaccinations, r.line, 3,
                       "state rate for age group " + std::to_string(index_of(r.age)) + " must be positive"});
  }
  for (std::size_t a = 0; a < kNumAgeGroups; ++a) {
    if (!seen.count({-1, a}))
      diags.push_back({names.vaccinations, 0, 0, "missing state row for age group " + std::to_string(a)});
    for (std::size_t c = 0; c < n_counties; ++c)
      if (!seen.count({static_cast<int>(c), a}))
        diags.push_back({names.vaccinations, 0, 0,
                         "county " + std::to_string(c) + " has no vaccination row for age group " +
                             std::to_string(a)});
  }

  std::map<FacilityId, const PbjRow*> pbj;
  for (const auto& r : in.pbj) {
    const auto fi = static_cast<std::size_t>(r.facility);
    if (fi >= in.world.facilities.size() || !in.world.facilities[fi].is_nursing_home()) {
      diags.push_back({names.pbj, 0, 0, "facility " + std::to_string(r.facility) + " is not a nursing home"});
      continue;
    }
    if (in.world.facilities[fi].county != r.county)
      diags.push_back({names.pbj, 0, 0,
                       "facility " + std::to_string(r.facility) + ": county " + std::to_string(r.county) +
                           " differs from the world's " + std::to_string(in.world.facilities[fi].county)});
    if (!pbj.emplace(r.facility, &r).second)
      diags.push_back({names.pbj, 0, 0, "facility " + std::to_string(r.facility) + ": duplicate row"});
  }
  for (const auto& f : in.world.facilities)
    if (f.is_nursing_home() && !pbj.count(f.id))
      diags.push_back({names.pbj, 0, 0, "nursing home " + std::to_string(f.id) + " has no PBJ row"});
}

/// Loads the world spec and the three data files named in `paths`, relative
/// to `base`. Throws InputError listing every problem found.
inline Inputs load_inputs(const std::filesystem::path& base, const InputPaths& paths) {
  Inputs in;
  std::vector<Diagnostic> diags;
  auto read = [&](const std::string& name) -> std::optional<std::string> {
    try {
      return read_text_file(base / name);
    } catch (const InputError& e) {
      diags.insert(diags.end(), e.diagnostics().begin(), e.diagnostics().end());
      return std::nullopt;
    }
  };
  bool world_ok = false;
  if (auto t = read(paths.world)) {
    try {
      in.world = world_from_json(json::parse(*t));
      world_ok = true;
    } catch (const nlohmann::json::parse_error& e) {
      diags.push_back({paths.world, 0, 0, e.what()});
    } catch (const ConfigError& e) {
      diags.push_back({paths.world, 0, 0, e.what()});
    }
  }
  if (auto t = read(paths.cases)) in.cases = parse_cases_csv(*t, paths.cases, diags);
  if (auto t = read(paths.vaccinations)) in.vaccinations = parse_vaccinations_csv(*t, paths.vaccinations, diags);
  if (auto t = read(paths.pbj)) in.pbj = parse_pbj_csv(*t, paths.pbj, diags);
  if (world_ok && diags.empty()) cross_check_inputs(in, paths, diags);
  if (!diags.empty()) throw InputError(std::move(diags));
  return in;
}

inline RunConfig load_run_config(const std::filesystem::path& file) {
  const std::string text = read_text_file(file);
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  RunConfig c = run_config_from_json(j);
  c.validate();
  return c;
}

// ---------------------------------------------------------------- synth

/// Desk-scale generator description. See configs/desk_synth.json.
struct SynthCounty {
  std::string name;
  std::int64_t population = 0;
  std::array<double, kNumAgeGroups> age_shares{0.62, 0.20, 0.18};
  double lat = 0.0;
  double lon = 0.0;
  int nursing_homes = 0;
  int acute_beds = 0;
  int icu_beds = 0;
  // Daily reported cases: base + peak * exp(-((d - peak_day) / width)^2 / 2),
  // times a lognormal-ish noise factor, rounded.
  double base_cases = 0.0;
  double peak_cases = 0.0;
  double peak_day = 0.0;
  double peak_width = 1.0;
};

struct SynthSpec {
  Date start_date{2021, 12, 15};
  int history_days = 150;
  double scale_factor = 1.0;
  BoundingBox bbox;
  std::vector<SynthCounty> counties;
  double case_noise = 0.0;  // relative sd of daily cases
  int nh_capacity_min = 150;
  int nh_capacity_max = 260;
  double nh_occupancy = 0.85;
  double nurse_hours_per_resident = 3.9;
  double non_nurse_hours_per_resident = 1.0;
  double hours_jitter = 0.1;  // relative sd per facility
  std::array<double, kNumAgeGroups> vaccination_targets{0.47, 0.74, 0.92};
  double vaccination_spread = 0.04;  // sd of county deviations
  double facility_scatter_miles = 8.0;
  json run_config = json::object();  // partial RunConfig emitted as config.json

  void validate() const {
    if (counties.empty()) throw ConfigError("synth: no counties");
    if (history_days < 1) throw ConfigError("synth: history_days must be >= 1");
    if (nh_capacity_min < 1 || nh_capacity_max < nh_capacity_min)
      throw ConfigError("synth: nursing home capacity range is empty");
    if (!(nh_occupancy >= 0.0 && nh_occupancy <= 1.0)) throw ConfigError("synth: occupancy outside [0, 1]");
    if (!(case_noise >= 0.0) || !(hours_jitter >= 0.0) || !(vaccination_spread >= 0.0))
      throw ConfigError("synth: noise parameters must be >= 0");
    for (double v : vaccination_targets)
      if (!(v > 0.0 && v <= 1.0)) throw ConfigError("synth: vaccination targets must be in (0, 1]");
    for (const auto& c : counties) {
      if (c.population < 1) throw ConfigError("synth: county '" + c.name + "' has no population");
      if (c.nursing_homes < 0 || c.acute_beds < 0 || c.icu_beds < 0)
        throw ConfigError("synth: county '" + c.name + "' has negative facility counts");
      if (!(c.base_cases >= 0.0 && c.peak_cases >= 0.0 && c.peak_width > 0.0))
        throw ConfigError("synth: county '" + c.name + "' has an invalid incidence shape");
      if (!bbox.contains(c.lat, c.lon))
        throw ConfigError("synth: county '" + c.name + "' lies outside the bounding box");
    }
  }
};

inline SynthSpec synth_spec_from_json(const json& j) {
  using detail::read;
  SynthSpec s;
  const std::string w = "synth";
  detail::reject_unknown_keys(j, {"start_date", "history_days", "scale_factor", "bbox", "counties", "case_noise",
                                  "nh_capacity_min", "nh_capacity_max", "nh_occupancy",
                                  "nurse_hours_per_resident", "non_nurse_hours_per_resident", "hours_jitter",
                                  "vaccination_targets", "vaccination_spread", "facility_scatter_miles",
                                  "run_config"},
                              w);
  if (j.contains("start_date")) s.start_date = Date::parse(j.at("start_date").get<std::string>());
  read(j, "history_days", s.history_days, w);
  read(j, "scale_factor", s.scale_factor, w);
  if (j.contains("bbox")) {
    const json& b = j.at("bbox");
    detail::reject_unknown_keys(b, {"min_lat", "max_lat", "min_lon", "max_lon"}, w + ".bbox");
    read(b, "min_lat", s.bbox.min_lat, w);
    read(b, "max_lat", s.bbox.max_lat, w);
    read(b, "min_lon", s.bbox.min_lon, w);
    read(b, "max_lon", s.bbox.max_lon, w);
  }
  read(j, "case_noise", s.case_noise, w);
  read(j, "nh_capacity_min", s.nh_capacity_min, w);
  read(j, "nh_capacity_max", s.nh_capacity_max, w);
  read(j, "nh_occupancy", s.nh_occupancy, w);
  read(j, "nurse_hours_per_resident", s.nurse_hours_per_resident, w);
  read(j, "non_nurse_hours_per_resident", s.non_nurse_hours_per_resident, w);
  read(j, "hours_jitter", s.hours_jitter, w);
  read(j, "vaccination_targets", s.vaccination_targets, w);
  read(j, "vaccination_spread", s.vaccination_spread, w);
  read(j, "facility_scatter_miles", s.facility_scatter_miles, w);
  if (j.contains("run_config")) s.run_config = j.at("run_config");
  if (j.contains("counties")) {
    std::size_t i = 0;
    for (const auto& c : j.at("counties")) {
      const std::string wc = w + ".counties[" + std::to_string(i++) + "]";
      detail::reject_unknown_keys(c, {"name", "population", "age_shares", "lat", "lon", "nursing_homes",
                                      "acute_beds", "icu_beds", "base_cases", "peak_cases", "peak_day",
                                      "peak_width"},
                                  wc);
      SynthCounty k;
      read(c, "name", k.name, wc);
      read(c, "population", k.population, wc);
      read(c, "age_shares", k.age_shares, wc);
      read(c, "lat", k.lat, wc);
      read(c, "lon", k.lon, wc);
      read(c, "nursing_homes", k.nursing_homes, wc);
      read(c, "acute_beds", k.acute_beds, wc);
      read(c, "icu_beds", k.icu_beds, wc);
      read(c, "base_cases", k.base_cases, wc);
      read(c, "peak_cases", k.peak_cases, wc);
      read(c, "peak_day", k.peak_day, wc);
      read(c, "peak_width", k.peak_width, wc);
      s.counties.push_back(k);
    }
  }
  s.validate();
  return s;
}

struct SynthBundle {
  Inputs inputs;
  RunConfig config;
};

namespace detail {

// Offset a point by roughly (north, east) miles.
inline std::pair<double, double> offset_miles(double lat, double lon, double north, double east) {
  constexpr double kMilesPerDegLat = 69.0;
  const double mpd_lon = kMilesPerDegLat * std::cos(lat * 3.14159265358979323846 / 180.0);
  return {lat + north / kMilesPerDegLat, lon + east / mpd_lon};
}

}  // namespace detail

/// Generates a consistent input bundle. The statewide vaccination rate of
/// each age group is the population-weighted mean of the county rates
/// written to the file.
inline SynthBundle synth_inputs(const SynthSpec& spec, RngStream& rng) {
  spec.validate();
  SynthBundle b;
  Inputs& in = b.inputs;
  in.world.scale_factor = spec.scale_factor;
  in.world.bbox = spec.bbox;

  for (std::size_t c = 0; c < spec.counties.size(); ++c) {
    const auto& sc = spec.counties[c];
    County k;
    k.id = static_cast<CountyId>(c);
    k.name = sc.name;
    k.population = sc.population;
    k.age_shares = sc.age_shares;
    k.lat = sc.lat;
    k.lon = sc.lon;
    in.world.counties.push_back(k);
  }

  auto place = [&](const County& k) {
    for (;;) {
      const auto [lat, lon] = detail::offset_miles(k.lat, k.lon, rng.normal(0.0, spec.facility_scatter_miles),
                                                   rng.normal(0.0, spec.facility_scatter_miles));
      if (spec.bbox.contains(lat, lon)) return std::pair{lat, lon};
    }
  };

  FacilityId next = 0;
  for (std::size_t c = 0; c < spec.counties.size(); ++c) {
    const auto& sc = spec.counties[c];
    const auto& k = in.world.counties[c];
    // Nursing home residents come from the county's oldest agents.
    std::int64_t old = largest_remainder(k.population, k.age_shares)[kNumAgeGroups - 1];
    for (int n = 0; n < sc.nursing_homes; ++n) {
      Facility f;
      f.id = next++;
      f.kind = FacilityKind::NursingHome;
      f.county = k.id;
      f.nh_capacity = spec.nh_capacity_min +
                      static_cast<int>(rng.uniform_below(
                          static_cast<std::uint64_t>(spec.nh_capacity_max - spec.nh_capacity_min + 1)));
      f.nh_occupancy = static_cast<int>(std::lround(spec.nh_occupancy * f.nh_capacity));
      std::tie(f.lat, f.lon) = place(k);
      in.world.facilities.push_back(f);
      old -= f.nh_occupancy;
    }
    if (old < 0)
      throw ConfigError("synth: county '" + sc.name + "' has more nursing home residents than agents aged 65+");
    if (sc.acute_beds + sc.icu_beds > 0) {
      Facility h;
      h.id = next++;
      h.kind = FacilityKind::Hospital;
      h.county = k.id;
      h.acute_beds = sc.acute_beds;
      h.icu_beds = sc.icu_beds;
      std::tie(h.lat, h.lon) = place(k);
      in.world.facilities.push_back(h);
    }
  }
  in.world.validate();

  const Date first = spec.start_date.plus_days(-(spec.history_days - 1));
  for (std::size_t c = 0; c < spec.counties.size(); ++c) {
    const auto& sc = spec.counties[c];
    for (int d = 0; d < spec.history_days; ++d) {
      const double z = (d - sc.peak_day) / sc.peak_width;
      double mean = sc.base_cases + sc.peak_cases * std::exp(-0.5 * z * z);
      if (spec.case_noise > 0.0) mean *= std::max(0.0, rng.normal(1.0, spec.case_noise));
      in.cases.push_back({static_cast<CountyId>(c), first.plus_days(d), std::llround(mean), 0});
    }
  }

  std::array<double, kNumAgeGroups> num{}, den{};
  for (std::size_t c = 0; c < spec.counties.size(); ++c) {
    const auto& k = in.world.counties[c];
    const auto counts = largest_remainder(k.population, k.age_shares);
    for (std::size_t a = 0; a < kNumAgeGroups; ++a) {
      const double rate = std::clamp(spec.vaccination_targets[a] + rng.normal(0.0, spec.vaccination_spread), 0.0, 1.0);
      in.vaccinations.push_back({k.id, kAgeGroups[a], rate, 0});
      num[a] += rate * static_cast<double>(counts[a]);
      den[a] += static_cast<double>(counts[a]);
    }
  }
  for (std::size_t a = 0; a < kNumAgeGroups; ++a) {
    const double sr = den[a] > 0.0 ? num[a] / den[a] : spec.vaccination_targets[a];
    if (!(sr > 0.0)) throw ConfigError("synth: statewide vaccination rate for age group " + std::to_string(a) + " is zero");
    in.vaccinations.push_back({std::nullopt, kAgeGroups[a], sr, 0});
  }

  auto jitter = [&] { return std::max(0.0, rng.normal(1.0, spec.hours_jitter)); };
  for (const auto& f : in.world.facilities) {
    if (!f.is_nursing_home()) continue;
    PbjRow r;
    r.facility = f.id;
    r.county = f.county;
    // Hours to two decimals so the files stay readable.
    r.nurse_hours = std::round(spec.nurse_hours_per_resident * f.nh_occupancy * jitter() * 100.0) / 100.0;
    r.non_nurse_hours = std::round(spec.non_nurse_hours_per_resident * f.nh_occupancy * jitter() * 100.0) / 100.0;
    in.pbj.push_back(r);
  }

  b.config = run_config_from_json(spec.run_config);
  b.config.start_date = spec.start_date;
  b.config.validate();
  return b;
}

/// Writes world.json, the three CSVs and config.json into `dir`.
inline void write_bundle(const std::filesystem::path& dir, const SynthBundle& b) {
  RunConfig cfg = b.config;
  cfg.inputs = InputPaths{};
  write_text_file(dir / cfg.inputs.world, world_to_text(b.inputs.world));
  write_text_file(dir / cfg.inputs.cases, cases_to_csv(b.inputs.cases));
  write_text_file(dir / cfg.inputs.vaccinations, vaccinations_to_csv(b.inputs.vaccinations));
  write_text_file(dir / cfg.inputs.pbj, pbj_to_csv(b.inputs.pbj));
  write_text_file(dir / "config.json", to_json(cfg).dump(2) + "\n");
}

}  // namespace facsim
