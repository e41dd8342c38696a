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

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "facsim/facsim.hpp"

namespace fs = std::filesystem;
using namespace facsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string config;
  std::string spec;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> horizon;
  bool dump_defaults = false;
};

// --out wins, then FACSIM_OUT_DIR, then ./out.
fs::path out_dir(const Options& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("FACSIM_OUT_DIR"); env && *env) return env;
  return "out";
}

struct Loaded {
  RunConfig cfg;
  Inputs inputs;
};

Loaded load(const Options& o) {
  if (o.config.empty()) throw ConfigError("--config is required");
  Loaded l;
  l.cfg = load_run_config(o.config);
  if (o.seed) l.cfg.seed = *o.seed;
  if (o.horizon) l.cfg.horizon = *o.horizon;
  l.cfg.validate();
  l.inputs = load_inputs(fs::path(o.config).parent_path(), l.cfg.inputs);
  return l;
}

EventLog read_log(const fs::path& dir) {
  std::ifstream in(dir / "events.csv", std::ios::binary);
  if (!in) throw ConfigError("cannot open " + (dir / "events.csv").string() + "; run the simulation first");
  return EventLog::read_csv(in);
}

int cmd_synth(const Options& o) {
  if (o.spec.empty()) throw ConfigError("--spec is required");
  SynthSpec spec = synth_spec_from_json(json::parse(read_text_file(o.spec)));
  auto rng = RngStream::derive(o.seed.value_or(1), "synth", 0);
  SynthBundle b = synth_inputs(spec, rng);
  if (o.horizon) b.config.horizon = *o.horizon;
  const fs::path dir = out_dir(o);
  write_bundle(dir, b);
  // Prove the bundle loads before reporting success.
  load_inputs(dir, InputPaths{});
  std::cout << "wrote input bundle to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_forecast(const Options& o) {
  const Loaded l = load(o);
  const auto b = compute_forecasts(l.cfg, l.inputs);
  const fs::path dir = out_dir(o);
  write_text_file(dir / "forecast.csv", forecast_csv(b.forecasts));
  std::cout << "wrote " << (dir / "forecast.csv").string() << "\n";
  return kExitOk;
}

int cmd_run(const Options& o) {
  Loaded l = load(o);
  Simulation sim(l.cfg, l.inputs);
  sim.run();
  const fs::path dir = out_dir(o);
  write_text_file(dir / "events.csv", sim.log().to_csv());
  write_text_file(dir / "forecast.csv", forecast_csv(sim.forecasts()));
  write_text_file(dir / "hcw_assignments.csv", hcw_assignments_csv(sim.world().hcws));
  write_reports(dir, sim.log(), sim.inputs(), sim.config());
  std::printf("simulated %d days, %zu events, checksum %016llx\n", sim.day(), sim.log().size(),
              static_cast<unsigned long long>(sim.log().checksum()));
  std::printf("outputs in %s\n", dir.string().c_str());
  return kExitOk;
}

int cmd_validate(const Options& o) {
  const Loaded l = load(o);
  const EventLog log = read_log(out_dir(o));
  const auto checks = validate_run(log, l.inputs, l.cfg);
  std::cout << check_table(checks);
  const bool ok = all_passed(checks);
  std::cout << (ok ? "validation passed\n" : "validation FAILED\n");
  return ok ? kExitOk : kExitValidation;
}

int cmd_report(const Options& o) {
  const Loaded l = load(o);
  const fs::path dir = out_dir(o);
  const EventLog log = read_log(dir);
  write_reports(dir, log, l.inputs, l.cfg);
  std::cout << "reports written to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_config(const Options& o) {
  if (!o.dump_defaults) throw ConfigError("config: nothing to do (use --dump-defaults)");
  std::cout << to_json(RunConfig{}).dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"County-level COVID-19 facility simulator"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool with_config) {
    if (with_config) sub->add_option("--config", o.config, "Run configuration (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory (default: $FACSIM_OUT_DIR or ./out)");
    sub->add_option("--seed", o.seed, "Override the root seed");
    sub->add_option("--horizon", o.horizon, "Override the number of simulated days")->check(CLI::PositiveNumber);
  };
  auto* synth = app.add_subcommand("synth", "Generate a synthetic input bundle");
  synth->add_option("--spec", o.spec, "Generator spec (JSON)")->required()->check(CLI::ExistingFile);
  common(synth, false);
  auto* forecast = app.add_subcommand("forecast", "Write the SEIRS county forecasts only");
  common(forecast, true);
  auto* run = app.add_subcommand("run", "Run a full simulation and write the event log and reports");
  common(run, true);
  auto* validate = app.add_subcommand("validate", "Recompute patterns from a saved event log and check tolerances");
  common(validate, true);
  auto* report = app.add_subcommand("report", "Rewrite reports from a saved event log");
  common(report, true);
  auto* config = app.add_subcommand("config", "Configuration utilities");
  config->add_flag("--dump-defaults", o.dump_defaults, "Print the default run configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth(o);
    if (forecast->parsed()) return cmd_forecast(o);
    if (run->parsed()) return cmd_run(o);
    if (validate->parsed()) return cmd_validate(o);
    if (report->parsed()) return cmd_report(o);
    if (config->parsed()) return cmd_config(o);
  } catch (const InputError& e) {
    std::cerr << "input error:\n" << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "json error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
