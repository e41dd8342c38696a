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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>

#include "facsim/facsim.hpp"
#include "test_support.hpp"

namespace facsim {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
};

Result cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" FACSIM_CLI_PATH "' " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 512> buf{};
  while (std::fgets(buf.data(), buf.size(), p)) r.out += buf.data();
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string checksum_of(const std::string& out) {
  const auto p = out.find("checksum ");
  return p == std::string::npos ? "" : out.substr(p + 9, 16);
}

fs::path bundle(const std::string& name) {
  const auto dir = testing::fresh_dir(name);
  write_bundle(dir, testing::tiny_bundle());
  return dir;
}

TEST(Cli, RunTwiceSameChecksum) {
  const auto dir = bundle("cli_run");
  const std::string cfg = (dir / "config.json").string();
  const auto a = cli("run --config " + cfg + " --seed 7 --horizon 5 --out " + (dir / "a").string());
  const auto b = cli("run --config " + cfg + " --seed 7 --horizon 5 --out " + (dir / "b").string());
  ASSERT_EQ(a.code, 0) << a.out;
  ASSERT_EQ(b.code, 0) << b.out;
  EXPECT_FALSE(checksum_of(a.out).empty());
  EXPECT_EQ(checksum_of(a.out), checksum_of(b.out));
  EXPECT_EQ(read_text_file(dir / "a" / "events.csv"), read_text_file(dir / "b" / "events.csv"));
  const auto c = cli("run --config " + cfg + " --seed 8 --horizon 5 --out " + (dir / "c").string());
  EXPECT_NE(checksum_of(a.out), checksum_of(c.out));
}

TEST(Cli, HorizonOverride) {
  const auto dir = bundle("cli_horizon");
  const auto r = cli("run --config " + (dir / "config.json").string() + " --horizon 1 --out " + (dir / "o").string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("simulated 1 days"), std::string::npos) << r.out;
  std::istringstream is(read_text_file(dir / "o" / "events.csv"));
  const auto log = EventLog::read_csv(is);
  EXPECT_EQ(log.count(EventKind::Census), 1u);
  for (const auto& e : log) EXPECT_LE(e.day, 0);
}

TEST(Cli, ValidateExitCodes) {
  const auto dir = bundle("cli_validate");
  const std::string cfg = (dir / "config.json").string();
  const std::string out = " --out " + (dir / "o").string();
  ASSERT_EQ(cli("run --config " + cfg + " --horizon 10" + out).code, 0);
  // five small homes over ten days are too noisy for the default hours band
  json j = json::parse(read_text_file(cfg));
  j["validation"]["pattern4_mean_min"] = 0.5;
  j["validation"]["pattern4_mean_max"] = 1.5;
  j["validation"]["pattern4_std_max"] = 0.5;
  write_text_file(dir / "loose.json", j.dump());
  const auto ok = cli("validate --config " + (dir / "loose.json").string() + out);
  EXPECT_EQ(ok.code, 0) << ok.out;
  // an impossible tolerance turns the same log into a failure
  j["validation"]["pattern4_mean_max"] = 0.0;
  j["validation"]["pattern4_mean_min"] = 0.0;
  write_text_file(dir / "strict.json", j.dump());
  const auto bad = cli("validate --config " + (dir / "strict.json").string() + out);
  EXPECT_EQ(bad.code, 1) << bad.out;
  EXPECT_NE(bad.out.find("FAIL"), std::string::npos);
}

TEST(Cli, UsageAndInputErrorsExitTwo) {
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("run --config /nonexistent.json").code, 2);
  EXPECT_EQ(cli("run --horizon 0 --config x").code, 2);
  const auto dir = bundle("cli_badinput");
  write_text_file(dir / "covid19_cases.csv", "county,date,cases\n0,2021-01-01,-1\n");
  const auto r = cli("run --config " + (dir / "config.json").string() + " --out " + (dir / "o").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("covid19_cases.csv:2:14: negative case count"), std::string::npos) << r.out;
  json j = json::parse(read_text_file(dir / "config.json"));
  j["bogus"] = 1;
  write_text_file(dir / "bogus.json", j.dump());
  const auto u = cli("run --config " + (dir / "bogus.json").string());
  EXPECT_EQ(u.code, 2);
  EXPECT_NE(u.out.find("bogus"), std::string::npos) << u.out;
}

TEST(Cli, OutDirFromEnvironment) {
  const auto dir = bundle("cli_env");
  const auto target = dir / "from_env";
  const auto r = cli("run --config " + (dir / "config.json").string() + " --horizon 2",
                     "FACSIM_OUT_DIR='" + target.string() + "'");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(target / "events.csv"));
  // --out beats the environment
  const auto r2 = cli("run --config " + (dir / "config.json").string() + " --horizon 2 --out " + (dir / "flag").string(),
                      "FACSIM_OUT_DIR='" + (dir / "ignored").string() + "'");
  ASSERT_EQ(r2.code, 0);
  EXPECT_TRUE(fs::exists(dir / "flag" / "events.csv"));
  EXPECT_FALSE(fs::exists(dir / "ignored"));
}

TEST(Cli, SynthThenReport) {
  const auto dir = testing::fresh_dir("cli_synth");
  const auto s = cli("synth --spec '" FACSIM_SOURCE_DIR "/configs/desk_synth.json' --horizon 3 --out " + dir.string());
  ASSERT_EQ(s.code, 0) << s.out;
  for (const char* f : {"world.json", "covid19_cases.csv", "vaccinations_by_age.csv", "PBJ.csv", "config.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  const std::string cfg = " --config " + (dir / "config.json").string() + " --out " + dir.string();
  ASSERT_EQ(cli("run" + cfg).code, 0);
  fs::remove(dir / "pattern2.csv");
  const auto r = cli("report" + cfg);
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir / "pattern2.csv"));
}

TEST(Cli, DumpDefaultsIsAValidConfigShape) {
  const auto r = cli("config --dump-defaults");
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_NO_THROW(run_config_from_json(j));
}

}  // namespace
}  // namespace facsim
