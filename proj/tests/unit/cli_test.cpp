// Copyright 2026 The memsg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "memsg/util/hash.hpp"
#include "memsg_cli/cli.hpp"
#include "test_support.hpp"

namespace memsg {
namespace {

namespace fs = std::filesystem;

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "memsg");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::run_cli(static_cast<int>(argv.size()), argv.data());
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(util::read_file(p)); }

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run({"--help"}), cli::kExitOk);
  EXPECT_EQ(run({"train", "--help"}), cli::kExitOk);
  EXPECT_EQ(run({}), cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}), cli::kExitUsage);
  EXPECT_EQ(run({"synth", "--out", "x", "--bogus"}), cli::kExitUsage);
  EXPECT_EQ(run({"synth", "--out", "x", "--train", "0"}), cli::kExitUsage);
  EXPECT_EQ(run({"eval", "--pred", "/nonexistent/a", "--gt", "/nonexistent/b"}), cli::kExitUsage);
}

TEST(Cli, DataErrorsExitTwo) {
  testing::TempDir dir("cli_bad");
  const auto bad = dir.path() / "bad.jsonl";
  util::write_file_atomic(bad, "{\"take_id\": \"x\", \"t\": 0}\nnot json\n");
  EXPECT_EQ(run({"eval", "--pred", bad.string(), "--gt", bad.string()}), cli::kExitData);
  EXPECT_EQ(run({"train", "--data", bad.string(), "--out", (dir.path() / "m.ckpt").string()}),
            cli::kExitData);
  const auto scen = dir.path() / "scenario.json";
  util::write_file_atomic(scen, "{\"phases\": []}");
  EXPECT_EQ(run({"synth", "--scenario", scen.string(), "--out", (dir.path() / "b").string()}),
            cli::kExitData);
}

TEST(Cli, SmokePipelineIsReproducible) {
  testing::TempDir dir("cli_smoke");
  const auto root = dir.path();
  const std::string bench = (root / "bench").string();
  ASSERT_EQ(run({"synth", "--out", bench, "--seed", "3", "--train", "2", "--val", "1", "--test",
                 "1"}),
            cli::kExitOk);
  const auto synth_manifest = read_json(root / "bench" / "run_manifest.json");
  EXPECT_EQ(synth_manifest["command"], "synth");
  EXPECT_EQ(synth_manifest["outputs"].size(), 4u);

  auto train = [&](const std::string& variant, const std::string& out,
                   std::vector<std::string> extra) {
    std::vector<std::string> args{"train",         "--data",   bench,  "--variant", variant,
                                  "--epochs",      "2",        "--hidden-dim", "16",
                                  "--seed",        "5",        "--out",  out};
    args.insert(args.end(), extra.begin(), extra.end());
    return run(args);
  };
  const std::string visual = (root / "visual.ckpt").string();
  const std::string mem = (root / "memory.ckpt").string();
  const std::string mem2 = (root / "memory_again.ckpt").string();
  ASSERT_EQ(train("visual", visual, {}), cli::kExitOk);
  ASSERT_EQ(train("memory", mem, {"--init-from", visual, "--memory-mode", "longshort"}), cli::kExitOk);
  ASSERT_EQ(train("memory", mem2, {"--init-from", visual, "--memory-mode", "longshort"}), cli::kExitOk);
  EXPECT_EQ(util::sha256_file(mem), util::sha256_file(mem2));
  EXPECT_TRUE(fs::exists(mem + ".log.json"));
  const auto m1 = read_json(mem + ".manifest.json");
  const auto m2 = read_json(mem2 + ".manifest.json");
  EXPECT_EQ(m1["config"], m2["config"]);
  EXPECT_EQ(m1["inputs"], m2["inputs"]);
  EXPECT_EQ(m1["outputs"][0]["sha256"], m2["outputs"][0]["sha256"]);
  EXPECT_TRUE(m1.contains("timings"));

  const std::string preds = (root / "preds").string();
  const std::string preds2 = (root / "preds_again").string();
  ASSERT_EQ(run({"infer", "--ckpt", mem, "--data", bench, "--out", preds}), cli::kExitOk);
  ASSERT_EQ(run({"infer", "--ckpt", mem2, "--data", bench, "--out", preds2}), cli::kExitOk);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(preds)) {
    if (e.path().extension() != ".jsonl") continue;
    ++files;
    EXPECT_EQ(util::sha256_file(e.path()), util::sha256_file(fs::path(preds2) / e.path().filename()));
    EXPECT_EQ(util::read_file(e.path()).find("pair_features"), std::string::npos);
  }
  EXPECT_EQ(files, 1u);

  const std::string report = (root / "report.json").string();
  ASSERT_EQ(run({"eval", "--pred", preds, "--gt", bench + "/test", "--out", report}), cli::kExitOk);
  const auto r = read_json(report);
  EXPECT_GE(r["macro_f1"].get<double>(), 0.0);
  EXPECT_LE(r["macro_f1"].get<double>(), 1.0);
  EXPECT_GE(r["consistency"].get<double>(), 0.0);
  EXPECT_TRUE(fs::exists(report + ".manifest.json"));

  const std::string attn = (root / "attn.json").string();
  ASSERT_EQ(run({"attn-dump", "--ckpt", mem, "--data", bench + "/test", "--out", attn}), cli::kExitOk);
  const auto a = read_json(attn);
  ASSERT_EQ(a["recordings"].size(), 1u);
  const auto& tps = a["recordings"][0]["timepoints"];
  ASSERT_GT(tps.size(), 1u);
  // Weights over a window sum to one per head.
  const auto& heads = tps[tps.size() - 1]["layers"][0]["heads"];
  double total = 0.0;
  for (const auto& e : heads[0]) total += e["weight"].get<double>();
  EXPECT_NEAR(total, 1.0, 1e-9);
  EXPECT_EQ(run({"attn-dump", "--ckpt", visual, "--data", bench + "/test", "--out", attn}),
            cli::kExitData);

  // Flags override the config file.
  const auto cfg = root / "train.json";
  util::write_file_atomic(cfg, R"({"epochs": 1, "lambda": 0.1, "hidden_dim": 16})");
  const std::string over = (root / "over.ckpt").string();
  ASSERT_EQ(run({"train", "--data", bench, "--variant", "visual", "--config", cfg.string(),
                 "--lambda", "0.3", "--out", over}),
            cli::kExitOk);
  const auto om = read_json(over + ".manifest.json");
  const auto& oc = om["config"];
  EXPECT_EQ(oc["epochs"], 1);
  EXPECT_EQ(oc["lambda"], 0.3);
}

TEST(Cli, AblateWritesTables) {
  testing::TempDir dir("cli_ablate");
  const std::string bench = (dir.path() / "bench").string();
  ASSERT_EQ(run({"synth", "--out", bench, "--seed", "4", "--train", "1", "--val", "1", "--test", "1"}),
            cli::kExitOk);
  const auto grid = dir.path() / "grid.json";
  util::write_file_atomic(grid, R"({"variants": ["visual", "memory"], "techniques": ["full"],
    "modes": ["longshort"], "seeds": [0], "train": {"epochs": 1, "hidden_dim": 16}})");
  const std::string out = (dir.path() / "abl").string();
  ASSERT_EQ(run({"ablate", "--config", grid.string(), "--data", bench, "--out", out}), cli::kExitOk);
  for (const char* f : {"results.csv", "summary.csv", "results.json", "summary.txt", "run_manifest.json"})
    EXPECT_TRUE(fs::exists(fs::path(out) / f)) << f;
  const auto results = read_json(fs::path(out) / "results.json");
  EXPECT_EQ(results["rows"].size(), 2u);
}

}  // namespace
}  // namespace memsg
