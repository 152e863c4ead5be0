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

#include "memsg_cli/run_manifest.hpp"

#include <algorithm>
#include <ctime>

#include "json.hpp"
#include "memsg/util/hash.hpp"

#ifndef MEMSG_VERSION
#define MEMSG_VERSION "unknown"
#endif

namespace memsg::cli {
namespace {

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void hash_into(const std::filesystem::path& path,
               std::vector<std::pair<std::string, std::string>>& out) {
  namespace fs = std::filesystem;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(path)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.emplace_back(f.generic_string(), util::sha256_file(f));
  } else if (fs::is_regular_file(path)) {
    out.emplace_back(path.generic_string(), util::sha256_file(path));
  }
}

}  // namespace

RunManifest::RunManifest(std::string command, std::string config_json)
    : command_(std::move(command)),
      config_json_(std::move(config_json)),
      started_(std::chrono::steady_clock::now()),
      started_utc_(utc_now()) {}

void RunManifest::add_seed(std::string name, std::uint64_t value) {
  seeds_.emplace_back(std::move(name), value);
}

void RunManifest::add_input(const std::filesystem::path& path) { hash_into(path, inputs_); }
void RunManifest::add_output(const std::filesystem::path& path) { hash_into(path, outputs_); }

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = "memsg";
  j["version"] = MEMSG_VERSION;
  j["command"] = command_;
  j["config"] = nlohmann::ordered_json::parse(config_json_);
  j["seeds"] = nlohmann::ordered_json::object();
  for (const auto& [name, value] : seeds_) j["seeds"][name] = value;
  j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& [path, hash] : inputs_) j["inputs"].push_back({{"path", path}, {"sha256", hash}});
  j["outputs"] = nlohmann::ordered_json::array();
  for (const auto& [path, hash] : outputs_) {
    j["outputs"].push_back({{"path", path}, {"sha256", hash}});
  }
  j["timings"] = {{"started_utc", started_utc_}, {"wall_seconds", wall_seconds_}};
  return j.dump(2) + "\n";
}

void RunManifest::write(const std::filesystem::path& path) {
  wall_seconds_ =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
  util::write_file_atomic(path, to_json());
}

}  // namespace memsg::cli
