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

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace memsg::cli {

// Reproducibility record written next to every artifact an invocation
// produces. Everything except `timings` is a function of the inputs.
class RunManifest {
 public:
  RunManifest(std::string command, std::string config_json);

  void add_seed(std::string name, std::uint64_t value);
  void add_input(const std::filesystem::path& path);  // files or directories of files
  void add_output(const std::filesystem::path& path);

  std::string to_json() const;
  // Finalises timings and writes atomically.
  void write(const std::filesystem::path& path);

 private:
  std::string command_;
  std::string config_json_;
  std::vector<std::pair<std::string, std::uint64_t>> seeds_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::pair<std::string, std::string>> outputs_;
  std::chrono::steady_clock::time_point started_;
  std::string started_utc_;
  double wall_seconds_ = 0.0;
};

}  // namespace memsg::cli
