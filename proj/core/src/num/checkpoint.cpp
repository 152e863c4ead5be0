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

#include "memsg/num/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "memsg/error.hpp"

namespace memsg::num {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'M', 'E', 'M', 'S', 'G', 'C', 'K', 'P'};

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T take(std::istream& in, const std::filesystem::path& path) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw IoError("truncated checkpoint " + path.string());
  }
  return value;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ParamStore& store,
                     const std::string& metadata) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint " + tmp.string());
    out.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, kCheckpointVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(metadata.size()));
    out.write(metadata.data(), static_cast<std::streamsize>(metadata.size()));
    put<std::uint64_t>(out, store.parameters().size());
    for (const auto& p : store.parameters()) {
      put<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
      out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
      put<std::uint32_t>(out, static_cast<std::uint32_t>(p.value.rank()));
      for (std::size_t extent : p.value.shape()) put<std::uint64_t>(out, extent);
      out.write(reinterpret_cast<const char*>(p.value.data().data()),
                static_cast<std::streamsize>(p.value.size() * sizeof(double)));
    }
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError(path.string() + " is not a memsg checkpoint");
  }
  const auto version = take<std::uint32_t>(in, path);
  if (version != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.metadata.resize(take<std::uint32_t>(in, path));
  if (!in.read(ckpt.metadata.data(), static_cast<std::streamsize>(ckpt.metadata.size()))) {
    throw IoError("truncated checkpoint " + path.string());
  }
  const auto count = take<std::uint64_t>(in, path);
  for (std::uint64_t k = 0; k < count; ++k) {
    std::string name(take<std::uint32_t>(in, path), '\0');
    if (!in.read(name.data(), static_cast<std::streamsize>(name.size()))) {
      throw IoError("truncated checkpoint " + path.string());
    }
    const auto rank = take<std::uint32_t>(in, path);
    Shape shape(rank);
    for (auto& extent : shape) extent = take<std::uint64_t>(in, path);
    std::vector<double> data(numel(shape));
    if (!in.read(reinterpret_cast<char*>(data.data()),
                 static_cast<std::streamsize>(data.size() * sizeof(double)))) {
      throw IoError("truncated checkpoint " + path.string());
    }
    ckpt.tensors.emplace_back(std::move(name), Tensor::from_data(std::move(shape), std::move(data)));
  }
  return ckpt;
}

void load_checkpoint(const Checkpoint& checkpoint, ParamStore& store) {
  std::map<std::string, const Tensor*> by_name;
  for (const auto& [name, t] : checkpoint.tensors) by_name[name] = &t;
  for (auto& p : store.parameters()) {
    auto it = by_name.find(p.name);
    if (it == by_name.end()) throw DataError("checkpoint lacks parameter '" + p.name + "'");
    if (it->second->shape() != p.value.shape()) {
      throw DataError("checkpoint shape mismatch for '" + p.name + "': " +
                      to_string(it->second->shape()) + " vs " + to_string(p.value.shape()));
    }
    std::copy(it->second->data().begin(), it->second->data().end(),
              p.value.mutable_data().begin());
  }
}

}  // namespace memsg::num
