// Copyright 2026 The amm-align Authors
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

#include "amm/embedding_store.hpp"

#include <limits>
#include <unordered_set>

#include "amm/errors.hpp"
#include "amm/io.hpp"
#include "binary_codec.hpp"

namespace amm {
namespace {

constexpr std::string_view kMagic = "EMB1";

}  // namespace

void EmbeddingStore::validate() const {
  if (ids.size() != matrix.rows()) {
    throw ValidationError("embedding store has " + std::to_string(ids.size()) + " ids for " +
                          std::to_string(matrix.rows()) + " rows");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) throw ValidationError("embedding store: duplicate id '" + id + "'");
  }
  if (!all_finite(matrix.values())) throw ValidationError("embedding store: non-finite value");
}

std::unordered_map<std::string, std::size_t> EmbeddingStore::index() const {
  std::unordered_map<std::string, std::size_t> out;
  out.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) out.emplace(ids[i], i);
  return out;
}

std::string encode_store(const EmbeddingStore& store) {
  store.validate();
  detail::ByteWriter w;
  w.raw(kMagic);
  w.u32(kEmbeddingFormatVersion);
  w.u64(store.matrix.rows());
  w.u64(store.matrix.cols());
  for (const auto& id : store.ids) {
    if (id.size() > std::numeric_limits<std::uint32_t>::max())
      throw ValidationError("embedding store: id too long");
    w.u32(static_cast<std::uint32_t>(id.size()));
    w.raw(id);
  }
  for (double v : store.matrix.values()) w.f64(v);
  return w.take();
}

EmbeddingStore decode_store(std::string_view bytes) {
  detail::ByteReader r(bytes, "EMB1");
  if (r.remaining() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    throw FormatError("EMB1: bad magic bytes");
  }
  r.raw(kMagic.size());
  const auto version = r.u32();
  if (version != kEmbeddingFormatVersion) {
    throw FormatError("EMB1: unsupported version " + std::to_string(version));
  }
  const auto n = r.u64();
  const auto d = r.u64();
  // Each id costs at least its 4-byte length prefix.
  r.need_items(n, 4);
  EmbeddingStore store;
  store.ids.reserve(static_cast<std::size_t>(n));
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto len = r.u32();
    store.ids.emplace_back(r.raw(len));
  }
  if (d != 0) r.need_items(n, d * 8);
  std::vector<double> payload(static_cast<std::size_t>(n * d));
  for (double& v : payload) v = r.f64();
  r.expect_end();
  store.matrix = Matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(d), std::move(payload));
  store.validate();
  return store;
}

void store_save(const EmbeddingStore& store, const std::filesystem::path& path) {
  write_file_atomic(path, encode_store(store));
}

EmbeddingStore store_load(const std::filesystem::path& path) {
  return decode_store(read_file(path));
}

std::string_view to_string(Split split) noexcept {
  switch (split) {
    case Split::train: return "train";
    case Split::eval: return "eval";
    case Split::test: return "test";
  }
  return "unknown";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "eval") return Split::eval;
  if (name == "test") return Split::test;
  throw ArgumentError("unknown split '" + std::string(name) + "' (expected train|eval|test)");
}

void PairManifest::validate() const {
  std::unordered_set<std::string_view> seen;
  for (const auto& p : pairs) {
    if (!seen.insert(p.pair_id).second)
      throw ValidationError("manifest: duplicate pair_id '" + p.pair_id + "'");
  }
}

void PairManifest::check_references(const EmbeddingStore& x, const EmbeddingStore& y) const {
  const auto xi = x.index();
  const auto yi = y.index();
  for (const auto& p : pairs) {
    if (!xi.contains(p.x_id))
      throw ValidationError("manifest: pair '" + p.pair_id + "' references unknown x_id '" + p.x_id + "'");
    if (!yi.contains(p.y_id))
      throw ValidationError("manifest: pair '" + p.pair_id + "' references unknown y_id '" + p.y_id + "'");
  }
}

std::vector<PairRecord> PairManifest::select(Split split) const {
  std::vector<PairRecord> out;
  for (const auto& p : pairs)
    if (p.split == split) out.push_back(p);
  return out;
}

nlohmann::json manifest_to_json(const PairManifest& manifest) {
  auto arr = nlohmann::json::array();
  for (const auto& p : manifest.pairs) {
    arr.push_back({{"pair_id", p.pair_id},
                   {"x_id", p.x_id},
                   {"y_id", p.y_id},
                   {"split", std::string(to_string(p.split))}});
  }
  return arr;
}

PairManifest manifest_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw FormatError("manifest: expected a JSON array");
  PairManifest m;
  m.pairs.reserve(j.size());
  for (const auto& item : j) {
    try {
      m.pairs.push_back({item.at("pair_id").get<std::string>(), item.at("x_id").get<std::string>(),
                         item.at("y_id").get<std::string>(),
                         parse_split(item.at("split").get<std::string>())});
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("manifest: malformed record: ") + e.what());
    } catch (const ArgumentError& e) {
      throw FormatError(std::string("manifest: ") + e.what());
    }
  }
  m.validate();
  return m;
}

void manifest_save(const PairManifest& manifest, const std::filesystem::path& path) {
  write_file_atomic(path, manifest_to_json(manifest).dump(1) + "\n");
}

PairManifest manifest_load(const std::filesystem::path& path) {
  const auto text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("manifest '" + path.string() + "': " + e.what());
  }
  return manifest_from_json(j);
}

}  // namespace amm
