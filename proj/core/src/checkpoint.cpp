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

#include "amm/checkpoint.hpp"

#include "amm/errors.hpp"
#include "amm/io.hpp"
#include "binary_codec.hpp"

namespace amm {
namespace {

constexpr std::string_view kMagic = "CKP1";

void write_head(detail::ByteWriter& w, const GluMlpHead& head) {
  head.validate();
  for (const Matrix* m : head.parameters()) {
    w.u64(m->rows());
    w.u64(m->cols());
    for (double v : m->values()) w.f64(v);
  }
}

GluMlpHead read_head(detail::ByteReader& r) {
  GluMlpHead head;
  for (Matrix* m : head.parameters()) {
    const auto rows = r.u64();
    const auto cols = r.u64();
    if (cols != 0) r.need_items(rows, cols * 8);
    std::vector<double> data(static_cast<std::size_t>(rows * cols));
    for (double& v : data) v = r.f64();
    if (!all_finite(data)) throw ValidationError("CKP1: non-finite parameter value");
    *m = Matrix(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), std::move(data));
  }
  try {
    head.validate();
  } catch (const ShapeError& e) {
    throw FormatError(std::string("CKP1: ") + e.what());
  }
  return head;
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& ckpt) {
  detail::ByteWriter w;
  w.raw(kMagic);
  w.u32(kCheckpointFormatVersion);
  write_head(w, ckpt.x_head);
  write_head(w, ckpt.y_head);
  const std::string trailer = ckpt.config.dump();
  w.u64(trailer.size());
  w.raw(trailer);
  return w.take();
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    throw FormatError("CKP1: bad magic bytes");
  }
  detail::ByteReader r(bytes, "CKP1");
  r.raw(kMagic.size());
  const auto version = r.u32();
  if (version != kCheckpointFormatVersion) {
    throw FormatError("CKP1: unsupported version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.x_head = read_head(r);
  ckpt.y_head = read_head(r);
  const auto len = r.u64();
  r.need_items(len, 1);
  const auto trailer = r.raw(static_cast<std::size_t>(len));
  r.expect_end();
  try {
    ckpt.config = nlohmann::json::parse(trailer);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("CKP1: config trailer: ") + e.what());
  }
  return ckpt;
}

void checkpoint_save(const Checkpoint& ckpt, const std::filesystem::path& path) {
  write_file_atomic(path, encode_checkpoint(ckpt));
}

Checkpoint checkpoint_load(const std::filesystem::path& path) {
  return decode_checkpoint(read_file(path));
}

}  // namespace amm
