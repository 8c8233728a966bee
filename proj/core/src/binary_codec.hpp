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

// Little-endian encoding shared by the EMB1 and CKP1 formats.
#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

#include "amm/errors.hpp"

namespace amm::detail {

class ByteWriter {
 public:
  void raw(std::string_view bytes) { out_.append(bytes); }

  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }

  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }

  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  ByteReader(std::string_view bytes, std::string_view what) : bytes_(bytes), what_(what) {}

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

  std::string_view raw(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  void expect_end() const {
    if (pos_ != bytes_.size()) {
      throw FormatError(std::string(what_) + ": " + std::to_string(bytes_.size() - pos_) +
                        " trailing bytes at offset " + std::to_string(pos_));
    }
  }

  /// Overflow-safe need(count * item_bytes).
  void need_items(std::uint64_t count, std::uint64_t item_bytes) const {
    if (item_bytes != 0 && count > remaining() / item_bytes) {
      throw IoError(std::string(what_) + ": truncated at byte offset " + std::to_string(pos_) +
                    " (header declares " + std::to_string(count) + " items of " +
                    std::to_string(item_bytes) + " bytes, " + std::to_string(remaining()) +
                    " available)");
    }
  }

  void need(std::size_t n) const {
    if (n > remaining()) {
      throw IoError(std::string(what_) + ": truncated at byte offset " + std::to_string(pos_) +
                    " (needed " + std::to_string(n) + " more bytes, " +
                    std::to_string(remaining()) + " available)");
    }
  }

 private:
  std::string_view bytes_;
  std::string_view what_;
  std::size_t pos_ = 0;
};

}  // namespace amm::detail
