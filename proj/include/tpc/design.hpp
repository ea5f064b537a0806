/*
 * Copyright 2026 The tpcsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @file design.hpp
 * @brief Plain data shared by the composer and the threadpool: what the user
 *        asks for (Composition), and what gets loaded onto a device
 *        (DesignArtifact), plus the per-PE register window layout.
 */
#ifndef TPC_DESIGN_HPP__
#define TPC_DESIGN_HPP__

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include <tpc/kernels.hpp>

namespace tpc {

/**
 * Register window of one PE, relative to its base offset:
 *
 *   +0x00  CTRL    bit 0: start
 *   +0x08  STATUS  bit 0: done, bit 1: fault
 *   +0x10  RETURN
 *   +0x20  ARG[i]  at +0x20 + 8*i
 *
 * The window size is 0x20 + 8 * max_arity rounded up to a power of two.
 */
namespace regmap {
inline constexpr std::uint64_t kCtrl = 0x00;
inline constexpr std::uint64_t kStatus = 0x08;
inline constexpr std::uint64_t kReturn = 0x10;
inline constexpr std::uint64_t kArgBase = 0x20;
inline constexpr std::uint64_t kArgStride = 0x08;

inline constexpr std::uint64_t kCtrlStart = 1u << 0;
inline constexpr std::uint64_t kStatusDone = 1u << 0;
inline constexpr std::uint64_t kStatusFault = 1u << 1;

constexpr std::uint64_t arg(std::uint32_t i) { return kArgBase + kArgStride * i; }
constexpr std::uint64_t window_size(std::uint32_t max_arity) {
  return std::bit_ceil(kArgBase + kArgStride * max_arity);
}
} // namespace regmap

struct CompositionEntry {
  KernelId kernel_id = 0;
  std::string kernel_name;
  std::uint32_t pe_count = 1;

  bool operator==(const CompositionEntry &) const = default;
};

struct Composition {
  std::vector<CompositionEntry> entries;
  std::string architecture = "flat";

  std::uint64_t total_pes() const {
    std::uint64_t n = 0;
    for (const auto &e : entries)
      n += e.pe_count;
    return n;
  }
  bool operator==(const Composition &) const = default;
};

struct PeSlot {
  std::uint32_t pe_index = 0;
  KernelId kernel_id = 0;
  std::uint64_t base_offset = 0;
  std::uint32_t arity = 0;
  std::uint32_t return_width = 8;

  bool operator==(const PeSlot &) const = default;
};

inline constexpr int kDesignFormatVersion = 1;

/// The simulator's stand-in for a bitstream.
struct DesignArtifact {
  std::string platform_name;
  std::string architecture;
  std::vector<PeSlot> pe_table;
  std::uint64_t window_size = 0;
  int format_version = kDesignFormatVersion;

  bool operator==(const DesignArtifact &) const = default;
};

} // namespace tpc

#endif /* TPC_DESIGN_HPP__ */
