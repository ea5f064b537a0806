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
 * @file kernels.hpp
 * @brief Software kernels standing in for synthesized IP cores, and the
 *        registry the composer and the processing elements look them up in.
 */
#ifndef TPC_KERNELS_HPP__
#define TPC_KERNELS_HPP__

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <tpc/device_memory.hpp>
#include <tpc/result.hpp>

namespace tpc {

using KernelId = std::uint32_t;

enum class ArgKind { Scalar, Handle };

/// Declared shape of one argument slot. Handles are always 8 bytes wide;
/// scalars may be narrower and are zero-extended into the 64-bit register.
struct ArgSpec {
  ArgKind kind = ArgKind::Scalar;
  std::uint32_t width = 8;

  bool operator==(const ArgSpec &) const = default;
};

/**
 * What a running kernel sees: the raw 64-bit argument registers plus a
 * bounds-checked view for every handle-typed slot.
 */
class KernelArgs {
public:
  KernelArgs(std::span<const std::uint64_t> regs, std::span<DeviceView> views)
      : regs_(regs), views_(views) {}

  std::size_t size() const { return regs_.size(); }
  std::uint64_t scalar(std::size_t i) const { return regs_[i]; }
  /// View for a handle slot; empty for scalar slots.
  DeviceView &view(std::size_t i) const { return views_[i]; }

private:
  std::span<const std::uint64_t> regs_;
  std::span<DeviceView> views_;
};

/// A kernel returns the value for its RETURN register, or KernelFault.
using KernelFunction = std::function<Result<std::uint64_t>(const KernelArgs &)>;

struct KernelSpec {
  KernelId id = 0;
  std::string name;
  std::vector<ArgSpec> args;
  std::uint32_t return_width = 8;
  std::uint64_t cycles_estimate = 1;
  KernelFunction function;

  std::uint32_t arity() const { return static_cast<std::uint32_t>(args.size()); }
};

class KernelRegistry {
public:
  Result<void> register_kernel(KernelSpec spec);
  Result<KernelSpec> lookup(KernelId id) const;
  /// Non-owning lookup; nullptr when absent.
  const KernelSpec *find(KernelId id) const;
  bool contains(KernelId id) const { return find(id) != nullptr; }
  std::size_t size() const { return kernels_.size(); }
  std::vector<KernelId> ids() const;

private:
  std::map<KernelId, KernelSpec> kernels_;
};

/// Fixed ids of the built-in kernel suite. Only `magic` is pinned by the
/// original API example; the rest are this runtime's choice.
namespace kernel_ids {
inline constexpr KernelId identity = 1;
inline constexpr KernelId memcpy_dev = 2;
inline constexpr KernelId arraysum = 3;
inline constexpr KernelId latency_probe = 4;
inline constexpr KernelId magic = 10;
} // namespace kernel_ids

/**
 * identity(x) -> x;
 * memcpy_dev(src, dst, len) -> len;
 * arraysum(buf, count) -> sum of `count` int32 as int64;
 * latency_probe() -> 0 in one cycle;
 * magic(buf) -> 32-bit FNV-1a over the whole buffer (an arbitrary stand-in).
 */
KernelRegistry builtin_kernels();

/// FNV-1a, 32 bit. Exposed so callers can predict `magic`.
std::uint32_t fnv1a32(std::span<const std::byte> bytes);

} // namespace tpc

#endif /* TPC_KERNELS_HPP__ */
