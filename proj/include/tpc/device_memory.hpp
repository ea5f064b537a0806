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
#ifndef TPC_DEVICE_MEMORY_HPP__
#define TPC_DEVICE_MEMORY_HPP__

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <type_traits>
#include <unordered_map>

namespace tpc {

/// A contiguous byte range of device memory.
struct Region {
  std::uint64_t base = 0;
  std::uint64_t size = 0;

  std::uint64_t end() const { return base + size; }
  bool contains(std::uint64_t addr) const { return addr >= base && addr < end(); }
  bool overlaps(const Region &o) const { return base < o.end() && o.base < end(); }
  bool operator==(const Region &) const = default;
};

/**
 * Sparse, zero-initialized backing store for simulated device DRAM. Pages are
 * materialized on first write, so multi-GiB device models cost nothing until
 * they are touched. Callers bounds-check; accesses to distinct bytes may run
 * concurrently.
 */
class DeviceMemory {
public:
  static constexpr std::uint64_t kPageSize = 64 * 1024;

  explicit DeviceMemory(std::uint64_t size) : size_(size) {}

  std::uint64_t size() const { return size_; }

  void read(std::uint64_t addr, std::span<std::byte> out) const;
  void write(std::uint64_t addr, std::span<const std::byte> in);

  /// Number of pages backed by host memory.
  std::size_t resident_pages() const;

private:
  std::byte *page(std::uint64_t index, bool create) const;

  std::uint64_t size_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::uint64_t, std::unique_ptr<std::byte[]>> pages_;
};

/**
 * Bounds-checked window onto device memory handed to kernel functions. Raw
 * device addresses never reach kernels; every access is relative to the view.
 */
class DeviceView {
public:
  DeviceView() = default;
  DeviceView(DeviceMemory *mem, Region region) : mem_(mem), region_(region) {}

  std::uint64_t size() const { return region_.size; }

  bool read(std::uint64_t offset, std::span<std::byte> out) const {
    if (!in_bounds(offset, out.size()))
      return false;
    mem_->read(region_.base + offset, out);
    return true;
  }

  bool write(std::uint64_t offset, std::span<const std::byte> in) {
    if (!in_bounds(offset, in.size()))
      return false;
    mem_->write(region_.base + offset, in);
    return true;
  }

  template <typename T> std::optional<T> load(std::uint64_t offset) const {
    static_assert(std::is_trivially_copyable_v<T>);
    T v;
    if (!read(offset, std::as_writable_bytes(std::span<T, 1>(&v, 1))))
      return std::nullopt;
    return v;
  }

private:
  bool in_bounds(std::uint64_t offset, std::uint64_t len) const {
    return mem_ != nullptr && offset <= region_.size && len <= region_.size - offset;
  }

  DeviceMemory *mem_ = nullptr;
  Region region_;
};

} // namespace tpc

#endif /* TPC_DEVICE_MEMORY_HPP__ */
