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
#ifndef TPC_MEMORY_MANAGER_HPP__
#define TPC_MEMORY_MANAGER_HPP__

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <tpc/device_memory.hpp>
#include <tpc/result.hpp>

namespace tpc {

/**
 * First-fit device memory manager over an address-sorted free list.
 *
 * The free list is kept fully coalesced: no two free blocks are adjacent.
 * Allocation takes the lowest-addressed free block that fits and splits off
 * the tail; release merges with both neighbours. Not internally
 * synchronized.
 */
class MemoryManager {
public:
  explicit MemoryManager(std::uint64_t capacity);

  Result<std::uint64_t> allocate(std::uint64_t size);
  Result<void> release(std::uint64_t address);

  /// The live allocation containing `address`, if any.
  std::optional<Region> find(std::uint64_t address) const;

  std::uint64_t capacity() const { return capacity_; }
  std::uint64_t free_bytes() const { return free_bytes_; }
  std::vector<Region> free_blocks() const;
  std::vector<Region> allocated_blocks() const;

private:
  std::uint64_t capacity_;
  std::uint64_t free_bytes_;
  std::map<std::uint64_t, std::uint64_t> free_; // base -> size
  std::map<std::uint64_t, std::uint64_t> used_; // base -> size
};

} // namespace tpc

#endif /* TPC_MEMORY_MANAGER_HPP__ */
