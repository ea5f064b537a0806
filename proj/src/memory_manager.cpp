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
#include <tpc/memory_manager.hpp>

#include <iterator>
#include <string>

namespace tpc {

MemoryManager::MemoryManager(std::uint64_t capacity)
    : capacity_(capacity), free_bytes_(capacity) {
  if (capacity > 0)
    free_.emplace(0, capacity);
}

Result<std::uint64_t> MemoryManager::allocate(std::uint64_t size) {
  if (size == 0)
    return make_error(Errc::ZeroSize, "allocation of 0 bytes");
  for (auto it = free_.begin(); it != free_.end(); ++it) {
    if (it->second < size)
      continue;
    const std::uint64_t base = it->first;
    const std::uint64_t rest = it->second - size;
    free_.erase(it);
    if (rest > 0)
      free_.emplace(base + size, rest);
    used_.emplace(base, size);
    free_bytes_ -= size;
    return base;
  }
  return make_error(Errc::OutOfDeviceMemory,
                    "no free block of " + std::to_string(size) + " bytes (" +
                        std::to_string(free_bytes_) + " free in total)");
}

Result<void> MemoryManager::release(std::uint64_t address) {
  auto u = used_.find(address);
  if (u == used_.end())
    return make_error(Errc::InvalidAddress,
                      "no allocation starts at " + std::to_string(address));
  std::uint64_t base = u->first;
  std::uint64_t size = u->second;
  used_.erase(u);
  free_bytes_ += size;

  auto next = free_.lower_bound(base);
  if (next != free_.end() && next->first == base + size) {
    size += next->second;
    next = free_.erase(next);
  }
  if (next != free_.begin()) {
    auto prev = std::prev(next);
    if (prev->first + prev->second == base) {
      prev->second += size;
      return {};
    }
  }
  free_.emplace_hint(next, base, size);
  return {};
}

std::optional<Region> MemoryManager::find(std::uint64_t address) const {
  auto it = used_.upper_bound(address);
  if (it == used_.begin())
    return std::nullopt;
  --it;
  Region r{it->first, it->second};
  if (!r.contains(address))
    return std::nullopt;
  return r;
}

std::vector<Region> MemoryManager::free_blocks() const {
  std::vector<Region> out;
  out.reserve(free_.size());
  for (const auto &[b, s] : free_)
    out.push_back({b, s});
  return out;
}

std::vector<Region> MemoryManager::allocated_blocks() const {
  std::vector<Region> out;
  out.reserve(used_.size());
  for (const auto &[b, s] : used_)
    out.push_back({b, s});
  return out;
}

} // namespace tpc
