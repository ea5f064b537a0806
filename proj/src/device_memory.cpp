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
#include <tpc/device_memory.hpp>

#include <algorithm>

namespace tpc {

std::byte *DeviceMemory::page(std::uint64_t index, bool create) const {
  std::lock_guard lock(mu_);
  auto it = pages_.find(index);
  if (it != pages_.end())
    return it->second.get();
  if (!create)
    return nullptr;
  auto storage = std::make_unique<std::byte[]>(kPageSize); // value-initialized
  std::byte *p = storage.get();
  pages_.emplace(index, std::move(storage));
  return p;
}

void DeviceMemory::read(std::uint64_t addr, std::span<std::byte> out) const {
  std::size_t done = 0;
  while (done < out.size()) {
    const std::uint64_t a = addr + done;
    const std::uint64_t off = a % kPageSize;
    const std::size_t n = static_cast<std::size_t>(
        std::min<std::uint64_t>(kPageSize - off, out.size() - done));
    if (const std::byte *p = page(a / kPageSize, false))
      std::memcpy(out.data() + done, p + off, n);
    else
      std::fill_n(out.data() + done, n, std::byte{0});
    done += n;
  }
}

void DeviceMemory::write(std::uint64_t addr, std::span<const std::byte> in) {
  std::size_t done = 0;
  while (done < in.size()) {
    const std::uint64_t a = addr + done;
    const std::uint64_t off = a % kPageSize;
    const std::size_t n = static_cast<std::size_t>(
        std::min<std::uint64_t>(kPageSize - off, in.size() - done));
    std::memcpy(page(a / kPageSize, true) + off, in.data() + done, n);
    done += n;
  }
}

std::size_t DeviceMemory::resident_pages() const {
  std::lock_guard lock(mu_);
  return pages_.size();
}

} // namespace tpc
