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
#include <doctest.h>

#include <array>
#include <random>
#include <set>

#include <tpc/device_memory.hpp>
#include <tpc/memory_manager.hpp>
#include <tpc/result.hpp>
#include <tpc/sim_time.hpp>

#include "support.hpp"

using namespace tpc;

TEST_SUITE("core") {
  TEST_CASE("result carries either a value or an error") {
    Result<int> ok = 5;
    CHECK(ok.ok());
    CHECK(*ok == 5);
    Result<int> bad = make_error(Errc::ZeroSize, "nope");
    CHECK_FALSE(bad);
    CHECK(bad.code() == Errc::ZeroSize);
    CHECK_THROWS_AS(bad.value(), BadResultAccess);
    Result<void> v;
    CHECK(v.ok());
    Result<void> e = make_error(Errc::IoError, "disk");
    CHECK(e.code() == Errc::IoError);
    CHECK(e.error().describe().find("disk") != std::string::npos);
  }

  TEST_CASE("every error code has a distinct name") {
    std::set<std::string_view> names;
    for (int i = 0; i <= static_cast<int>(Errc::InvalidArgument); ++i)
      names.insert(to_string(static_cast<Errc>(i)));
    CHECK(names.size() == static_cast<std::size_t>(Errc::InvalidArgument) + 1);
  }

  TEST_CASE("modeled time is exact integer picoseconds") {
    CHECK(SimTime::from_us(1.5).ps() == 1'500'000);
    CHECK(SimTime::from_cycles(100, 100.0) == SimTime::from_us(1.0));
    CHECK(SimTime::from_cycles(1, 250.0).ps() == 4000);
    SimTime d = SimTime::from_cycles(3, 250.0);
    SimTime sum;
    for (int i = 0; i < 1000; ++i)
      sum += d;
    CHECK(sum == d * 1000);
  }

  TEST_CASE("virtual clock never moves backwards") {
    VirtualClock c;
    c.advance_to(SimTime::from_us(5));
    c.advance_to(SimTime::from_us(2));
    CHECK(c.now() == SimTime::from_us(5));
    c.reset();
    CHECK(c.now() == SimTime{});
  }
}

TEST_SUITE("memory") {
  TEST_CASE("device memory reads zero until written") {
    DeviceMemory mem(1ull << 32);
    std::vector<std::byte> out(16, std::byte{0xaa});
    mem.read((1ull << 32) - 16, out);
    for (auto b : out)
      CHECK(b == std::byte{0});
    CHECK(mem.resident_pages() == 0);
  }

  TEST_CASE("writes spanning pages read back intact") {
    DeviceMemory mem(1 << 20);
    std::mt19937_64 rng(3);
    auto data = test::random_bytes(rng, 3 * DeviceMemory::kPageSize + 17);
    mem.write(DeviceMemory::kPageSize - 5, data);
    std::vector<std::byte> back(data.size());
    mem.read(DeviceMemory::kPageSize - 5, back);
    CHECK(back == data);
    CHECK(mem.resident_pages() == 5);
  }

  TEST_CASE("device views are bounds checked") {
    DeviceMemory mem(4096);
    DeviceView v(&mem, Region{100, 8});
    std::array<std::byte, 8> buf{};
    CHECK(v.write(0, buf));
    CHECK_FALSE(v.write(1, buf));
    CHECK_FALSE(v.read(9, std::span<std::byte>(buf.data(), 0)));
    CHECK(v.load<std::uint64_t>(0).has_value());
    CHECK_FALSE(v.load<std::uint64_t>(4).has_value());
    DeviceView empty;
    CHECK_FALSE(empty.read(0, std::span<std::byte>(buf.data(), 1)));
  }

  TEST_CASE("first fit from an empty arena starts at 0") {
    MemoryManager m(4096);
    CHECK(m.allocate(1024).value() == 0);
  }

  TEST_CASE("first fit reuses the lowest hole") {
    MemoryManager m(4096);
    test::BitmapAllocator ref(4096);
    const auto a = m.allocate(1024).value();
    CHECK(m.allocate(1024).value() == *ref.allocate(1024) + 1024);
    ref.allocate(1024);
    REQUIRE(m.release(a));
    ref.release(0);
    CHECK(m.allocate(512).value() == *ref.allocate(512));
  }

  TEST_CASE("allocation errors") {
    MemoryManager m(4096);
    CHECK(m.allocate(0).code() == Errc::ZeroSize);
    CHECK(m.allocate(4097).code() == Errc::OutOfDeviceMemory);
    CHECK(m.release(12).code() == Errc::InvalidAddress);
    const auto a = m.allocate(10).value();
    CHECK(m.release(a + 1).code() == Errc::InvalidAddress);
    CHECK(m.release(a));
    CHECK(m.release(a).code() == Errc::InvalidAddress);
  }

  TEST_CASE("exhausting the arena then freeing restores one block") {
    MemoryManager m(4096);
    test::BitmapAllocator ref(4096);
    std::vector<std::uint64_t> addrs;
    while (true) {
      auto a = m.allocate(100);
      auto r = ref.allocate(100);
      REQUIRE(a.ok() == r.has_value());
      if (!a)
        break;
      CHECK(*a == *r);
      addrs.push_back(*a);
    }
    CHECK(addrs.size() == 40);
    CHECK(m.allocate(1).ok()); // 96 bytes remain
    for (auto a : addrs)
      REQUIRE(m.release(a));
    CHECK(m.free_blocks().size() == 2);
  }

  TEST_CASE("free list stays coalesced") {
    MemoryManager m(4096);
    auto a = m.allocate(1000).value();
    auto b = m.allocate(1000).value();
    auto c = m.allocate(1000).value();
    REQUIRE(m.release(a));
    REQUIRE(m.release(c));
    CHECK(m.free_blocks().size() == 2);
    REQUIRE(m.release(b));
    REQUIRE(m.free_blocks().size() == 1);
    CHECK(m.free_blocks()[0] == Region{0, 4096});
    CHECK(m.free_bytes() == 4096);
  }

  TEST_CASE("find locates the containing allocation") {
    MemoryManager m(4096);
    auto a = m.allocate(64).value();
    CHECK(m.find(a + 63) == Region{a, 64});
    CHECK_FALSE(m.find(a + 64).has_value());
  }

  TEST_CASE("property: random sequences match the bitmap oracle") {
    std::mt19937_64 rng(0x5eed);
    for (int seq = 0; seq < 300; ++seq) {
      MemoryManager m(4096);
      test::BitmapAllocator ref(4096);
      std::vector<std::uint64_t> live;
      for (int step = 0; step < 60; ++step) {
        if (!live.empty() && rng() % 3 == 0) {
          const std::size_t k = rng() % live.size();
          REQUIRE(m.release(live[k]).ok() == ref.release(live[k]));
          live.erase(live.begin() + static_cast<std::ptrdiff_t>(k));
        } else {
          const std::uint64_t size = 1 + rng() % 700;
          auto a = m.allocate(size);
          auto r = ref.allocate(size);
          REQUIRE(a.ok() == r.has_value());
          if (a) {
            REQUIRE(*a == *r);
            live.push_back(*a);
          }
        }
        REQUIRE(m.free_bytes() == ref.free_bytes());
        auto blocks = m.allocated_blocks();
        for (std::size_t i = 1; i < blocks.size(); ++i)
          REQUIRE_FALSE(blocks[i - 1].overlaps(blocks[i]));
      }
    }
  }
}
