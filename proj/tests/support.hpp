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
// Independent oracles and fixtures shared by the unit and acceptance tests.
// Nothing here calls into the code under test to compute an expected value.
#ifndef TPC_TESTS_SUPPORT_HPP__
#define TPC_TESTS_SUPPORT_HPP__

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <tpc/kernels.hpp>
#include <tpc/platform.hpp>
#include <tpc/tpc_api.hpp>

namespace tpc::test {

// ---------------------------------------------------------------------------
// oracles

/// Byte-granular first-fit allocator over a bitmap.
class BitmapAllocator {
public:
  explicit BitmapAllocator(std::size_t capacity) : used_(capacity, false) {}

  std::optional<std::uint64_t> allocate(std::uint64_t size) {
    if (size == 0 || size > used_.size())
      return std::nullopt;
    std::size_t run = 0;
    for (std::size_t i = 0; i < used_.size(); ++i) {
      run = used_[i] ? 0 : run + 1;
      if (run == size) {
        const std::size_t base = i + 1 - size;
        for (std::size_t k = base; k <= i; ++k)
          used_[k] = true;
        sizes_[base] = size;
        return base;
      }
    }
    return std::nullopt;
  }

  bool release(std::uint64_t base) {
    auto it = sizes_.find(base);
    if (it == sizes_.end())
      return false;
    for (std::uint64_t k = base; k < base + it->second; ++k)
      used_[k] = false;
    sizes_.erase(it);
    return true;
  }

  std::uint64_t free_bytes() const {
    std::uint64_t n = 0;
    for (bool b : used_)
      n += b ? 0 : 1;
    return n;
  }
  const std::map<std::uint64_t, std::uint64_t> &live() const { return sizes_; }

private:
  std::vector<bool> used_;
  std::map<std::uint64_t, std::uint64_t> sizes_;
};

inline std::uint32_t fnv1a32_oracle(std::span<const std::byte> data) {
  std::uint32_t h = 2166136261u;
  for (std::byte b : data) {
    h = h ^ static_cast<std::uint32_t>(b);
    h = static_cast<std::uint32_t>(static_cast<std::uint64_t>(h) * 16777619u);
  }
  return h;
}

/// Affine transfer duration in microseconds.
inline double affine_us(double setup_us, double bw_mib_s, double penalty_us_per_mib,
                        std::uint64_t bytes) {
  const double mib = static_cast<double>(bytes) / (1024.0 * 1024.0);
  return setup_us + mib * 1e6 / bw_mib_s + mib * penalty_us_per_mib;
}

inline std::uint64_t window_oracle(std::uint32_t arity) {
  std::uint64_t need = 0x20 + 8ull * arity, w = 1;
  while (w < need)
    w *= 2;
  return w;
}

inline std::int64_t sum_i32(std::span<const std::int32_t> v) {
  std::int64_t s = 0;
  for (auto x : v)
    s += x;
  return s;
}

inline std::vector<std::byte> random_bytes(std::mt19937_64 &rng, std::size_t n) {
  std::vector<std::byte> out(n);
  for (auto &b : out)
    b = static_cast<std::byte>(rng() & 0xff);
  return out;
}

template <typename T> std::vector<std::byte> bytes_of(std::span<const T> v) {
  std::vector<std::byte> out(v.size_bytes());
  std::memcpy(out.data(), v.data(), out.size());
  return out;
}

// ---------------------------------------------------------------------------
// fixtures

inline const char *registry_path() { return TPC_TEST_REGISTRY; }

inline const PlatformRegistry &shipped_registry() {
  static const PlatformRegistry reg = PlatformRegistry::load(registry_path()).value();
  return reg;
}

inline std::uint32_t device_index(const std::string &name) {
  const auto &models = shipped_registry().models();
  for (std::uint32_t i = 0; i < models.size(); ++i)
    if (models[i].name == name)
      return i;
  return static_cast<std::uint32_t>(models.size());
}

inline PlatformModel small_model(std::uint64_t memory = 4096) {
  PlatformModel m;
  m.name = "tiny";
  m.device_memory_size = memory;
  m.fabric_clock_mhz = 100.0;
  m.slot_budget = 16;
  m.transfer = {10.0, 1000.0, 0.0, {}};
  m.interrupt = {2.0, 4.0, 6.0, 1.0, 10.0};
  return m;
}

inline PlatformRegistry registry_of(std::vector<PlatformModel> models) {
  PlatformRegistry reg;
  for (auto &m : models)
    (void)reg.add(std::move(m));
  return reg;
}

/// Holds kernels registered as "gate" until opened.
struct Gate {
  std::mutex mu;
  std::condition_variable cv;
  bool open = false;
  int entered = 0;

  void release() {
    {
      std::lock_guard lock(mu);
      open = true;
    }
    cv.notify_all();
  }
  void wait_entered(int n) {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return entered >= n; });
  }
};

inline constexpr KernelId kGateKernel = 50;
inline constexpr KernelId kMeanKernel = 51;
inline constexpr KernelId kPairKernel = 60;

/// Builtins plus:
///   gate(x)       blocks until the gate opens, returns x
///   mean(buf, n)  int32 mean of n values, faults on n == 0
///   pair(a, b)    a * 3 + b, 2 scalar args, 4-byte return
inline std::shared_ptr<KernelRegistry> test_kernels(std::shared_ptr<Gate> gate = nullptr) {
  auto reg = std::make_shared<KernelRegistry>(builtin_kernels());
  if (!gate)
    gate = std::make_shared<Gate>();
  (void)reg->register_kernel({kGateKernel, "gate", {{ArgKind::Scalar, 8}}, 8, 100,
                              [gate](const KernelArgs &a) -> Result<std::uint64_t> {
                                std::unique_lock lock(gate->mu);
                                ++gate->entered;
                                gate->cv.notify_all();
                                gate->cv.wait(lock, [&] { return gate->open; });
                                return a.scalar(0);
                              }});
  (void)reg->register_kernel(
      {kMeanKernel, "mean", {{ArgKind::Handle, 8}, {ArgKind::Scalar, 4}}, 4, 300,
       [](const KernelArgs &a) -> Result<std::uint64_t> {
         const std::uint64_t n = a.scalar(1);
         if (n == 0)
           return make_error(Errc::KernelFault, "mean of zero values");
         std::int64_t s = 0;
         for (std::uint64_t i = 0; i < n; ++i) {
           auto v = a.view(0).load<std::int32_t>(4 * i);
           if (!v)
             return make_error(Errc::KernelFault, "read past buffer");
           s += *v;
         }
         return static_cast<std::uint32_t>(static_cast<std::int32_t>(s / static_cast<std::int64_t>(n)));
       }});
  (void)reg->register_kernel({kPairKernel, "pair", {{ArgKind::Scalar, 8}, {ArgKind::Scalar, 8}},
                              4, 64, [](const KernelArgs &a) -> Result<std::uint64_t> {
                                return (a.scalar(0) * 3 + a.scalar(1)) & 0xffffffffu;
                              }});
  return reg;
}

inline std::unique_ptr<Device> open_device(const std::string &platform,
                                           std::shared_ptr<const KernelRegistry> kernels = nullptr,
                                           std::uint64_t seed = 1) {
  return Device::open(shipped_registry(), device_index(platform), std::move(kernels), seed)
      .value();
}

inline Composition composition_of(std::vector<std::pair<KernelId, std::uint32_t>> rows) {
  Composition c;
  for (auto [id, n] : rows)
    c.entries.push_back({id, "k" + std::to_string(id), n});
  return c;
}

inline const std::vector<std::string> &all_platforms() {
  static const std::vector<std::string> names{"zedboard", "zc706", "vc709"};
  return names;
}

} // namespace tpc::test

#endif /* TPC_TESTS_SUPPORT_HPP__ */
