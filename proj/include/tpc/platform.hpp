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
 * @file platform.hpp
 * @brief Device-specific layer beneath the TPC API: device memory
 *        management, register access, DMA and interrupt feedback.
 *
 * Every Platform is the same class parameterized by a PlatformModel loaded
 * from the registry file, so switching boards is a runtime string lookup
 * with no change to application code.
 */
#ifndef TPC_PLATFORM_HPP__
#define TPC_PLATFORM_HPP__

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include <tpc/device_memory.hpp>
#include <tpc/memory_manager.hpp>
#include <tpc/result.hpp>
#include <tpc/sim_time.hpp>

namespace tpc {

inline constexpr double kMiB = 1024.0 * 1024.0;

/**
 * Host <-> device transfer cost. The affine part is
 *   duration = setup + size * (1 / bandwidth + dma_alloc_penalty)
 * where the penalty (us per MiB) models per-transfer kernel DMA buffer
 * allocation on Zynq-class boards. A non-empty per_chunk table (bytes ->
 * MiB/s) overrides the affine model between its first and last entry, with
 * linear interpolation; above the last entry its rate is held.
 */
struct TransferModel {
  double setup_overhead_us = 0.0;
  double bandwidth_mib_s = 1.0;
  double dma_alloc_penalty_us_per_mib = 0.0;
  std::map<std::uint64_t, double> per_chunk;

  SimTime duration(std::uint64_t bytes) const;
  /// Effective rate for one transfer of `bytes`, in MiB/s.
  double rate_mib_s(std::uint64_t bytes) const;
};

enum class WaitPath {
  Spin,  ///< short kernels: the waiting thread never sleeps
  Sleep, ///< long kernels: adds the wake-up penalty
};

/**
 * Interrupt round-trip model. Spin-path samples follow a triangular
 * distribution on [min, max] whose mean is latency_avg_us; the sleep path
 * adds wakeup_penalty_us on top.
 */
struct InterruptModel {
  double latency_min_us = 0.0;
  double latency_avg_us = 0.0;
  double latency_max_us = 0.0;
  double wakeup_penalty_us = 0.0;
  /// Kernels with a modeled runtime at or below this take the spin path.
  double spin_threshold_us = 10.0;

  /// Mode of the triangular distribution that yields the configured mean.
  double mode_us() const { return 3.0 * latency_avg_us - latency_min_us - latency_max_us; }
};

struct PlatformModel {
  std::string name;
  std::uint64_t device_memory_size = 0;
  double fabric_clock_mhz = 0.0;
  std::uint32_t slot_budget = 1;
  std::uint64_t register_space_bytes = 64 * 1024;
  TransferModel transfer;
  InterruptModel interrupt;
  /// Dotted field names whose values are calibration estimates.
  std::vector<std::string> estimates;

  Result<void> validate() const;
};

class PlatformRegistry {
public:
  static Result<PlatformRegistry> parse(std::string_view json_text);
  static Result<PlatformRegistry> load(const std::filesystem::path &path);

  const std::vector<PlatformModel> &models() const { return models_; }
  const PlatformModel *find(std::string_view name) const;
  bool empty() const { return models_.empty(); }
  std::size_t size() const { return models_.size(); }

  Result<void> add(PlatformModel model);

private:
  std::vector<PlatformModel> models_;
};

/// Flat 64-bit register file addressed by byte offset. Unwritten registers
/// read as zero.
class RegisterFile {
public:
  explicit RegisterFile(std::uint64_t bytes) : regs_(bytes / 8, 0) {}

  Result<std::uint64_t> read(std::uint64_t offset) const;
  Result<void> write(std::uint64_t offset, std::uint64_t value);
  std::uint64_t size_bytes() const { return regs_.size() * 8; }

private:
  Result<std::size_t> index(std::uint64_t offset) const;

  mutable std::mutex mu_;
  std::vector<std::uint64_t> regs_;
};

enum class Direction { ToDevice, FromDevice };

struct TransferReport {
  std::uint64_t bytes = 0;
  SimTime start;
  SimTime finish;
  SimTime duration() const { return finish - start; }
  double duration_us() const { return duration().us(); }
};

struct CompletionEvent {
  std::uint32_t pe_index = 0;
  SimTime modeled_timestamp;
  std::uint64_t sequence = 0; ///< unique per raise
};

/// One interrupt round trip as the on-device cycle counter would see it.
struct InterruptMeasurement {
  std::uint32_t pe_index = 0;
  SimTime raised_at;
  double round_trip_us = 0.0;
  std::uint64_t counted_cycles = 0;
  WaitPath path = WaitPath::Spin;
};

class Platform {
public:
  using RegisterObserver = std::function<void(std::uint64_t offset, std::uint64_t value)>;
  using AckObserver = std::function<void(std::uint32_t pe_index)>;

  explicit Platform(PlatformModel model, std::uint64_t seed = 0);
  static Result<std::shared_ptr<Platform>> open(std::string_view name,
                                                const PlatformRegistry &registry,
                                                std::uint64_t seed = 0);

  Platform(const Platform &) = delete;
  Platform &operator=(const Platform &) = delete;

  const PlatformModel &model() const { return model_; }
  const std::string &name() const { return model_.name; }
  VirtualClock &clock() { return clock_; }
  DeviceMemory &memory() { return memory_; }

  // -- device memory management
  Result<std::uint64_t> mem_alloc(std::uint64_t size);
  Result<void> mem_free(std::uint64_t address);
  std::optional<Region> mem_region(std::uint64_t address) const;
  std::uint64_t mem_free_bytes() const;

  // -- DMA; transfers serialize on one engine in modeled time
  Result<TransferReport> dma_to_device(std::span<const std::byte> host, std::uint64_t address);
  Result<TransferReport> dma_from_device(std::uint64_t address, std::span<std::byte> host);

  // -- registers
  Result<std::uint64_t> read_reg(std::uint64_t offset) const;
  /// Writes, then notifies the register observer outside any lock.
  Result<void> write_reg(std::uint64_t offset, std::uint64_t value);
  void set_register_observer(RegisterObserver observer);
  std::uint64_t register_space() const { return registers_.size_bytes(); }

  // -- interrupts
  /// Declares how many PEs the loaded design has and restarts sampling.
  void configure_pes(std::uint32_t count);
  std::uint32_t pe_count() const;
  Result<CompletionEvent> raise_interrupt(std::uint32_t pe_index, std::optional<SimTime> at = {});
  /// Blocks until an event is queued (FIFO) or stop is requested.
  std::optional<CompletionEvent> await_event(std::stop_token stop);
  std::optional<CompletionEvent> poll_event();
  Result<InterruptMeasurement> ack_interrupt(const CompletionEvent &event,
                                             WaitPath path = WaitPath::Spin);
  void set_ack_observer(AckObserver observer);
  /// Restarts every per-PE latency stream from `seed`.
  void reseed(std::uint64_t seed);

private:
  Result<void> check_range(std::uint64_t address, std::uint64_t size) const;
  TransferReport schedule_dma(std::uint64_t bytes);
  double sample_latency(std::uint32_t pe_index);
  void reset_samplers();

  PlatformModel model_;
  VirtualClock clock_;
  DeviceMemory memory_;
  RegisterFile registers_;

  mutable std::mutex mem_mu_;
  MemoryManager manager_;

  std::mutex dma_mu_;
  SimTime dma_free_at_;

  std::mutex observer_mu_;
  RegisterObserver reg_observer_;
  AckObserver ack_observer_;

  mutable std::mutex irq_mu_;
  std::condition_variable_any irq_cv_;
  std::deque<CompletionEvent> events_;
  std::set<std::uint64_t> outstanding_;
  std::vector<SimTime> last_raise_;
  std::uint64_t next_sequence_ = 1;
  std::uint64_t seed_;
  std::vector<std::mt19937_64> samplers_;
  std::piecewise_linear_distribution<double> latency_dist_;
};

} // namespace tpc

#endif /* TPC_PLATFORM_HPP__ */
