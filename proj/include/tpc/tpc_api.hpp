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
 * @file tpc_api.hpp
 * @brief Application-facing layer: device enumeration, device memory,
 *        transfers, and the job lifecycle.
 *
 * Mapping to the classic C names:
 *
 *   tpc_device_alloc             Device::alloc
 *   tpc_device_free              Device::free
 *   tpc_device_copy_to           Device::copy_to
 *   tpc_device_copy_from         Device::copy_from
 *   tpc_device_acquire_job_id    Device::acquire_job_id
 *   tpc_device_job_set_arg       Device::set_arg
 *   tpc_device_job_launch        Device::launch
 *   tpc_device_job_get_return    Device::get_return
 *   tpc_device_release_job_id    Device::release_job_id
 *
 * A Device may be used from several threads at once as long as calls on the
 * same JobId are ordered by the caller. Blocking calls suspend only the
 * calling thread.
 *
 * Every reported duration is modeled time from the platform's virtual
 * clock. Transfers move their bytes immediately; a NonBlocking copy just
 * leaves the host clock where it was until transfer_wait.
 */
#ifndef TPC_TPC_API_HPP__
#define TPC_TPC_API_HPP__

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include <tpc/composer.hpp>
#include <tpc/design.hpp>
#include <tpc/kernels.hpp>
#include <tpc/platform.hpp>
#include <tpc/result.hpp>
#include <tpc/threadpool.hpp>

namespace tpc {

struct MemoryHandle {
  std::uint64_t id = 0;

  explicit operator bool() const { return id != 0; }
  bool operator==(const MemoryHandle &) const = default;
};

struct JobId {
  std::uint64_t id = 0;
  KernelId kernel_id = 0;

  bool operator==(const JobId &) const = default;
};

enum class JobState { Prepared, Launched, Completed, Released };
enum class LaunchMode { Blocking, NonBlocking };

std::string_view to_string(JobState s);

struct TransferToken {
  std::uint64_t id = 0;
  bool operator==(const TransferToken &) const = default;
};

struct CopyReport {
  std::uint64_t bytes = 0;
  SimTime start;
  SimTime finish;
  /// Set for NonBlocking copies; resolve with transfer_wait.
  std::optional<TransferToken> token;

  SimTime duration() const { return finish - start; }
  double duration_us() const { return duration().us(); }
};

struct CopyFromResult {
  std::vector<std::byte> data;
  CopyReport report;
};

struct DeviceInfo {
  std::uint32_t device_id = 0;
  std::string platform_name;
  std::uint64_t device_memory_size = 0;
};

/// One entry per configured platform, device id = registry position.
std::vector<DeviceInfo> enumerate_devices(const PlatformRegistry &registry);

struct JobInfo {
  JobId id;
  JobState state = JobState::Prepared;
  std::uint32_t pe_index = 0;
  SimTime launched_at;
  SimTime started_at;
  SimTime finished_at;  ///< PE done, interrupt raised
  SimTime completed_at; ///< host saw the interrupt
  bool faulted = false;
  std::optional<InterruptMeasurement> interrupt;
};

class Device {
public:
  static Result<std::unique_ptr<Device>>
  open(const PlatformRegistry &registry, std::uint32_t device_id,
       std::shared_ptr<const KernelRegistry> kernels = nullptr, std::uint64_t seed = 0);

  ~Device();
  Device(const Device &) = delete;
  Device &operator=(const Device &) = delete;

  std::uint32_t id() const { return id_; }
  Platform &platform() { return *platform_; }
  const Platform &platform() const { return *platform_; }
  const KernelRegistry &kernels() const { return *kernels_; }
  VirtualClock &clock() { return platform_->clock(); }

  // -- design management

  /// Replaces the resident design. Jobs are invalidated, memory is kept.
  Result<void> load_design(const DesignArtifact &design);
  /// compose() followed by load_design().
  Result<void> load_composition(const Composition &composition);
  std::optional<DesignArtifact> design() const;
  /// Register window base of a PE in the resident design.
  Result<std::uint64_t> pe_base(std::uint32_t pe_index) const;
  std::uint32_t peak_busy(KernelId kernel) const;

  // -- memory

  Result<MemoryHandle> alloc(std::uint64_t size);
  Result<void> free(MemoryHandle h);
  Result<Region> region(MemoryHandle h) const;

  Result<CopyReport> copy_to(std::span<const std::byte> src, MemoryHandle h, std::uint64_t size,
                             LaunchMode mode = LaunchMode::Blocking);
  Result<CopyFromResult> copy_from(MemoryHandle h, std::uint64_t size,
                                   LaunchMode mode = LaunchMode::Blocking);
  Result<void> transfer_wait(TransferToken token);

  // -- jobs

  Result<JobId> acquire_job_id(KernelId kernel);

  /// `payload` must be exactly the slot's declared width. Handle slots take
  /// the 8-byte MemoryHandle and receive its device address.
  Result<void> set_arg(JobId j, std::uint32_t index, std::span<const std::byte> payload);

  template <typename T>
    requires(std::is_trivially_copyable_v<T> &&
             !std::is_convertible_v<const T &, std::span<const std::byte>>)
  Result<void> set_arg(JobId j, std::uint32_t index, const T &value) {
    return set_arg(j, index, std::as_bytes(std::span<const T, 1>(&value, 1)));
  }

  Result<void> launch(JobId j, LaunchMode mode = LaunchMode::Blocking);
  /// Returns once the job is Completed; idempotent.
  Result<void> wait(JobId j);
  Result<std::vector<std::byte>> get_return(JobId j, std::size_t size);

  template <typename T>
    requires std::is_trivially_copyable_v<T>
  Result<T> get_return_as(JobId j) {
    auto bytes = get_return(j, sizeof(T));
    if (!bytes)
      return bytes.error();
    T v;
    std::memcpy(&v, bytes->data(), sizeof(T));
    return v;
  }

  Result<void> release_job_id(JobId j);

  Result<JobInfo> job_info(JobId j) const;
  /// Jobs currently in state Launched.
  std::size_t in_flight() const;

  /// Forces the interrupt wait path for subsequent completions; nullopt
  /// restores the choice by kernel runtime.
  void set_wait_path(std::optional<WaitPath> path);

private:
  struct Job {
    JobId id;
    JobState state = JobState::Prepared;
    const KernelSpec *kernel = nullptr;
    std::vector<std::optional<std::uint64_t>> slots;
    JobInfo info;
    std::uint64_t return_value = 0;
  };

  Device(std::uint32_t id, std::shared_ptr<Platform> platform,
         std::shared_ptr<const KernelRegistry> kernels);

  void completion_loop(std::stop_token stop);
  Result<Job *> find_job(JobId j);
  Result<const Job *> find_job(JobId j) const;
  Result<Region> region_locked(MemoryHandle h) const;

  std::uint32_t id_;
  std::shared_ptr<Platform> platform_;
  std::shared_ptr<const KernelRegistry> kernels_;

  mutable std::shared_mutex pool_mu_;
  std::unique_ptr<ThreadPool> pool_;
  std::optional<DesignArtifact> design_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::uint64_t, Region> handles_;
  std::uint64_t next_handle_ = 1;
  std::unordered_map<std::uint64_t, Job> jobs_;
  std::uint64_t next_job_ = 1;
  std::size_t launched_ = 0;
  std::map<std::uint64_t, SimTime> transfers_;
  std::uint64_t next_token_ = 1;
  std::optional<WaitPath> wait_path_;

  std::jthread completion_;
};

} // namespace tpc

#endif /* TPC_TPC_API_HPP__ */
