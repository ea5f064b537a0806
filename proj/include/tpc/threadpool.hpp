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
 * @file threadpool.hpp
 * @brief Simulated on-chip organization: an Architecture arranges processing
 *        elements (PEs) into a ThreadPool that talks to the host only through
 *        Platform registers and interrupts.
 *
 * Each PE owns a worker thread. A dispatched job is written into the PE's
 * ARG registers and started by setting CTRL.start; the register write is
 * what runs the kernel. On completion the PE writes RETURN and STATUS,
 * raises an interrupt and will not accept further work until the host
 * acknowledges it.
 *
 * Scheduling decisions are made in modeled time at dispatch, so they do not
 * depend on how the host OS happens to interleave the worker threads.
 */
#ifndef TPC_THREADPOOL_HPP__
#define TPC_THREADPOOL_HPP__

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <tpc/design.hpp>
#include <tpc/kernels.hpp>
#include <tpc/platform.hpp>
#include <tpc/result.hpp>
#include <tpc/sim_time.hpp>

namespace tpc {

struct PeRequest {
  KernelId kernel_id = 0;
  std::uint32_t count = 1;
  std::uint32_t arity = 0;
  std::uint32_t return_width = 8;
};

struct PeCandidate {
  std::uint32_t pe_index = 0;
  SimTime free_at;
};

/// Construction template for the PE organization. Depends on nothing
/// platform specific so it can be reused on every Platform.
class Architecture {
public:
  virtual ~Architecture() = default;
  virtual std::string_view name() const = 0;
  virtual std::vector<PeSlot> layout(std::vector<PeRequest> requests,
                                     std::uint64_t window_size) const = 0;
  /// Index into `candidates` (ascending pe_index, never empty) of the PE that
  /// serves a job launched at `launch`.
  virtual std::size_t select(std::span<const PeCandidate> candidates, SimTime launch) const = 0;
};

/**
 * "flat": every PE is a peer behind one dispatcher. PEs are laid out by
 * ascending kernel id, then instance order, with windows packed from offset
 * 0. A job takes the lowest-indexed PE that is idle at launch; when all are
 * busy it waits in FIFO order for the first one to free up.
 */
class FlatArchitecture final : public Architecture {
public:
  std::string_view name() const override { return "flat"; }
  std::vector<PeSlot> layout(std::vector<PeRequest> requests,
                             std::uint64_t window_size) const override;
  std::size_t select(std::span<const PeCandidate> candidates, SimTime launch) const override;
};

const Architecture *find_architecture(std::string_view name);
std::vector<std::string> architecture_names();

struct JobTicket {
  std::uint64_t job_id = 0;
  KernelId kernel_id = 0;
  std::vector<std::uint64_t> args;
  SimTime launch_time;
};

struct Assignment {
  std::uint32_t pe_index = 0;
  SimTime start;
  SimTime finish;
};

enum class PeState { Idle, Busy };

struct PeStatus {
  PeSlot slot;
  PeState state = PeState::Idle;
  SimTime free_at;
  std::size_t queued = 0;
};

class ThreadPool {
public:
  static Result<std::unique_ptr<ThreadPool>>
  instantiate(const Composition &composition, std::string_view architecture,
              std::shared_ptr<Platform> platform, std::shared_ptr<const KernelRegistry> kernels);

  /// Every check from_design performs, without touching the platform.
  static Result<void> check_design(const DesignArtifact &design, const Platform &platform,
                                   const KernelRegistry &kernels);

  static Result<std::unique_ptr<ThreadPool>>
  from_design(const DesignArtifact &design, std::shared_ptr<Platform> platform,
              std::shared_ptr<const KernelRegistry> kernels);

  ~ThreadPool();
  ThreadPool(const ThreadPool &) = delete;
  ThreadPool &operator=(const ThreadPool &) = delete;

  Result<Assignment> dispatch(JobTicket ticket);

  /// Job most recently started on `pe_index`, 0 when none.
  std::uint64_t current_job(std::uint32_t pe_index) const;

  std::size_t size() const { return pes_.size(); }
  const PeSlot &slot(std::uint32_t pe_index) const;
  std::uint32_t pe_count(KernelId kernel) const;
  bool has_kernel(KernelId kernel) const { return pe_count(kernel) > 0; }
  std::uint64_t window_size() const { return window_size_; }
  const Architecture &architecture() const { return *arch_; }
  SimTime kernel_duration(KernelId kernel) const;
  std::vector<PeStatus> status() const;
  /// Highest number of simultaneously busy PEs observed for `kernel`.
  std::uint32_t peak_busy(KernelId kernel) const;

private:
  struct Pe;
  struct Queued {
    JobTicket ticket;
    SimTime start;
  };

  ThreadPool(const Architecture &arch, std::vector<PeSlot> slots, std::uint64_t window_size,
             std::shared_ptr<Platform> platform, std::shared_ptr<const KernelRegistry> kernels);

  static Result<std::unique_ptr<ThreadPool>>
  build(const Architecture &arch, std::vector<PeSlot> slots, std::uint64_t window_size,
        std::shared_ptr<Platform> platform, std::shared_ptr<const KernelRegistry> kernels);

  void on_register_write(std::uint64_t offset, std::uint64_t value);
  void on_ack(std::uint32_t pe_index);
  void execute(std::uint32_t pe_index);
  void run_worker(std::stop_token stop, std::uint32_t pe_index);

  const Architecture *arch_;
  std::uint64_t window_size_;
  std::shared_ptr<Platform> platform_;
  std::shared_ptr<const KernelRegistry> kernels_;

  mutable std::mutex mu_;
  std::vector<std::unique_ptr<Pe>> pes_;
  std::map<KernelId, std::vector<std::uint32_t>> by_kernel_;
  std::map<KernelId, std::uint32_t> busy_;
  std::map<KernelId, std::uint32_t> peak_busy_;
};

} // namespace tpc

#endif /* TPC_THREADPOOL_HPP__ */
