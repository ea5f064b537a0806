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
#include <tpc/threadpool.hpp>

#include <algorithm>
#include <exception>

namespace tpc {

// ---------------------------------------------------------------------------
// architectures

std::vector<PeSlot> FlatArchitecture::layout(std::vector<PeRequest> requests,
                                             std::uint64_t window_size) const {
  std::stable_sort(requests.begin(), requests.end(),
                   [](const PeRequest &a, const PeRequest &b) { return a.kernel_id < b.kernel_id; });
  std::vector<PeSlot> slots;
  std::uint32_t index = 0;
  for (const auto &r : requests) {
    for (std::uint32_t i = 0; i < r.count; ++i, ++index)
      slots.push_back({index, r.kernel_id, index * window_size, r.arity, r.return_width});
  }
  return slots;
}

std::size_t FlatArchitecture::select(std::span<const PeCandidate> candidates,
                                     SimTime launch) const {
  // earliest available start; ties go to the lowest index (candidates are ordered)
  std::size_t best = 0;
  SimTime best_start = std::max(launch, candidates[0].free_at);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const SimTime s = std::max(launch, candidates[i].free_at);
    if (s < best_start) {
      best = i;
      best_start = s;
    }
  }
  return best;
}

const Architecture *find_architecture(std::string_view name) {
  static const FlatArchitecture flat;
  if (name == flat.name())
    return &flat;
  return nullptr;
}

std::vector<std::string> architecture_names() { return {"flat"}; }

// ---------------------------------------------------------------------------
// pool construction

struct ThreadPool::Pe {
  PeSlot slot;
  const KernelSpec *kernel = nullptr;
  SimTime duration;

  // guarded by ThreadPool::mu_
  SimTime free_at;
  std::deque<Queued> queue;
  std::optional<SimTime> pending_start;
  std::uint64_t current_job = 0;
  bool awaiting_ack = false;
  bool busy = false;
  std::condition_variable_any cv;

  std::jthread worker;
};

ThreadPool::ThreadPool(const Architecture &arch, std::vector<PeSlot> slots,
                       std::uint64_t window_size, std::shared_ptr<Platform> platform,
                       std::shared_ptr<const KernelRegistry> kernels)
    : arch_(&arch), window_size_(window_size), platform_(std::move(platform)),
      kernels_(std::move(kernels)) {
  const double mhz = platform_->model().fabric_clock_mhz;
  for (const auto &s : slots) {
    auto pe = std::make_unique<Pe>();
    pe->slot = s;
    pe->kernel = kernels_->find(s.kernel_id);
    pe->duration = SimTime::from_cycles(pe->kernel->cycles_estimate, mhz);
    by_kernel_[s.kernel_id].push_back(s.pe_index);
    busy_[s.kernel_id] = 0;
    peak_busy_[s.kernel_id] = 0;
    pes_.push_back(std::move(pe));
  }
  platform_->configure_pes(static_cast<std::uint32_t>(pes_.size()));
  platform_->set_register_observer(
      [this](std::uint64_t offset, std::uint64_t value) { on_register_write(offset, value); });
  platform_->set_ack_observer([this](std::uint32_t pe) { on_ack(pe); });
  for (std::uint32_t i = 0; i < pes_.size(); ++i)
    pes_[i]->worker = std::jthread([this, i](std::stop_token st) { run_worker(st, i); });
}

ThreadPool::~ThreadPool() {
  platform_->set_register_observer(nullptr);
  platform_->set_ack_observer(nullptr);
  for (auto &pe : pes_)
    pe->worker.request_stop();
  for (auto &pe : pes_)
    if (pe->worker.joinable())
      pe->worker.join();
  platform_->configure_pes(0);
}

namespace {

Result<void> check_capacity(std::size_t pes, std::uint64_t window_size, const Platform &platform) {
  const PlatformModel &pm = platform.model();
  if (pes > pm.slot_budget)
    return make_error(Errc::SlotBudgetExceeded, std::to_string(pes) + " PEs exceed the " +
                                                    std::to_string(pm.slot_budget) +
                                                    "-slot budget of " + pm.name);
  if (pes * window_size > platform.register_space())
    return make_error(Errc::RegisterSpaceExceeded, "register windows do not fit " + pm.name);
  return {};
}

} // namespace

Result<std::unique_ptr<ThreadPool>>
ThreadPool::build(const Architecture &arch, std::vector<PeSlot> slots, std::uint64_t window_size,
                  std::shared_ptr<Platform> platform,
                  std::shared_ptr<const KernelRegistry> kernels) {
  if (auto r = check_capacity(slots.size(), window_size, *platform); !r)
    return r.error();
  return std::unique_ptr<ThreadPool>(new ThreadPool(arch, std::move(slots), window_size,
                                                    std::move(platform), std::move(kernels)));
}

Result<std::unique_ptr<ThreadPool>>
ThreadPool::instantiate(const Composition &composition, std::string_view architecture,
                        std::shared_ptr<Platform> platform,
                        std::shared_ptr<const KernelRegistry> kernels) {
  if (composition.entries.empty())
    return make_error(Errc::EmptyComposition, "composition has no kernels");
  const Architecture *arch = find_architecture(architecture);
  if (!arch)
    return make_error(Errc::UnknownArchitecture, std::string(architecture));
  std::vector<PeRequest> requests;
  std::uint32_t max_arity = 0;
  for (const auto &e : composition.entries) {
    const KernelSpec *k = kernels->find(e.kernel_id);
    if (!k)
      return make_error(Errc::UnknownKernel, "kernel id " + std::to_string(e.kernel_id));
    if (e.pe_count == 0)
      return make_error(Errc::ZeroPECount, "kernel id " + std::to_string(e.kernel_id));
    requests.push_back({e.kernel_id, e.pe_count, k->arity(), k->return_width});
    max_arity = std::max(max_arity, k->arity());
  }
  const std::uint64_t window = regmap::window_size(max_arity);
  auto slots = arch->layout(std::move(requests), window);
  return build(*arch, std::move(slots), window, std::move(platform), std::move(kernels));
}

Result<void> ThreadPool::check_design(const DesignArtifact &design, const Platform &platform,
                                      const KernelRegistry &kernels) {
  if (design.format_version != kDesignFormatVersion)
    return make_error(Errc::UnsupportedVersion,
                      "design format_version " + std::to_string(design.format_version));
  if (design.platform_name != platform.name())
    return make_error(Errc::PlatformMismatch, "design targets '" + design.platform_name +
                                                  "', device is '" + platform.name() + "'");
  if (!find_architecture(design.architecture))
    return make_error(Errc::UnknownArchitecture, design.architecture);
  if (design.pe_table.empty())
    return make_error(Errc::EmptyComposition, "design has no PEs");
  if (!std::has_single_bit(design.window_size))
    return make_error(Errc::InvalidArgument, "window_size must be a power of two");
  for (std::size_t i = 0; i < design.pe_table.size(); ++i) {
    const PeSlot &s = design.pe_table[i];
    const KernelSpec *k = kernels.find(s.kernel_id);
    if (!k)
      return make_error(Errc::UnknownKernel, "kernel id " + std::to_string(s.kernel_id));
    if (s.pe_index != i || s.arity != k->arity() || s.return_width != k->return_width ||
        design.window_size < regmap::window_size(s.arity) || s.base_offset % design.window_size)
      return make_error(Errc::InvalidArgument,
                        "pe_table row " + std::to_string(i) + " is inconsistent");
    for (std::size_t j = 0; j < i; ++j)
      if (design.pe_table[j].base_offset == s.base_offset)
        return make_error(Errc::InvalidArgument, "overlapping register windows");
  }
  std::uint64_t top = 0;
  for (const auto &s : design.pe_table)
    top = std::max(top, s.base_offset + design.window_size);
  if (top > platform.register_space())
    return make_error(Errc::RegisterSpaceExceeded, "register windows do not fit " + platform.name());
  return check_capacity(design.pe_table.size(), design.window_size, platform);
}

Result<std::unique_ptr<ThreadPool>>
ThreadPool::from_design(const DesignArtifact &design, std::shared_ptr<Platform> platform,
                        std::shared_ptr<const KernelRegistry> kernels) {
  if (auto r = check_design(design, *platform, *kernels); !r)
    return r.error();
  return build(*find_architecture(design.architecture), design.pe_table, design.window_size,
               std::move(platform), std::move(kernels));
}

// ---------------------------------------------------------------------------
// queries

const PeSlot &ThreadPool::slot(std::uint32_t pe_index) const { return pes_.at(pe_index)->slot; }

std::uint32_t ThreadPool::pe_count(KernelId kernel) const {
  auto it = by_kernel_.find(kernel);
  return it == by_kernel_.end() ? 0 : static_cast<std::uint32_t>(it->second.size());
}

SimTime ThreadPool::kernel_duration(KernelId kernel) const {
  auto it = by_kernel_.find(kernel);
  return it == by_kernel_.end() ? SimTime{} : pes_[it->second.front()]->duration;
}

std::uint64_t ThreadPool::current_job(std::uint32_t pe_index) const {
  std::lock_guard lock(mu_);
  return pe_index < pes_.size() ? pes_[pe_index]->current_job : 0;
}

std::vector<PeStatus> ThreadPool::status() const {
  std::lock_guard lock(mu_);
  std::vector<PeStatus> out;
  for (const auto &pe : pes_)
    out.push_back({pe->slot, pe->busy ? PeState::Busy : PeState::Idle, pe->free_at,
                   pe->queue.size()});
  return out;
}

std::uint32_t ThreadPool::peak_busy(KernelId kernel) const {
  std::lock_guard lock(mu_);
  auto it = peak_busy_.find(kernel);
  return it == peak_busy_.end() ? 0 : it->second;
}

// ---------------------------------------------------------------------------
// dispatch and execution

Result<Assignment> ThreadPool::dispatch(JobTicket ticket) {
  auto it = by_kernel_.find(ticket.kernel_id);
  if (it == by_kernel_.end())
    return make_error(Errc::UnknownKernel,
                      "no PE for kernel id " + std::to_string(ticket.kernel_id));
  std::unique_lock lock(mu_);
  std::vector<PeCandidate> candidates;
  candidates.reserve(it->second.size());
  for (std::uint32_t idx : it->second)
    candidates.push_back({idx, pes_[idx]->free_at});
  Pe &pe = *pes_[candidates[arch_->select(candidates, ticket.launch_time)].pe_index];
  if (ticket.args.size() != pe.slot.arity)
    return make_error(Errc::MissingArguments, "argument count does not match kernel arity");

  Assignment a;
  a.pe_index = pe.slot.pe_index;
  a.start = std::max(ticket.launch_time, pe.free_at);
  a.finish = a.start + pe.duration;
  pe.free_at = a.finish;
  pe.queue.push_back({std::move(ticket), a.start});
  lock.unlock();
  pe.cv.notify_all();
  return a;
}

void ThreadPool::run_worker(std::stop_token stop, std::uint32_t pe_index) {
  Pe &pe = *pes_[pe_index];
  while (true) {
    Queued next;
    {
      std::unique_lock lock(mu_);
      if (!pe.cv.wait(lock, stop, [&] { return !pe.queue.empty() && !pe.awaiting_ack; }))
        return;
      next = std::move(pe.queue.front());
      pe.queue.pop_front();
      pe.pending_start = next.start;
      pe.current_job = next.ticket.job_id;
    }
    const std::uint64_t base = pe.slot.base_offset;
    for (std::uint32_t i = 0; i < next.ticket.args.size(); ++i)
      (void)platform_->write_reg(base + regmap::arg(i), next.ticket.args[i]);
    (void)platform_->write_reg(base + regmap::kCtrl, regmap::kCtrlStart);
  }
}

void ThreadPool::on_register_write(std::uint64_t offset, std::uint64_t value) {
  const std::uint64_t pe = offset / window_size_;
  if (pe >= pes_.size() || offset % window_size_ != regmap::kCtrl ||
      !(value & regmap::kCtrlStart))
    return;
  execute(static_cast<std::uint32_t>(pe));
}

void ThreadPool::on_ack(std::uint32_t pe_index) {
  if (pe_index >= pes_.size())
    return;
  Pe &pe = *pes_[pe_index];
  {
    std::lock_guard lock(mu_);
    pe.awaiting_ack = false;
  }
  pe.cv.notify_all();
}

void ThreadPool::execute(std::uint32_t pe_index) {
  Pe &pe = *pes_[pe_index];
  const KernelSpec &kernel = *pe.kernel;
  SimTime start;
  {
    std::lock_guard lock(mu_);
    if (pe.busy)
      return; // start while running is ignored, as on hardware
    pe.busy = true;
    auto &busy = busy_[kernel.id];
    ++busy;
    peak_busy_[kernel.id] = std::max(peak_busy_[kernel.id], busy);
    if (pe.pending_start) {
      start = *pe.pending_start;
      pe.pending_start.reset();
    } else {
      // started by a raw register poke rather than the dispatcher
      start = std::max(pe.free_at, platform_->clock().now());
      pe.free_at = start + pe.duration;
    }
  }

  const std::uint64_t base = pe.slot.base_offset;
  (void)platform_->write_reg(base + regmap::kCtrl, 0); // start bit self-clears
  (void)platform_->write_reg(base + regmap::kStatus, 0);

  std::vector<std::uint64_t> regs(kernel.arity());
  std::vector<DeviceView> views(kernel.arity());
  Result<std::uint64_t> result = std::uint64_t{0};
  bool resolved = true;
  for (std::uint32_t i = 0; i < kernel.arity(); ++i) {
    regs[i] = platform_->read_reg(base + regmap::arg(i)).value();
    if (kernel.args[i].kind != ArgKind::Handle)
      continue;
    auto region = platform_->mem_region(regs[i]);
    if (!region) {
      result = make_error(Errc::KernelFault, "argument " + std::to_string(i) +
                                                 " is not inside a device allocation");
      resolved = false;
      break;
    }
    views[i] = DeviceView(&platform_->memory(), Region{regs[i], region->end() - regs[i]});
  }
  if (resolved) {
    try {
      result = kernel.function(KernelArgs(regs, views));
    } catch (const std::exception &e) {
      result = make_error(Errc::KernelFault, e.what());
    }
  }

  (void)platform_->write_reg(base + regmap::kReturn, result ? *result : 0);
  (void)platform_->write_reg(base + regmap::kStatus,
                             regmap::kStatusDone | (result ? 0 : regmap::kStatusFault));
  {
    std::lock_guard lock(mu_);
    pe.busy = false;
    --busy_[kernel.id];
    pe.awaiting_ack = true;
  }
  (void)platform_->raise_interrupt(pe_index, start + pe.duration);
}

} // namespace tpc
