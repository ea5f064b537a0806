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
#include <tpc/tpc_api.hpp>

#include <algorithm>

namespace tpc {

std::string_view to_string(JobState s) {
  switch (s) {
  case JobState::Prepared:
    return "Prepared";
  case JobState::Launched:
    return "Launched";
  case JobState::Completed:
    return "Completed";
  case JobState::Released:
    return "Released";
  }
  return "?";
}

std::vector<DeviceInfo> enumerate_devices(const PlatformRegistry &registry) {
  std::vector<DeviceInfo> out;
  const auto &models = registry.models();
  for (std::size_t i = 0; i < models.size(); ++i)
    out.push_back({static_cast<std::uint32_t>(i), models[i].name, models[i].device_memory_size});
  return out;
}

Result<std::unique_ptr<Device>> Device::open(const PlatformRegistry &registry,
                                             std::uint32_t device_id,
                                             std::shared_ptr<const KernelRegistry> kernels,
                                             std::uint64_t seed) {
  if (device_id >= registry.size())
    return make_error(Errc::UnknownDevice, "device id " + std::to_string(device_id) + " of " +
                                               std::to_string(registry.size()));
  auto platform = Platform::open(registry.models()[device_id].name, registry, seed);
  if (!platform)
    return platform.error();
  if (!kernels)
    kernels = std::make_shared<const KernelRegistry>(builtin_kernels());
  return std::unique_ptr<Device>(new Device(device_id, std::move(*platform), std::move(kernels)));
}

Device::Device(std::uint32_t id, std::shared_ptr<Platform> platform,
               std::shared_ptr<const KernelRegistry> kernels)
    : id_(id), platform_(std::move(platform)), kernels_(std::move(kernels)) {
  completion_ = std::jthread([this](std::stop_token st) { completion_loop(st); });
}

Device::~Device() {
  completion_.request_stop();
  if (completion_.joinable())
    completion_.join();
  std::unique_lock lock(pool_mu_);
  pool_.reset();
}

// ---------------------------------------------------------------------------
// design management

Result<void> Device::load_design(const DesignArtifact &design) {
  std::unique_lock pool_lock(pool_mu_);
  {
    std::lock_guard lock(mu_);
    if (launched_ > 0)
      return make_error(Errc::DeviceBusy, std::to_string(launched_) + " job(s) in flight");
  }
  if (auto r = ThreadPool::check_design(design, *platform_, *kernels_); !r)
    return r;
  // The old pool owns the platform observers and must go first.
  pool_.reset();
  auto pool = ThreadPool::from_design(design, platform_, kernels_);
  std::lock_guard lock(mu_);
  jobs_.clear();
  if (!pool) {
    design_.reset();
    return pool.error();
  }
  pool_ = std::move(*pool);
  design_ = design;
  return {};
}

Result<void> Device::load_composition(const Composition &composition) {
  auto design = compose(composition, platform_->model(), *kernels_);
  if (!design)
    return design.error();
  return load_design(*design);
}

std::optional<DesignArtifact> Device::design() const {
  std::shared_lock lock(pool_mu_);
  return design_;
}

Result<std::uint64_t> Device::pe_base(std::uint32_t pe_index) const {
  std::shared_lock lock(pool_mu_);
  if (!pool_)
    return make_error(Errc::NoDesignLoaded, "no design loaded");
  if (pe_index >= pool_->size())
    return make_error(Errc::InvalidPE, "PE " + std::to_string(pe_index));
  return pool_->slot(pe_index).base_offset;
}

std::uint32_t Device::peak_busy(KernelId kernel) const {
  std::shared_lock lock(pool_mu_);
  return pool_ ? pool_->peak_busy(kernel) : 0;
}

// ---------------------------------------------------------------------------
// memory

Result<MemoryHandle> Device::alloc(std::uint64_t size) {
  if (size == 0)
    return make_error(Errc::ZeroSize, "allocation of zero bytes");
  auto addr = platform_->mem_alloc(size);
  if (!addr)
    return addr.error();
  std::lock_guard lock(mu_);
  const MemoryHandle h{next_handle_++};
  handles_[h.id] = Region{*addr, size};
  return h;
}

Result<void> Device::free(MemoryHandle h) {
  std::lock_guard lock(mu_);
  auto it = handles_.find(h.id);
  if (it == handles_.end())
    return make_error(Errc::InvalidHandle, "handle " + std::to_string(h.id));
  if (auto r = platform_->mem_free(it->second.base); !r)
    return r;
  handles_.erase(it);
  return {};
}

Result<Region> Device::region_locked(MemoryHandle h) const {
  auto it = handles_.find(h.id);
  if (it == handles_.end())
    return make_error(Errc::InvalidHandle, "handle " + std::to_string(h.id));
  return it->second;
}

Result<Region> Device::region(MemoryHandle h) const {
  std::lock_guard lock(mu_);
  return region_locked(h);
}

Result<CopyReport> Device::copy_to(std::span<const std::byte> src, MemoryHandle h,
                                   std::uint64_t size, LaunchMode mode) {
  auto r = region(h);
  if (!r)
    return r.error();
  if (size > r->size)
    return make_error(Errc::SizeExceedsRegion, std::to_string(size) + " bytes into a " +
                                                   std::to_string(r->size) + "-byte region");
  if (src.size() < size)
    return make_error(Errc::InvalidArgument, "source buffer is shorter than size");
  auto t = platform_->dma_to_device(src.first(size), r->base);
  if (!t)
    return t.error();
  CopyReport report{t->bytes, t->start, t->finish, {}};
  if (mode == LaunchMode::Blocking) {
    platform_->clock().advance_to(t->finish);
  } else {
    std::lock_guard lock(mu_);
    report.token = TransferToken{next_token_++};
    transfers_[report.token->id] = t->finish;
  }
  return report;
}

Result<CopyFromResult> Device::copy_from(MemoryHandle h, std::uint64_t size, LaunchMode mode) {
  auto r = region(h);
  if (!r)
    return r.error();
  if (size > r->size)
    return make_error(Errc::SizeExceedsRegion, std::to_string(size) + " bytes from a " +
                                                   std::to_string(r->size) + "-byte region");
  CopyFromResult out;
  out.data.resize(size);
  auto t = platform_->dma_from_device(r->base, out.data);
  if (!t)
    return t.error();
  out.report = CopyReport{t->bytes, t->start, t->finish, {}};
  if (mode == LaunchMode::Blocking) {
    platform_->clock().advance_to(t->finish);
  } else {
    std::lock_guard lock(mu_);
    out.report.token = TransferToken{next_token_++};
    transfers_[out.report.token->id] = t->finish;
  }
  return out;
}

Result<void> Device::transfer_wait(TransferToken token) {
  SimTime finish;
  {
    std::lock_guard lock(mu_);
    auto it = transfers_.find(token.id);
    if (it == transfers_.end())
      return make_error(Errc::InvalidToken, "transfer token " + std::to_string(token.id));
    finish = it->second;
  }
  platform_->clock().advance_to(finish);
  return {};
}

// ---------------------------------------------------------------------------
// jobs

Result<Device::Job *> Device::find_job(JobId j) {
  if (j.id == 0 || j.id >= next_job_)
    return make_error(Errc::UnknownJob, "job " + std::to_string(j.id));
  auto it = jobs_.find(j.id);
  if (it == jobs_.end() || it->second.id.kernel_id != j.kernel_id)
    return make_error(Errc::InvalidJobState, "job " + std::to_string(j.id) + " is released");
  return &it->second;
}

Result<const Device::Job *> Device::find_job(JobId j) const {
  auto r = const_cast<Device *>(this)->find_job(j);
  if (!r)
    return r.error();
  return static_cast<const Job *>(*r);
}

Result<JobId> Device::acquire_job_id(KernelId kernel) {
  std::shared_lock pool_lock(pool_mu_);
  if (!pool_)
    return make_error(Errc::NoDesignLoaded, "no design loaded");
  if (!pool_->has_kernel(kernel))
    return make_error(Errc::UnknownKernel,
                      "no PE implements kernel id " + std::to_string(kernel));
  const KernelSpec *spec = kernels_->find(kernel);
  std::lock_guard lock(mu_);
  Job job;
  job.id = JobId{next_job_++, kernel};
  job.kernel = spec;
  job.slots.resize(spec->arity());
  job.info.id = job.id;
  const JobId id = job.id;
  jobs_.emplace(id.id, std::move(job));
  return id;
}

Result<void> Device::set_arg(JobId j, std::uint32_t index, std::span<const std::byte> payload) {
  std::lock_guard lock(mu_);
  auto job = find_job(j);
  if (!job)
    return job.error();
  Job &jb = **job;
  if (jb.state != JobState::Prepared)
    return make_error(Errc::InvalidJobState,
                      std::string("set_arg on a ") + std::string(to_string(jb.state)) + " job");
  if (index >= jb.kernel->arity())
    return make_error(Errc::ArgIndexOutOfRange, "argument " + std::to_string(index) + " of " +
                                                    std::to_string(jb.kernel->arity()));
  const ArgSpec &spec = jb.kernel->args[index];
  if (payload.size() != spec.width)
    return make_error(Errc::ArgSizeMismatch, "argument " + std::to_string(index) + " takes " +
                                                 std::to_string(spec.width) + " bytes, got " +
                                                 std::to_string(payload.size()));
  std::uint64_t value = 0;
  std::memcpy(&value, payload.data(), payload.size());
  if (spec.kind == ArgKind::Handle) {
    auto r = region_locked(MemoryHandle{value});
    if (!r)
      return r.error();
    value = r->base;
  }
  jb.slots[index] = value;
  return {};
}

Result<void> Device::launch(JobId j, LaunchMode mode) {
  {
    std::shared_lock pool_lock(pool_mu_);
    JobTicket ticket;
    {
      std::lock_guard lock(mu_);
      auto job = find_job(j);
      if (!job)
        return job.error();
      Job &jb = **job;
      if (jb.state != JobState::Prepared)
        return make_error(Errc::InvalidJobState,
                          std::string("launch of a ") + std::string(to_string(jb.state)) + " job");
      for (std::size_t i = 0; i < jb.slots.size(); ++i) {
        if (!jb.slots[i])
          return make_error(Errc::MissingArguments, "argument " + std::to_string(i) + " not set");
        ticket.args.push_back(*jb.slots[i]);
      }
      ticket.job_id = j.id;
      ticket.kernel_id = j.kernel_id;
      ticket.launch_time = platform_->clock().now();
      jb.info.launched_at = ticket.launch_time;
      jb.state = JobState::Launched;
      jb.info.state = JobState::Launched;
      ++launched_;
    }
    auto a = pool_->dispatch(std::move(ticket));
    std::lock_guard lock(mu_);
    Job &jb = jobs_.at(j.id);
    if (!a) {
      jb.state = JobState::Prepared;
      jb.info.state = JobState::Prepared;
      --launched_;
      return a.error();
    }
    if (jb.state == JobState::Launched) {
      jb.info.pe_index = a->pe_index;
      jb.info.started_at = a->start;
      jb.info.finished_at = a->finish;
    }
  }
  if (mode == LaunchMode::Blocking)
    return wait(j);
  return {};
}

Result<void> Device::wait(JobId j) {
  SimTime completed;
  {
    std::unique_lock lock(mu_);
    auto job = find_job(j);
    if (!job)
      return job.error();
    if ((*job)->state == JobState::Prepared)
      return make_error(Errc::InvalidJobState, "wait on a job that was never launched");
    cv_.wait(lock, [&] {
      auto it = jobs_.find(j.id);
      return it == jobs_.end() || it->second.state != JobState::Launched;
    });
    auto it = jobs_.find(j.id);
    if (it == jobs_.end())
      return make_error(Errc::InvalidJobState, "job was invalidated while waiting");
    completed = it->second.info.completed_at;
  }
  platform_->clock().advance_to(completed);
  return {};
}

Result<std::vector<std::byte>> Device::get_return(JobId j, std::size_t size) {
  std::lock_guard lock(mu_);
  auto job = find_job(j);
  if (!job)
    return job.error();
  const Job &jb = **job;
  if (jb.state != JobState::Completed)
    return make_error(Errc::InvalidJobState,
                      std::string("get_return on a ") + std::string(to_string(jb.state)) + " job");
  if (size != jb.kernel->return_width)
    return make_error(Errc::ReturnSizeMismatch,
                      "kernel returns " + std::to_string(jb.kernel->return_width) +
                          " bytes, asked for " + std::to_string(size));
  if (jb.info.faulted)
    return make_error(Errc::KernelFault, "kernel " + jb.kernel->name + " faulted");
  std::vector<std::byte> out(size);
  std::memcpy(out.data(), &jb.return_value, size);
  return out;
}

Result<void> Device::release_job_id(JobId j) {
  std::lock_guard lock(mu_);
  auto job = find_job(j);
  if (!job)
    return job.error();
  if ((*job)->state == JobState::Launched)
    return make_error(Errc::InvalidJobState, "release of a Launched job");
  jobs_.erase(j.id);
  return {};
}

Result<JobInfo> Device::job_info(JobId j) const {
  std::lock_guard lock(mu_);
  auto job = find_job(j);
  if (!job)
    return job.error();
  return (*job)->info;
}

std::size_t Device::in_flight() const {
  std::lock_guard lock(mu_);
  return launched_;
}

void Device::set_wait_path(std::optional<WaitPath> path) {
  std::lock_guard lock(mu_);
  wait_path_ = path;
}

void Device::completion_loop(std::stop_token stop) {
  while (auto ev = platform_->await_event(stop)) {
    std::shared_lock pool_lock(pool_mu_);
    if (!pool_ || ev->pe_index >= pool_->size()) {
      (void)platform_->ack_interrupt(*ev);
      continue;
    }
    const PeSlot &slot = pool_->slot(ev->pe_index);
    const std::uint64_t job_id = pool_->current_job(ev->pe_index);
    const std::uint64_t ret = platform_->read_reg(slot.base_offset + regmap::kReturn).value();
    const std::uint64_t status = platform_->read_reg(slot.base_offset + regmap::kStatus).value();
    const SimTime duration = pool_->kernel_duration(slot.kernel_id);
    WaitPath path;
    {
      std::lock_guard lock(mu_);
      path = wait_path_.value_or(duration.us() <= platform_->model().interrupt.spin_threshold_us
                                     ? WaitPath::Spin
                                     : WaitPath::Sleep);
    }
    auto m = platform_->ack_interrupt(*ev, path);
    pool_lock.unlock();
    {
      std::lock_guard lock(mu_);
      auto it = jobs_.find(job_id);
      if (it == jobs_.end() || it->second.state != JobState::Launched)
        continue;
      Job &jb = it->second;
      const std::uint64_t mask =
          jb.kernel->return_width >= 8 ? ~0ull : (1ull << (8 * jb.kernel->return_width)) - 1;
      jb.return_value = ret & mask;
      jb.info.pe_index = ev->pe_index;
      jb.info.finished_at = ev->modeled_timestamp;
      jb.info.started_at = ev->modeled_timestamp - duration;
      jb.info.completed_at = ev->modeled_timestamp;
      if (m) {
        jb.info.completed_at = ev->modeled_timestamp + SimTime::from_us(m->round_trip_us);
        jb.info.interrupt = *m;
      }
      jb.info.faulted = (status & regmap::kStatusFault) != 0;
      jb.state = JobState::Completed;
      jb.info.state = JobState::Completed;
      --launched_;
    }
    cv_.notify_all();
  }
}

} // namespace tpc
