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
#include <tpc/platform.hpp>

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace tpc {

using nlohmann::json;

// ---------------------------------------------------------------------------
// transfer model

SimTime TransferModel::duration(std::uint64_t bytes) const {
  if (bytes == 0)
    return SimTime::from_us(setup_overhead_us);
  const double mib = static_cast<double>(bytes) / kMiB;
  if (!per_chunk.empty() && bytes >= per_chunk.begin()->first) {
    double rate = per_chunk.rbegin()->second;
    auto hi = per_chunk.lower_bound(bytes);
    if (hi != per_chunk.end()) {
      if (hi->first == bytes || hi == per_chunk.begin()) {
        rate = hi->second;
      } else {
        auto lo = std::prev(hi);
        const double t = static_cast<double>(bytes - lo->first) /
                         static_cast<double>(hi->first - lo->first);
        rate = lo->second + t * (hi->second - lo->second);
      }
    }
    return SimTime::from_us(mib / rate * 1e6);
  }
  return SimTime::from_us(setup_overhead_us +
                          mib * (1e6 / bandwidth_mib_s + dma_alloc_penalty_us_per_mib));
}

double TransferModel::rate_mib_s(std::uint64_t bytes) const {
  const double us = duration(bytes).us();
  return us > 0.0 ? static_cast<double>(bytes) / kMiB / (us / 1e6) : 0.0;
}

// ---------------------------------------------------------------------------
// model validation and registry parsing

Result<void> PlatformModel::validate() const {
  auto bad = [this](const std::string &what) {
    return make_error(Errc::InvalidConfig, "platform '" + name + "': " + what);
  };
  if (name.empty())
    return bad("empty name");
  if (device_memory_size == 0)
    return bad("device_memory_size must be > 0");
  if (!(fabric_clock_mhz > 0.0))
    return bad("fabric_clock_mhz must be > 0");
  if (slot_budget < 1)
    return bad("slot_budget must be >= 1");
  if (register_space_bytes == 0 || register_space_bytes % 8 != 0)
    return bad("register_space_bytes must be a positive multiple of 8");
  if (!(transfer.bandwidth_mib_s > 0.0) || transfer.setup_overhead_us < 0.0 ||
      transfer.dma_alloc_penalty_us_per_mib < 0.0)
    return bad("transfer model needs bandwidth > 0 and non-negative overheads");
  for (const auto &[bytes, rate] : transfer.per_chunk)
    if (bytes == 0 || !(rate > 0.0))
      return bad("per_chunk entries need chunk > 0 and rate > 0");
  const auto &irq = interrupt;
  if (irq.latency_min_us < 0.0 || irq.latency_min_us > irq.latency_avg_us ||
      irq.latency_avg_us > irq.latency_max_us)
    return bad("interrupt latencies must satisfy 0 <= min <= avg <= max");
  if (irq.latency_max_us > irq.latency_min_us) {
    const double mode = irq.mode_us();
    if (mode < irq.latency_min_us - 1e-9 || mode > irq.latency_max_us + 1e-9)
      return bad("interrupt avg is not reachable by a triangular distribution on [min, max]");
  }
  if (irq.wakeup_penalty_us < 0.0 || irq.spin_threshold_us < 0.0)
    return bad("interrupt penalties must be non-negative");
  return {};
}

namespace {

Result<void> check_keys(const json &obj, std::initializer_list<std::string_view> allowed,
                        const std::string &where) {
  if (!obj.is_object())
    return make_error(Errc::InvalidConfig, where + ": expected an object");
  for (const auto &item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      return make_error(Errc::InvalidConfig, where + ": unknown key '" + item.key() + "'");
  }
  return {};
}

template <typename T> Result<T> required(const json &obj, const char *key, const std::string &where) {
  auto it = obj.find(key);
  if (it == obj.end())
    return make_error(Errc::InvalidConfig, where + ": missing '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception &e) {
    return make_error(Errc::InvalidConfig, where + ": bad '" + key + "': " + e.what());
  }
}

template <typename T> Result<T> optional(const json &obj, const char *key, T fallback,
                                         const std::string &where) {
  if (!obj.contains(key))
    return fallback;
  return required<T>(obj, key, where);
}

#define TPC_ASSIGN(lhs, expr)                                                                \
  do {                                                                                     \
    auto r__ = (expr);                                                                     \
    if (!r__)                                                                              \
      return r__.error();                                                                  \
    lhs = std::move(*r__);                                                                 \
  } while (0)

Result<PlatformModel> parse_model(const json &j) {
  std::string where = "platform";
  if (j.is_object() && j.contains("name") && j["name"].is_string())
    where = "platform '" + j["name"].get<std::string>() + "'";
  if (auto r = check_keys(j,
                          {"name", "device_memory_size", "fabric_clock_mhz", "slot_budget",
                           "register_space_bytes", "transfer", "interrupt", "estimates", "note"},
                          where);
      !r)
    return r.error();

  PlatformModel m;
  TPC_ASSIGN(m.name, required<std::string>(j, "name", where));
  TPC_ASSIGN(m.device_memory_size, required<std::uint64_t>(j, "device_memory_size", where));
  TPC_ASSIGN(m.fabric_clock_mhz, required<double>(j, "fabric_clock_mhz", where));
  TPC_ASSIGN(m.slot_budget, required<std::uint32_t>(j, "slot_budget", where));
  TPC_ASSIGN(m.register_space_bytes,
             optional<std::uint64_t>(j, "register_space_bytes", m.register_space_bytes, where));
  TPC_ASSIGN(m.estimates,
             optional<std::vector<std::string>>(j, "estimates", {}, where));

  json tj;
  TPC_ASSIGN(tj, required<json>(j, "transfer", where));
  const std::string twhere = where + " transfer";
  if (auto r = check_keys(tj, {"setup_overhead_us", "bandwidth_mib_s",
                               "dma_alloc_penalty_us_per_mib", "per_chunk"},
                          twhere);
      !r)
    return r.error();
  TPC_ASSIGN(m.transfer.setup_overhead_us, required<double>(tj, "setup_overhead_us", twhere));
  TPC_ASSIGN(m.transfer.bandwidth_mib_s, required<double>(tj, "bandwidth_mib_s", twhere));
  TPC_ASSIGN(m.transfer.dma_alloc_penalty_us_per_mib,
             optional<double>(tj, "dma_alloc_penalty_us_per_mib", 0.0, twhere));
  if (tj.contains("per_chunk")) {
    const json &pc = tj["per_chunk"];
    if (!pc.is_array())
      return make_error(Errc::InvalidConfig, twhere + ": per_chunk must be an array");
    for (const json &row : pc) {
      if (auto r = check_keys(row, {"chunk_bytes", "mib_s"}, twhere + " per_chunk"); !r)
        return r.error();
      std::uint64_t bytes = 0;
      double rate = 0;
      TPC_ASSIGN(bytes, required<std::uint64_t>(row, "chunk_bytes", twhere));
      TPC_ASSIGN(rate, required<double>(row, "mib_s", twhere));
      m.transfer.per_chunk[bytes] = rate;
    }
  }

  json ij;
  TPC_ASSIGN(ij, required<json>(j, "interrupt", where));
  const std::string iwhere = where + " interrupt";
  if (auto r = check_keys(ij, {"latency_min_us", "latency_avg_us", "latency_max_us",
                               "wakeup_penalty_us", "spin_threshold_us"},
                          iwhere);
      !r)
    return r.error();
  TPC_ASSIGN(m.interrupt.latency_min_us, required<double>(ij, "latency_min_us", iwhere));
  TPC_ASSIGN(m.interrupt.latency_avg_us, required<double>(ij, "latency_avg_us", iwhere));
  TPC_ASSIGN(m.interrupt.latency_max_us, required<double>(ij, "latency_max_us", iwhere));
  TPC_ASSIGN(m.interrupt.wakeup_penalty_us,
             optional<double>(ij, "wakeup_penalty_us", 0.0, iwhere));
  TPC_ASSIGN(m.interrupt.spin_threshold_us,
             optional<double>(ij, "spin_threshold_us", 10.0, iwhere));

  if (auto r = m.validate(); !r)
    return r.error();
  return m;
}

#undef TPC_ASSIGN

} // namespace

Result<void> PlatformRegistry::add(PlatformModel model) {
  if (auto r = model.validate(); !r)
    return r;
  if (find(model.name))
    return make_error(Errc::InvalidConfig, "duplicate platform '" + model.name + "'");
  models_.push_back(std::move(model));
  return {};
}

const PlatformModel *PlatformRegistry::find(std::string_view name) const {
  for (const auto &m : models_)
    if (m.name == name)
      return &m;
  return nullptr;
}

Result<PlatformRegistry> PlatformRegistry::parse(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error &e) {
    return make_error(Errc::InvalidConfig, std::string("registry: ") + e.what());
  }
  if (auto r = check_keys(doc, {"platforms"}, "registry"); !r)
    return r.error();
  PlatformRegistry reg;
  if (!doc.contains("platforms"))
    return reg;
  if (!doc["platforms"].is_array())
    return make_error(Errc::InvalidConfig, "registry: 'platforms' must be an array");
  for (const json &entry : doc["platforms"]) {
    auto m = parse_model(entry);
    if (!m)
      return m.error();
    if (auto r = reg.add(std::move(*m)); !r)
      return r.error();
  }
  return reg;
}

Result<PlatformRegistry> PlatformRegistry::load(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    return make_error(Errc::IoError, "cannot read platform registry " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

// ---------------------------------------------------------------------------
// register file

Result<std::size_t> RegisterFile::index(std::uint64_t offset) const {
  if (offset % 8 != 0)
    return make_error(Errc::UnalignedAccess, "register offset " + std::to_string(offset));
  if (offset / 8 >= regs_.size())
    return make_error(Errc::OffsetOutOfRange, "register offset " + std::to_string(offset));
  return static_cast<std::size_t>(offset / 8);
}

Result<std::uint64_t> RegisterFile::read(std::uint64_t offset) const {
  auto i = index(offset);
  if (!i)
    return i.error();
  std::lock_guard lock(mu_);
  return regs_[*i];
}

Result<void> RegisterFile::write(std::uint64_t offset, std::uint64_t value) {
  auto i = index(offset);
  if (!i)
    return i.error();
  std::lock_guard lock(mu_);
  regs_[*i] = value;
  return {};
}

// ---------------------------------------------------------------------------
// platform

namespace {

std::piecewise_linear_distribution<double> make_latency_distribution(const InterruptModel &m) {
  const double lo = m.latency_min_us, hi = m.latency_max_us;
  if (!(hi > lo)) {
    // degenerate envelope: a constant; the distribution needs a non-empty range
    const std::array<double, 2> b{lo, lo + 1e-12};
    const std::array<double, 2> w{1.0, 1.0};
    return {b.begin(), b.end(), w.begin()};
  }
  const double mode = std::clamp(m.mode_us(), lo, hi);
  if (mode <= lo) {
    const std::array<double, 2> b{lo, hi};
    const std::array<double, 2> w{1.0, 0.0};
    return {b.begin(), b.end(), w.begin()};
  }
  if (mode >= hi) {
    const std::array<double, 2> b{lo, hi};
    const std::array<double, 2> w{0.0, 1.0};
    return {b.begin(), b.end(), w.begin()};
  }
  const std::array<double, 3> b{lo, mode, hi};
  const std::array<double, 3> w{0.0, 1.0, 0.0};
  return {b.begin(), b.end(), w.begin()};
}

} // namespace

Platform::Platform(PlatformModel model, std::uint64_t seed)
    : model_(std::move(model)), memory_(model_.device_memory_size),
      registers_(model_.register_space_bytes), manager_(model_.device_memory_size),
      seed_(seed), latency_dist_(make_latency_distribution(model_.interrupt)) {
  configure_pes(0);
}

Result<std::shared_ptr<Platform>> Platform::open(std::string_view name,
                                                 const PlatformRegistry &registry,
                                                 std::uint64_t seed) {
  const PlatformModel *m = registry.find(name);
  if (!m)
    return make_error(Errc::UnknownPlatform, "no platform named '" + std::string(name) + "'");
  return std::make_shared<Platform>(*m, seed);
}

Result<std::uint64_t> Platform::mem_alloc(std::uint64_t size) {
  std::lock_guard lock(mem_mu_);
  return manager_.allocate(size);
}

Result<void> Platform::mem_free(std::uint64_t address) {
  std::lock_guard lock(mem_mu_);
  return manager_.release(address);
}

std::optional<Region> Platform::mem_region(std::uint64_t address) const {
  std::lock_guard lock(mem_mu_);
  return manager_.find(address);
}

std::uint64_t Platform::mem_free_bytes() const {
  std::lock_guard lock(mem_mu_);
  return manager_.free_bytes();
}

Result<void> Platform::check_range(std::uint64_t address, std::uint64_t size) const {
  const std::uint64_t cap = memory_.size();
  if (address > cap || size > cap - address)
    return make_error(Errc::OffsetOutOfRange, "device range [" + std::to_string(address) +
                                                  ", +" + std::to_string(size) +
                                                  ") outside device memory");
  return {};
}

TransferReport Platform::schedule_dma(std::uint64_t bytes) {
  std::lock_guard lock(dma_mu_);
  TransferReport r;
  r.bytes = bytes;
  r.start = std::max(clock_.now(), dma_free_at_);
  r.finish = r.start + model_.transfer.duration(bytes);
  dma_free_at_ = r.finish;
  return r;
}

Result<TransferReport> Platform::dma_to_device(std::span<const std::byte> host,
                                               std::uint64_t address) {
  if (auto r = check_range(address, host.size()); !r)
    return r.error();
  memory_.write(address, host);
  return schedule_dma(host.size());
}

Result<TransferReport> Platform::dma_from_device(std::uint64_t address,
                                                 std::span<std::byte> host) {
  if (auto r = check_range(address, host.size()); !r)
    return r.error();
  memory_.read(address, host);
  return schedule_dma(host.size());
}

Result<std::uint64_t> Platform::read_reg(std::uint64_t offset) const {
  return registers_.read(offset);
}

Result<void> Platform::write_reg(std::uint64_t offset, std::uint64_t value) {
  if (auto r = registers_.write(offset, value); !r)
    return r;
  RegisterObserver observer;
  {
    std::lock_guard lock(observer_mu_);
    observer = reg_observer_;
  }
  if (observer)
    observer(offset, value);
  return {};
}

void Platform::set_register_observer(RegisterObserver observer) {
  std::lock_guard lock(observer_mu_);
  reg_observer_ = std::move(observer);
}

void Platform::set_ack_observer(AckObserver observer) {
  std::lock_guard lock(observer_mu_);
  ack_observer_ = std::move(observer);
}

void Platform::reset_samplers() {
  samplers_.clear();
  samplers_.reserve(last_raise_.size());
  for (std::uint32_t pe = 0; pe < last_raise_.size(); ++pe) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                      pe};
    samplers_.emplace_back(seq);
  }
}

void Platform::configure_pes(std::uint32_t count) {
  std::lock_guard lock(irq_mu_);
  events_.clear();
  outstanding_.clear();
  last_raise_.assign(count, SimTime{});
  reset_samplers();
}

std::uint32_t Platform::pe_count() const {
  std::lock_guard lock(irq_mu_);
  return static_cast<std::uint32_t>(last_raise_.size());
}

void Platform::reseed(std::uint64_t seed) {
  std::lock_guard lock(irq_mu_);
  seed_ = seed;
  reset_samplers();
}

Result<CompletionEvent> Platform::raise_interrupt(std::uint32_t pe_index,
                                                  std::optional<SimTime> at) {
  CompletionEvent ev;
  {
    std::lock_guard lock(irq_mu_);
    if (pe_index >= last_raise_.size())
      return make_error(Errc::InvalidPE, "PE " + std::to_string(pe_index) +
                                             " not in the loaded design");
    const SimTime ts = std::max(at.value_or(clock_.now()), last_raise_[pe_index]);
    last_raise_[pe_index] = ts;
    ev = CompletionEvent{pe_index, ts, next_sequence_++};
    events_.push_back(ev);
    outstanding_.insert(ev.sequence);
  }
  irq_cv_.notify_one();
  return ev;
}

std::optional<CompletionEvent> Platform::await_event(std::stop_token stop) {
  std::unique_lock lock(irq_mu_);
  if (!irq_cv_.wait(lock, stop, [this] { return !events_.empty(); }))
    return std::nullopt;
  CompletionEvent ev = events_.front();
  events_.pop_front();
  return ev;
}

std::optional<CompletionEvent> Platform::poll_event() {
  std::lock_guard lock(irq_mu_);
  if (events_.empty())
    return std::nullopt;
  CompletionEvent ev = events_.front();
  events_.pop_front();
  return ev;
}

double Platform::sample_latency(std::uint32_t pe_index) {
  const auto &m = model_.interrupt;
  const double v = latency_dist_(samplers_[pe_index]);
  return std::clamp(v, m.latency_min_us, m.latency_max_us);
}

Result<InterruptMeasurement> Platform::ack_interrupt(const CompletionEvent &event,
                                                     WaitPath path) {
  InterruptMeasurement m;
  {
    std::lock_guard lock(irq_mu_);
    if (outstanding_.erase(event.sequence) == 0)
      return make_error(Errc::AckWithoutRaise,
                        "no outstanding interrupt #" + std::to_string(event.sequence));
    m.pe_index = event.pe_index;
    m.raised_at = event.modeled_timestamp;
    m.path = path;
    m.round_trip_us = sample_latency(event.pe_index);
    if (path == WaitPath::Sleep)
      m.round_trip_us += model_.interrupt.wakeup_penalty_us;
    m.counted_cycles =
        static_cast<std::uint64_t>(std::llround(m.round_trip_us * model_.fabric_clock_mhz));
  }
  AckObserver observer;
  {
    std::lock_guard lock(observer_mu_);
    observer = ack_observer_;
  }
  if (observer)
    observer(event.pe_index);
  return m;
}

} // namespace tpc
