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
#include <tpc/bench.hpp>

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace tpc {

std::string_view to_string(BenchDirection d) {
  switch (d) {
  case BenchDirection::ToDevice:
    return "to_device";
  case BenchDirection::FromDevice:
    return "from_device";
  case BenchDirection::Bidirectional:
    return "bidirectional";
  }
  return "?";
}

std::string_view to_string(RuntimeClass c) {
  return c == RuntimeClass::UpTo10us ? "le_10us" : "gt_10us";
}

std::vector<std::uint64_t> default_chunk_sizes() {
  std::vector<std::uint64_t> out;
  for (std::uint64_t s = 4096; s <= 1024 * 1024; s *= 2)
    out.push_back(s);
  return out;
}

namespace {

double rate(std::uint64_t bytes, SimTime total) {
  return static_cast<double>(bytes) / kMiB / (total.us() / 1e6);
}

} // namespace

Result<std::vector<ThroughputRow>> run_throughput(Device &device,
                                                  std::span<const std::uint64_t> chunk_sizes,
                                                  std::uint32_t repetitions) {
  if (device.in_flight() > 0)
    return make_error(Errc::DeviceBusy, "jobs are in flight on device " +
                                            std::to_string(device.id()));
  if (chunk_sizes.empty() || repetitions == 0)
    return make_error(Errc::InvalidArgument, "no chunk sizes or repetitions");
  if (std::find(chunk_sizes.begin(), chunk_sizes.end(), 0) != chunk_sizes.end())
    return make_error(Errc::InvalidArgument, "chunk size 0");

  std::vector<ThroughputRow> rows;
  const std::string &name = device.platform().name();
  for (std::uint64_t chunk : chunk_sizes) {
    auto h = device.alloc(chunk);
    if (!h)
      return h.error();
    std::vector<std::byte> payload(chunk);
    for (std::size_t i = 0; i < payload.size(); ++i)
      payload[i] = static_cast<std::byte>(i * 131u + 7u);

    SimTime to{}, from{};
    for (std::uint32_t r = 0; r < repetitions; ++r) {
      auto w = device.copy_to(payload, *h, chunk);
      if (!w) {
        (void)device.free(*h);
        return w.error();
      }
      to += w->duration();
      auto rd = device.copy_from(*h, chunk);
      if (!rd) {
        (void)device.free(*h);
        return rd.error();
      }
      from += rd->report.duration();
    }
    (void)device.free(*h);

    const std::uint64_t total = chunk * repetitions;
    rows.push_back({name, chunk, BenchDirection::ToDevice, rate(total, to), repetitions});
    rows.push_back({name, chunk, BenchDirection::FromDevice, rate(total, from), repetitions});
    rows.push_back(
        {name, chunk, BenchDirection::Bidirectional, rate(2 * total, to + from), repetitions});
  }
  return rows;
}

Result<LatencyReport> run_latency(Device &device, std::uint32_t samples,
                                  RuntimeClass runtime_class) {
  if (samples == 0)
    return make_error(Errc::InvalidArgument, "zero samples");
  if (device.in_flight() > 0)
    return make_error(Errc::DeviceBusy, "jobs are in flight on device " +
                                            std::to_string(device.id()));
  if (!device.design())
    return make_error(Errc::UnknownKernel, "no design with latency_probe is loaded");
  LatencyReport report;
  report.platform = device.platform().name();
  report.runtime_class = runtime_class;
  report.sample_values.reserve(samples);

  device.set_wait_path(runtime_class == RuntimeClass::UpTo10us ? WaitPath::Spin
                                                                : WaitPath::Sleep);
  for (std::uint32_t i = 0; i < samples; ++i) {
    auto j = device.acquire_job_id(kernel_ids::latency_probe);
    if (!j) {
      device.set_wait_path(std::nullopt);
      return j.error();
    }
    auto launched = device.launch(*j);
    auto info = device.job_info(*j);
    (void)device.release_job_id(*j);
    if (!launched) {
      device.set_wait_path(std::nullopt);
      return launched.error();
    }
    if (!info || !info->interrupt) {
      device.set_wait_path(std::nullopt);
      return make_error(Errc::InvalidJobState, "probe completed without an interrupt record");
    }
    report.sample_values.push_back(info->interrupt->round_trip_us);
  }
  device.set_wait_path(std::nullopt);

  const auto &v = report.sample_values;
  report.samples = samples;
  report.min_us = *std::min_element(v.begin(), v.end());
  report.max_us = *std::max_element(v.begin(), v.end());
  report.avg_us = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return report;
}

namespace {

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

} // namespace

std::string throughput_csv(std::span<const ThroughputRow> rows) {
  std::string out = "platform,chunk_size_bytes,direction,rate_mib_s,repetitions\n";
  for (const auto &r : rows) {
    out += r.platform + "," + std::to_string(r.chunk_size) + "," +
           std::string(to_string(r.direction)) + "," + fixed3(r.rate_mib_s) + "," +
           std::to_string(r.repetitions) + "\n";
  }
  return out;
}

std::string latency_csv(std::span<const LatencyReport> reports) {
  std::string out = "platform,samples,min_us,avg_us,max_us,runtime_class\n";
  for (const auto &r : reports) {
    out += r.platform + "," + std::to_string(r.samples) + "," + fixed3(r.min_us) + "," +
           fixed3(r.avg_us) + "," + fixed3(r.max_us) + "," +
           std::string(to_string(r.runtime_class)) + "\n";
  }
  return out;
}

Result<void> write_csv(const std::filesystem::path &path, std::string_view csv) {
  return write_text_file(path, csv);
}

} // namespace tpc
