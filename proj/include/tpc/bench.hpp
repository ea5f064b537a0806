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
 * @file bench.hpp
 * @brief Transfer throughput and interrupt latency micro-benchmarks. Every
 *        figure is derived from modeled time, never from the wall clock.
 */
#ifndef TPC_BENCH_HPP__
#define TPC_BENCH_HPP__

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <tpc/result.hpp>
#include <tpc/tpc_api.hpp>

namespace tpc {

enum class BenchDirection { ToDevice, FromDevice, Bidirectional };
std::string_view to_string(BenchDirection d);

struct ThroughputRow {
  std::string platform;
  std::uint64_t chunk_size = 0;
  BenchDirection direction = BenchDirection::ToDevice;
  double rate_mib_s = 0.0;
  std::uint32_t repetitions = 0;
};

/// 4 KiB to 1 MiB in powers of two.
std::vector<std::uint64_t> default_chunk_sizes();

/// Bidirectional pairs one transfer each way on the single DMA engine, so its
/// rate is both directions' bytes over their summed durations.
Result<std::vector<ThroughputRow>> run_throughput(Device &device,
                                                  std::span<const std::uint64_t> chunk_sizes,
                                                  std::uint32_t repetitions = 4);

enum class RuntimeClass { UpTo10us, Over10us };
std::string_view to_string(RuntimeClass c);

struct LatencyReport {
  std::string platform;
  std::uint32_t samples = 0;
  double min_us = 0.0;
  double avg_us = 0.0;
  double max_us = 0.0;
  RuntimeClass runtime_class = RuntimeClass::UpTo10us;
  std::vector<double> sample_values;
};

/// Needs a resident design with a latency_probe PE. UpTo10us takes the spin
/// wait path, Over10us the sleep path.
Result<LatencyReport> run_latency(Device &device, std::uint32_t samples,
                                  RuntimeClass runtime_class = RuntimeClass::UpTo10us);

std::string throughput_csv(std::span<const ThroughputRow> rows);
std::string latency_csv(std::span<const LatencyReport> reports);
Result<void> write_csv(const std::filesystem::path &path, std::string_view csv);

} // namespace tpc

#endif /* TPC_BENCH_HPP__ */
