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
 * @file cli.hpp
 * @brief The `tpc` command-line front end as a library, so every command can
 *        be driven from tests with captured streams.
 *
 * Exit codes: 0 ok, 2 usage / I-O / parse error, 3 validation failure,
 * 4 kernel fault, 5 device busy.
 */
#ifndef TPC_TOOLS_CLI_HPP__
#define TPC_TOOLS_CLI_HPP__

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <tpc/bench.hpp>
#include <tpc/result.hpp>
#include <tpc/tpc_api.hpp>

namespace tpc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitKernelFault = 4;
inline constexpr int kExitDeviceBusy = 5;

inline constexpr const char *kRegistryEnv = "TPC_REGISTRY";

int exit_code(Errc code);

/// --registry if given, else $TPC_REGISTRY, else the compiled-in default.
std::filesystem::path resolve_registry(const std::optional<std::string> &flag);

int cmd_enumerate(const std::filesystem::path &registry, std::ostream &out, std::ostream &err);

int cmd_compose(const std::filesystem::path &registry, const std::filesystem::path &composition,
                const std::string &platform, const std::filesystem::path &output,
                std::ostream &out, std::ostream &err);

struct RunOptions {
  std::filesystem::path design;
  std::uint32_t device = 0;
  KernelId kernel = 0;
  /// Scalar slots, in order.
  std::vector<std::int64_t> args;
  /// Handle slots, in order: file:PATH, iota32:N (int32 1..N) or zeros:BYTES.
  std::vector<std::string> buffers;
  bool nonblocking = false;
  std::uint64_t seed = 0;
};

int cmd_run(const std::filesystem::path &registry, const RunOptions &options, std::ostream &out,
            std::ostream &err);

struct BenchOptions {
  std::string kind; ///< "throughput" or "latency"
  std::uint32_t device = 0;
  std::uint64_t seed = 0;
  /// Empty writes the CSV to stdout.
  std::filesystem::path output;
  std::optional<std::filesystem::path> design;
  std::uint32_t samples = 1000;
  std::uint32_t repetitions = 4;
  RuntimeClass runtime_class = RuntimeClass::UpTo10us;
};

int cmd_bench(const std::filesystem::path &registry, const BenchOptions &options,
              std::ostream &out, std::ostream &err);
/// cmd_bench against an already open device.
int bench_device(Device &device, const BenchOptions &options, std::ostream &out,
                 std::ostream &err);

/// Parses `args` (without the program name) and runs the chosen command.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace tpc::cli

#endif /* TPC_TOOLS_CLI_HPP__ */
