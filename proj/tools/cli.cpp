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
#include "cli.hpp"

#include <cstdlib>
#include <cstring>
#include <algorithm>
#include <charconv>

#include <CLI11.hpp>

#include <tpc/composer.hpp>

#ifndef TPC_DEFAULT_REGISTRY
#define TPC_DEFAULT_REGISTRY "config/platforms.json"
#endif

namespace tpc::cli {

int exit_code(Errc code) {
  switch (code) {
  case Errc::ValidationFailed:
  case Errc::SlotBudgetExceeded:
  case Errc::RegisterSpaceExceeded:
    return kExitValidation;
  case Errc::KernelFault:
    return kExitKernelFault;
  case Errc::DeviceBusy:
    return kExitDeviceBusy;
  default:
    return kExitUsage;
  }
}

std::filesystem::path resolve_registry(const std::optional<std::string> &flag) {
  if (flag)
    return *flag;
  if (const char *env = std::getenv(kRegistryEnv); env && *env)
    return env;
  return TPC_DEFAULT_REGISTRY;
}

namespace {

int fail(std::ostream &err, const Error &e) {
  err << "tpc: " << e.describe() << "\n";
  return exit_code(e.code);
}

Result<PlatformRegistry> open_registry(const std::filesystem::path &path) {
  return PlatformRegistry::load(path);
}

template <typename T> std::optional<T> parse_number(std::string_view s) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    return std::nullopt;
  return v;
}

Result<std::vector<std::byte>> make_buffer(const std::string &spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    return make_error(Errc::InvalidArgument, "buffer spec '" + spec + "' has no kind");
  const std::string kind = spec.substr(0, colon);
  const std::string value = spec.substr(colon + 1);
  if (kind == "file") {
    auto text = read_text_file(value);
    if (!text)
      return text.error();
    std::vector<std::byte> out(text->size());
    std::memcpy(out.data(), text->data(), text->size());
    return out;
  }
  auto n = parse_number<std::uint64_t>(value);
  if (!n || *n == 0)
    return make_error(Errc::InvalidArgument, "buffer spec '" + spec + "' needs a positive count");
  if (kind == "zeros")
    return std::vector<std::byte>(*n);
  if (kind == "iota32") {
    std::vector<std::byte> out(*n * 4);
    for (std::uint64_t i = 0; i < *n; ++i) {
      const auto v = static_cast<std::int32_t>(i + 1);
      std::memcpy(out.data() + 4 * i, &v, 4);
    }
    return out;
  }
  return make_error(Errc::InvalidArgument, "unknown buffer kind '" + kind + "'");
}

std::int64_t sign_extend(const std::vector<std::byte> &bytes) {
  std::uint64_t raw = 0;
  std::memcpy(&raw, bytes.data(), std::min<std::size_t>(bytes.size(), 8));
  const std::size_t bits = bytes.size() * 8;
  if (bits < 64 && bits > 0 && (raw >> (bits - 1)) & 1)
    raw |= ~0ull << bits;
  return static_cast<std::int64_t>(raw);
}

} // namespace

int cmd_enumerate(const std::filesystem::path &registry, std::ostream &out, std::ostream &err) {
  auto reg = open_registry(registry);
  if (!reg)
    return fail(err, reg.error());
  for (const auto &d : enumerate_devices(*reg))
    out << d.device_id << " " << d.platform_name << " " << d.device_memory_size << "\n";
  return kExitOk;
}

int cmd_compose(const std::filesystem::path &registry, const std::filesystem::path &composition,
                const std::string &platform, const std::filesystem::path &output,
                std::ostream &out, std::ostream &err) {
  auto reg = open_registry(registry);
  if (!reg)
    return fail(err, reg.error());
  const PlatformModel *pm = reg->find(platform);
  if (!pm)
    return fail(err, make_error(Errc::UnknownPlatform, platform));
  auto text = read_text_file(composition);
  if (!text)
    return fail(err, text.error());
  auto comp = parse_composition(*text);
  if (!comp)
    return fail(err, comp.error());
  const KernelRegistry kernels = builtin_kernels();
  const ValidationReport report = validate(*comp, *pm, kernels);
  if (!report.ok()) {
    err << "tpc: composition rejected for " << platform << "\n" << report.to_string();
    return kExitValidation;
  }
  auto design = compose(*comp, *pm, kernels);
  if (!design)
    return fail(err, design.error());
  if (auto w = write_text_file(output, serialize_design(*design)); !w)
    return fail(err, w.error());
  out << "wrote " << output.string() << " (" << design->pe_table.size() << " PEs)\n";
  return kExitOk;
}

int cmd_run(const std::filesystem::path &registry, const RunOptions &o, std::ostream &out,
            std::ostream &err) {
  auto reg = open_registry(registry);
  if (!reg)
    return fail(err, reg.error());
  auto text = read_text_file(o.design);
  if (!text)
    return fail(err, text.error());
  auto design = parse_design(*text);
  if (!design)
    return fail(err, design.error());
  auto dev = Device::open(*reg, o.device, nullptr, o.seed);
  if (!dev)
    return fail(err, dev.error());
  Device &d = **dev;
  if (auto r = d.load_design(*design); !r)
    return fail(err, r.error());

  auto job = d.acquire_job_id(o.kernel);
  if (!job)
    return fail(err, job.error());
  const KernelSpec &spec = *d.kernels().find(o.kernel);
  const LaunchMode mode = o.nonblocking ? LaunchMode::NonBlocking : LaunchMode::Blocking;

  std::size_t next_scalar = 0, next_buffer = 0;
  for (std::uint32_t i = 0; i < spec.arity(); ++i) {
    const ArgSpec &as = spec.args[i];
    if (as.kind == ArgKind::Handle) {
      if (next_buffer >= o.buffers.size())
        return fail(err, make_error(Errc::MissingArguments,
                                    "argument " + std::to_string(i) + " needs a --buffer"));
      auto bytes = make_buffer(o.buffers[next_buffer++]);
      if (!bytes)
        return fail(err, bytes.error());
      auto h = d.alloc(bytes->size());
      if (!h)
        return fail(err, h.error());
      auto copy = d.copy_to(*bytes, *h, bytes->size(), mode);
      if (!copy)
        return fail(err, copy.error());
      if (copy->token)
        if (auto w = d.transfer_wait(*copy->token); !w)
          return fail(err, w.error());
      if (auto r = d.set_arg(*job, i, *h); !r)
        return fail(err, r.error());
    } else {
      if (next_scalar >= o.args.size())
        return fail(err, make_error(Errc::MissingArguments,
                                    "argument " + std::to_string(i) + " needs an --arg"));
      const auto v = static_cast<std::uint64_t>(o.args[next_scalar++]);
      std::vector<std::byte> payload(as.width);
      std::memcpy(payload.data(), &v, as.width);
      if (auto r = d.set_arg(*job, i, payload); !r)
        return fail(err, r.error());
    }
  }
  if (next_scalar != o.args.size() || next_buffer != o.buffers.size())
    return fail(err, make_error(Errc::ArgIndexOutOfRange,
                                "kernel " + spec.name + " takes " + std::to_string(spec.arity()) +
                                    " argument(s)"));

  if (auto r = d.launch(*job, mode); !r)
    return fail(err, r.error());
  if (auto r = d.wait(*job); !r)
    return fail(err, r.error());
  auto ret = d.get_return(*job, spec.return_width);
  if (!ret)
    return fail(err, ret.error());
  out << "result of job: " << sign_extend(*ret) << "\n";
  (void)d.release_job_id(*job);
  return kExitOk;
}

int bench_device(Device &device, const BenchOptions &o, std::ostream &out, std::ostream &err) {
  std::string csv;
  if (o.kind == "throughput") {
    const auto chunks = default_chunk_sizes();
    auto rows = run_throughput(device, chunks, o.repetitions);
    if (!rows)
      return fail(err, rows.error());
    csv = throughput_csv(*rows);
  } else if (o.kind == "latency") {
    if (device.in_flight() > 0)
      return fail(err, make_error(Errc::DeviceBusy, "jobs are in flight"));
    if (o.design) {
      auto text = read_text_file(*o.design);
      if (!text)
        return fail(err, text.error());
      auto design = parse_design(*text);
      if (!design)
        return fail(err, design.error());
      if (auto r = device.load_design(*design); !r)
        return fail(err, r.error());
    } else if (!device.design()) {
      Composition probe;
      probe.entries.push_back({kernel_ids::latency_probe, "latency_probe", 1});
      if (auto r = device.load_composition(probe); !r)
        return fail(err, r.error());
    }
    auto report = run_latency(device, o.samples, o.runtime_class);
    if (!report)
      return fail(err, report.error());
    csv = latency_csv(std::span<const LatencyReport>(&*report, 1));
  } else {
    return fail(err, make_error(Errc::InvalidArgument, "unknown benchmark '" + o.kind + "'"));
  }
  if (o.output.empty()) {
    out << csv;
    return kExitOk;
  }
  if (auto w = write_csv(o.output, csv); !w)
    return fail(err, w.error());
  return kExitOk;
}

int cmd_bench(const std::filesystem::path &registry, const BenchOptions &o, std::ostream &out,
              std::ostream &err) {
  auto reg = open_registry(registry);
  if (!reg)
    return fail(err, reg.error());
  auto dev = Device::open(*reg, o.device, nullptr, o.seed);
  if (!dev)
    return fail(err, dev.error());
  return bench_device(**dev, o, out, err);
}

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Simulated FPGA accelerator runtime", "tpc"};
  app.require_subcommand(1);
  std::optional<std::string> registry_flag;
  app.add_option("--registry", registry_flag, "platform registry file");

  auto *enumerate = app.add_subcommand("enumerate", "list devices");

  auto *compose_cmd = app.add_subcommand("compose", "compose a design");
  std::string comp_file, platform, comp_out;
  compose_cmd->add_option("-f,--file", comp_file, "composition JSON")->required();
  compose_cmd->add_option("-p,--platform", platform, "target platform")->required();
  compose_cmd->add_option("-o,--output", comp_out, "design output path")->required();

  auto *run = app.add_subcommand("run", "run one job");
  RunOptions ro;
  std::string design_path;
  run->add_option("design", design_path, "design JSON")->required();
  run->add_option("--device", ro.device, "device id");
  run->add_option("--kernel", ro.kernel, "kernel id")->required();
  run->add_option("--arg", ro.args, "scalar argument (repeatable)");
  run->add_option("--buffer", ro.buffers, "handle argument: file:PATH, iota32:N, zeros:BYTES");
  run->add_flag("--nonblocking", ro.nonblocking, "use non-blocking transfers and launch");
  run->add_option("--seed", ro.seed, "latency model seed");

  auto *bench = app.add_subcommand("bench", "run a micro-benchmark");
  BenchOptions bo;
  std::string bench_out, bench_design, klass = "le_10us";
  bench->add_option("kind", bo.kind, "throughput or latency")
      ->required()
      ->check(CLI::IsMember({"throughput", "latency"}));
  bench->add_option("--device", bo.device, "device id");
  bench->add_option("--seed", bo.seed, "latency model seed");
  bench->add_option("-o,--output", bench_out, "CSV output path (stdout if omitted)");
  bench->add_option("--design", bench_design, "design to load for latency");
  bench->add_option("--samples", bo.samples, "latency samples")->check(CLI::PositiveNumber);
  bench->add_option("--repetitions", bo.repetitions, "transfers per chunk size")
      ->check(CLI::PositiveNumber);
  bench->add_option("--class", klass, "kernel runtime class")
      ->check(CLI::IsMember({"le_10us", "gt_10us"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const auto registry = resolve_registry(registry_flag);
  if (enumerate->parsed())
    return cmd_enumerate(registry, out, err);
  if (compose_cmd->parsed())
    return cmd_compose(registry, comp_file, platform, comp_out, out, err);
  if (run->parsed()) {
    ro.design = design_path;
    return cmd_run(registry, ro, out, err);
  }
  bo.output = bench_out;
  if (!bench_design.empty())
    bo.design = bench_design;
  bo.runtime_class = klass == "gt_10us" ? RuntimeClass::Over10us : RuntimeClass::UpTo10us;
  return cmd_bench(registry, bo, out, err);
}

} // namespace tpc::cli
