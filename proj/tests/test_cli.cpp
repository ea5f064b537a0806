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
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <tpc/composer.hpp>

#include "cli.hpp"
#include "support.hpp"

using namespace tpc;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args, bool with_registry = true) {
  if (with_registry)
    args.insert(args.begin(), {"--registry", test::registry_path()});
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp(const std::string &name) {
  const auto dir = fs::temp_directory_path() / "tpc_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string write(const std::string &name, const std::string &text) {
  const auto p = temp(name);
  REQUIRE(write_text_file(p, text));
  return p.string();
}

std::string composition_file(KernelId id, std::uint32_t count) {
  return write("comp_" + std::to_string(id) + "_" + std::to_string(count) + ".json",
               R"({"architecture":"flat","kernels":[{"id":)" + std::to_string(id) +
                   R"(,"name":"k","count":)" + std::to_string(count) + "}]}");
}

std::string design_for(const std::string &platform, KernelId id, std::uint32_t count = 1) {
  const std::string out = temp("design_" + platform + "_" + std::to_string(id) + ".json").string();
  auto r = invoke({"compose", "-f", composition_file(id, count), "-p", platform, "-o", out});
  REQUIRE(r.code == 0);
  return out;
}

std::size_t count_lines(const std::string &s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

} // namespace

TEST_SUITE("cli") {
  TEST_CASE("exit code mapping") {
    CHECK(cli::exit_code(Errc::ValidationFailed) == 3);
    CHECK(cli::exit_code(Errc::KernelFault) == 4);
    CHECK(cli::exit_code(Errc::DeviceBusy) == 5);
    CHECK(cli::exit_code(Errc::IoError) == 2);
    CHECK(cli::exit_code(Errc::UnknownKernel) == 2);
  }

  TEST_CASE("enumerate") {
    auto r = invoke({"enumerate"});
    CHECK(r.code == 0);
    CHECK(r.out == "0 zedboard 536870912\n1 zc706 1073741824\n2 vc709 4294967296\n");
    auto empty = invoke({"--registry", write("empty.json", R"({"platforms":[]})"), "enumerate"}, false);
    CHECK(empty.code == 0);
    CHECK(empty.out.empty());
    auto missing = invoke({"--registry", "/nonexistent/registry.json", "enumerate"}, false);
    CHECK(missing.code == 2);
    CHECK_FALSE(missing.err.empty());
    CHECK(missing.out.empty());
  }

  TEST_CASE("registry precedence: flag, then environment, then default") {
    const std::string empty = write("empty_env.json", R"({"platforms":[]})");
    ::setenv(cli::kRegistryEnv, empty.c_str(), 1);
    CHECK(cli::resolve_registry(std::nullopt) == fs::path(empty));
    CHECK(cli::resolve_registry(std::string("x.json")) == fs::path("x.json"));
    auto r = invoke({"enumerate"}, false);
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    ::unsetenv(cli::kRegistryEnv);
    CHECK(cli::resolve_registry(std::nullopt) == fs::path(TPC_TEST_REGISTRY));
  }

  TEST_CASE("usage errors and help") {
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"frobnicate"}).code == 2);
    CHECK(invoke({"bench", "sideways"}).code == 2);
    auto help = invoke({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("compose") != std::string::npos);
  }

  TEST_CASE("compose") {
    const std::string out = temp("design_ok.json").string();
    auto ok = invoke({"compose", "-f", composition_file(10, 4), "-p", "zedboard", "-o", out});
    CHECK(ok.code == 0);
    auto d = parse_design(read_text_file(out).value());
    REQUIRE(d);
    CHECK(d->pe_table.size() == 4);
    CHECK(d->platform_name == "zedboard");

    auto over = invoke({"compose", "-f", composition_file(10, 17), "-p", "zedboard", "-o",
                     temp("over.json").string()});
    CHECK(over.code == 3);
    CHECK(over.err.find("SlotBudgetExceeded") != std::string::npos);

    auto bad = invoke({"compose", "-f", write("bad.json", "{\n\"kernels\": [\n}\n"), "-p", "zedboard",
                    "-o", temp("bad_out.json").string()});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("line 3") != std::string::npos);

    CHECK(invoke({"compose", "-f", "/nonexistent.json", "-p", "zedboard", "-o", out}).code == 2);
    CHECK(invoke({"compose", "-f", composition_file(10, 1), "-p", "nonesuch", "-o", out}).code == 2);
  }

  TEST_CASE("run magic over a file buffer") {
    const std::string payload = "the quick brown fox";
    const std::string file = write("payload.bin", payload);
    std::vector<std::byte> bytes(payload.size());
    std::memcpy(bytes.data(), payload.data(), payload.size());
    const auto expected = static_cast<std::int32_t>(test::fnv1a32_oracle(bytes));
    for (bool nb : {false, true}) {
      std::vector<std::string> args{"run", design_for("zedboard", 10), "--device", "0",
                                    "--kernel", "10", "--buffer", "file:" + file};
      if (nb)
        args.push_back("--nonblocking");
      auto r = invoke(args);
      CHECK(r.code == 0);
      CHECK(r.out == "result of job: " + std::to_string(expected) + "\n");
    }
  }

  TEST_CASE("run arraysum over 1..100") {
    auto r = invoke({"run", design_for("vc709", 3), "--device", "2", "--kernel", "3", "--buffer",
                  "iota32:100", "--arg", "100"});
    CHECK(r.code == 0);
    CHECK(r.out == "result of job: " + std::to_string(100 * 101 / 2) + "\n");
  }

  TEST_CASE("run identity prints signed values") {
    auto r = invoke({"run", design_for("zc706", 1), "--device", "1", "--kernel", "1", "--arg", "-5"});
    CHECK(r.code == 0);
    CHECK(r.out == "result of job: -5\n");
  }

  TEST_CASE("run errors") {
    const std::string design = design_for("zedboard", 3);
    auto unknown = invoke({"run", design, "--kernel", "99"});
    CHECK(unknown.code == 2);
    CHECK(unknown.err.find("UnknownKernel") != std::string::npos);
    auto fault = invoke({"run", design, "--kernel", "3", "--buffer", "zeros:8", "--arg", "3"});
    CHECK(fault.code == 4);
    CHECK(invoke({"run", design, "--kernel", "3", "--arg", "3"}).code == 2);
    CHECK(invoke({"run", design, "--kernel", "3", "--buffer", "bogus:1", "--arg", "1"}).code == 2);
    CHECK(invoke({"run", design, "--kernel", "3", "--buffer", "zeros:8", "--arg", "1", "--arg", "2"})
              .code == 2);
    CHECK(invoke({"run", design, "--device", "2", "--kernel", "3"}).code == 2); // platform mismatch
    CHECK(invoke({"run", "/nonexistent.json", "--kernel", "3"}).code == 2);
  }

  TEST_CASE("bench latency is deterministic for a seed") {
    const std::string a = temp("lat_a.csv").string(), b = temp("lat_b.csv").string();
    REQUIRE(invoke({"bench", "latency", "--device", "0", "--seed", "7", "--samples", "300", "-o", a})
                .code == 0);
    REQUIRE(invoke({"bench", "latency", "--device", "0", "--seed", "7", "--samples", "300", "-o", b})
                .code == 0);
    const std::string ta = read_text_file(a).value();
    CHECK(ta == read_text_file(b).value());
    CHECK(count_lines(ta) == 2);
    CHECK(ta.rfind("platform,samples,min_us,avg_us,max_us,runtime_class\nzedboard,300,", 0) == 0);
  }

  TEST_CASE("bench latency with an explicit design and class") {
    auto r = invoke({"bench", "latency", "--device", "2", "--samples", "50", "--class", "gt_10us",
                  "--design", design_for("vc709", kernel_ids::latency_probe)});
    CHECK(r.code == 0);
    CHECK(r.out.find(",gt_10us\n") != std::string::npos);
    auto no_probe = invoke({"bench", "latency", "--device", "2", "--samples", "5", "--design",
                         design_for("vc709", kernel_ids::identity)});
    CHECK(no_probe.code == 2);
  }

  TEST_CASE("bench throughput on vc709 includes the 512 KiB row") {
    auto r = invoke({"bench", "throughput", "--device", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("vc709,524288,bidirectional,") != std::string::npos);
    CHECK(count_lines(r.out) == 1 + 3 * default_chunk_sizes().size());
    CHECK(invoke({"bench", "throughput", "-o", "/nonexistent-dir/x.csv"}).code == 2);
    CHECK(invoke({"bench", "throughput", "--device", "9"}).code == 2);
  }

  TEST_CASE("bench on a busy device exits 5") {
    auto gate = std::make_shared<test::Gate>();
    auto dev = test::open_device("zedboard", test::test_kernels(gate));
    REQUIRE(dev->load_composition(test::composition_of({{test::kGateKernel, 1}})));
    auto j = dev->acquire_job_id(test::kGateKernel).value();
    REQUIRE(dev->set_arg(j, 0, std::uint64_t{1}));
    REQUIRE(dev->launch(j, LaunchMode::NonBlocking));
    std::ostringstream out, err;
    cli::BenchOptions o;
    o.kind = "throughput";
    CHECK(cli::bench_device(*dev, o, out, err) == 5);
    o.kind = "latency";
    CHECK(cli::bench_device(*dev, o, out, err) == 5);
    gate->release();
    REQUIRE(dev->wait(j));
  }
}
