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
#include <tpc/kernels.hpp>

#include <algorithm>
#include <array>
#include <string>
#include <vector>

namespace tpc {

Result<void> KernelRegistry::register_kernel(KernelSpec spec) {
  if (kernels_.count(spec.id))
    return make_error(Errc::DuplicateKernel, "kernel id " + std::to_string(spec.id) +
                                                 " already registered");
  if (spec.cycles_estimate < 1)
    return make_error(Errc::InvalidArgument, "cycles_estimate must be >= 1");
  if (spec.return_width > 8)
    return make_error(Errc::InvalidArgument, "return width exceeds the 64-bit RETURN register");
  for (const auto &a : spec.args) {
    const bool ok = a.kind == ArgKind::Handle ? a.width == 8
                                              : (a.width >= 1 && a.width <= 8);
    if (!ok)
      return make_error(Errc::InvalidArgument, "bad argument width in kernel " + spec.name);
  }
  if (!spec.function)
    return make_error(Errc::InvalidArgument, "kernel " + spec.name + " has no function");
  const KernelId id = spec.id;
  kernels_.emplace(id, std::move(spec));
  return {};
}

const KernelSpec *KernelRegistry::find(KernelId id) const {
  auto it = kernels_.find(id);
  return it == kernels_.end() ? nullptr : &it->second;
}

Result<KernelSpec> KernelRegistry::lookup(KernelId id) const {
  if (const KernelSpec *k = find(id))
    return *k;
  return make_error(Errc::UnknownKernel, "kernel id " + std::to_string(id));
}

std::vector<KernelId> KernelRegistry::ids() const {
  std::vector<KernelId> out;
  for (const auto &kv : kernels_)
    out.push_back(kv.first);
  return out;
}

std::uint32_t fnv1a32(std::span<const std::byte> bytes) {
  std::uint32_t h = 2166136261u;
  for (std::byte b : bytes) {
    h ^= static_cast<std::uint8_t>(b);
    h *= 16777619u;
  }
  return h;
}

namespace {

Error fault(std::string what) { return make_error(Errc::KernelFault, std::move(what)); }

Result<std::uint64_t> identity(const KernelArgs &a) { return a.scalar(0); }

Result<std::uint64_t> memcpy_dev(const KernelArgs &a) {
  const DeviceView &src = a.view(0);
  DeviceView &dst = a.view(1);
  const std::uint64_t len = a.scalar(2);
  if (len > src.size() || len > dst.size())
    return fault("memcpy_dev: length exceeds a buffer");
  // bounded chunks keep host memory flat for large copies
  std::vector<std::byte> chunk(std::min<std::uint64_t>(len, 1 << 20));
  for (std::uint64_t off = 0; off < len; off += chunk.size()) {
    const auto n = static_cast<std::size_t>(std::min<std::uint64_t>(chunk.size(), len - off));
    std::span<std::byte> part(chunk.data(), n);
    src.read(off, part);
    dst.write(off, part);
  }
  return len;
}

Result<std::uint64_t> arraysum(const KernelArgs &a) {
  const DeviceView &buf = a.view(0);
  const std::uint64_t count = a.scalar(1);
  if (count > buf.size() / sizeof(std::int32_t))
    return fault("arraysum: count exceeds buffer");
  std::vector<std::int32_t> values(count);
  buf.read(0, std::as_writable_bytes(std::span(values)));
  std::int64_t sum = 0;
  for (std::int32_t v : values)
    sum += v;
  return static_cast<std::uint64_t>(sum);
}

Result<std::uint64_t> latency_probe(const KernelArgs &) { return 0; }

Result<std::uint64_t> magic(const KernelArgs &a) {
  const DeviceView &buf = a.view(0);
  std::vector<std::byte> bytes(buf.size());
  buf.read(0, bytes);
  return fnv1a32(bytes);
}

} // namespace

KernelRegistry builtin_kernels() {
  const ArgSpec scalar{ArgKind::Scalar, 8};
  const ArgSpec handle{ArgKind::Handle, 8};
  KernelRegistry r;
  r.register_kernel({kernel_ids::identity, "identity", {scalar}, 8, 4, identity}).value();
  r.register_kernel(
       {kernel_ids::memcpy_dev, "memcpy_dev", {handle, handle, scalar}, 8, 2048, memcpy_dev})
      .value();
  r.register_kernel({kernel_ids::arraysum, "arraysum", {handle, scalar}, 8, 512, arraysum})
      .value();
  r.register_kernel({kernel_ids::latency_probe, "latency_probe", {}, 8, 1, latency_probe})
      .value();
  r.register_kernel({kernel_ids::magic, "magic", {handle}, 4, 256, magic}).value();
  return r;
}

} // namespace tpc
