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
#include <tpc/composer.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include <tpc/threadpool.hpp>

namespace tpc {

using nlohmann::json;

namespace {

Error syntax(std::string msg) { return make_error(Errc::SyntaxError, std::move(msg)); }

Result<json> parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error &e) {
    // e.byte is 1-based and points just past the offending character
    const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
    const auto nl = text.rfind('\n', upto == 0 ? 0 : upto - 1);
    const auto column = nl == std::string_view::npos || upto == 0 ? upto + 1 : upto - nl;
    return syntax("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                  e.what());
  }
}

Result<void> only_keys(const json &obj, std::initializer_list<std::string_view> allowed,
                       const std::string &where) {
  if (!obj.is_object())
    return syntax(where + ": expected an object");
  for (const auto &item : obj.items())
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      return syntax(where + ": unknown key '" + item.key() + "'");
  for (auto key : allowed)
    if (!obj.contains(std::string(key)))
      return syntax(where + ": missing key '" + std::string(key) + "'");
  return {};
}

Result<std::uint64_t> unsigned_field(const json &obj, const char *key, const std::string &where) {
  const json &v = obj.at(key);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    return syntax(where + ": '" + key + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

} // namespace

// ---------------------------------------------------------------------------
// compositions

Result<Composition> parse_composition(std::string_view text) {
  auto doc = parse_json(text);
  if (!doc)
    return doc.error();
  if (auto r = only_keys(*doc, {"architecture", "kernels"}, "composition"); !r)
    return r.error();
  const json &arch = (*doc)["architecture"];
  const json &kernels = (*doc)["kernels"];
  if (!arch.is_string())
    return syntax("composition: 'architecture' must be a string");
  if (!kernels.is_array())
    return syntax("composition: 'kernels' must be an array");

  Composition c;
  c.architecture = arch.get<std::string>();
  std::set<KernelId> seen;
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    const std::string where = "kernels[" + std::to_string(i) + "]";
    const json &k = kernels[i];
    if (auto r = only_keys(k, {"id", "name", "count"}, where); !r)
      return r.error();
    auto id = unsigned_field(k, "id", where);
    if (!id)
      return id.error();
    auto count = unsigned_field(k, "count", where);
    if (!count)
      return count.error();
    if (!k["name"].is_string())
      return syntax(where + ": 'name' must be a string");
    if (*id > UINT32_MAX || *count > UINT32_MAX)
      return syntax(where + ": value out of range");
    if (*count == 0)
      return make_error(Errc::ZeroPECount, where + ": count must be >= 1");
    if (!seen.insert(static_cast<KernelId>(*id)).second)
      return make_error(Errc::DuplicateKernel, "kernel id " + std::to_string(*id) + " listed twice");
    c.entries.push_back({static_cast<KernelId>(*id), k["name"].get<std::string>(),
                         static_cast<std::uint32_t>(*count)});
  }
  if (c.entries.empty())
    return make_error(Errc::EmptyComposition, "composition lists no kernels");
  return c;
}

std::string serialize_composition(const Composition &composition) {
  json doc;
  doc["architecture"] = composition.architecture;
  doc["kernels"] = json::array();
  for (const auto &e : composition.entries)
    doc["kernels"].push_back({{"id", e.kernel_id}, {"name", e.kernel_name}, {"count", e.pe_count}});
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// validation and composition

bool ValidationReport::has(Errc kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation &v) { return v.kind == kind; });
}

std::string ValidationReport::to_string() const {
  std::string s;
  for (const auto &v : violations) {
    s += std::string(tpc::to_string(v.kind)) + ": " + v.message + "\n";
  }
  return s;
}

ValidationReport validate(const Composition &composition, const PlatformModel &platform,
                          const KernelRegistry &kernels) {
  ValidationReport report;
  auto add = [&](Errc kind, std::string msg) { report.violations.push_back({kind, std::move(msg)}); };

  if (composition.entries.empty())
    add(Errc::EmptyComposition, "composition lists no kernels");
  if (!find_architecture(composition.architecture))
    add(Errc::UnknownArchitecture, "architecture '" + composition.architecture + "' is not known");

  std::set<KernelId> seen;
  std::uint32_t max_arity = 0;
  for (const auto &e : composition.entries) {
    if (!seen.insert(e.kernel_id).second)
      add(Errc::DuplicateKernel, "kernel id " + std::to_string(e.kernel_id) + " listed twice");
    if (e.pe_count == 0)
      add(Errc::ZeroPECount, "kernel id " + std::to_string(e.kernel_id) + " has 0 PEs");
    if (const KernelSpec *k = kernels.find(e.kernel_id))
      max_arity = std::max(max_arity, k->arity());
    else
      add(Errc::UnknownKernel, "kernel id " + std::to_string(e.kernel_id) + " (" + e.kernel_name +
                                   ") is not registered");
  }

  const std::uint64_t total = composition.total_pes();
  if (total > platform.slot_budget)
    add(Errc::SlotBudgetExceeded, std::to_string(total) + " PEs requested, " + platform.name +
                                      " has " + std::to_string(platform.slot_budget) + " slots");
  else if (total * regmap::window_size(max_arity) > platform.register_space_bytes)
    add(Errc::RegisterSpaceExceeded, "register windows exceed " +
                                         std::to_string(platform.register_space_bytes) + " bytes");
  return report;
}

Result<DesignArtifact> compose(const Composition &composition, const PlatformModel &platform,
                               const KernelRegistry &kernels) {
  ValidationReport report = validate(composition, platform, kernels);
  if (!report.ok()) {
    Error e = make_error(Errc::ValidationFailed, "composition is not valid for " + platform.name);
    for (const auto &v : report.violations)
      e.details.push_back(std::string(to_string(v.kind)) + ": " + v.message);
    return e;
  }

  const Architecture &arch = *find_architecture(composition.architecture);
  std::vector<PeRequest> requests;
  std::uint32_t max_arity = 0;
  for (const auto &e : composition.entries) {
    const KernelSpec &k = *kernels.find(e.kernel_id);
    requests.push_back({e.kernel_id, e.pe_count, k.arity(), k.return_width});
    max_arity = std::max(max_arity, k.arity());
  }

  DesignArtifact design;
  design.platform_name = platform.name;
  design.architecture = composition.architecture;
  design.window_size = regmap::window_size(max_arity);
  design.pe_table = arch.layout(std::move(requests), design.window_size);
  design.format_version = kDesignFormatVersion;
  return design;
}

// ---------------------------------------------------------------------------
// design artifacts

namespace {

json register_map_json() {
  return {{"ctrl", regmap::kCtrl},
          {"status", regmap::kStatus},
          {"return", regmap::kReturn},
          {"arg_base", regmap::kArgBase},
          {"arg_stride", regmap::kArgStride}};
}

} // namespace

std::string serialize_design(const DesignArtifact &design) {
  json doc;
  doc["architecture"] = design.architecture;
  doc["format_version"] = design.format_version;
  doc["platform_name"] = design.platform_name;
  doc["window_size"] = design.window_size;
  doc["register_map"] = register_map_json();
  doc["pe_table"] = json::array();
  for (const auto &s : design.pe_table)
    doc["pe_table"].push_back({{"pe_index", s.pe_index},
                               {"kernel_id", s.kernel_id},
                               {"base_offset", s.base_offset},
                               {"arity", s.arity},
                               {"return_width", s.return_width}});
  return doc.dump(2) + "\n";
}

Result<DesignArtifact> parse_design(std::string_view text) {
  auto doc = parse_json(text);
  if (!doc)
    return doc.error();
  const json &d = *doc;
  if (!d.is_object() || !d.contains("format_version") || !d["format_version"].is_number_integer())
    return syntax("design: missing integer 'format_version'");
  DesignArtifact out;
  out.format_version = d["format_version"].get<int>();
  if (out.format_version != kDesignFormatVersion)
    return out; // unknown layout; load_design reports the version

  if (auto r = only_keys(d, {"architecture", "format_version", "platform_name", "window_size",
                             "register_map", "pe_table"},
                         "design");
      !r)
    return r.error();
  if (!d["architecture"].is_string() || !d["platform_name"].is_string())
    return syntax("design: 'architecture' and 'platform_name' must be strings");
  if (d["register_map"] != register_map_json())
    return syntax("design: register_map does not match this runtime");
  out.architecture = d["architecture"].get<std::string>();
  out.platform_name = d["platform_name"].get<std::string>();
  auto ws = unsigned_field(d, "window_size", "design");
  if (!ws)
    return ws.error();
  out.window_size = *ws;
  if (!d["pe_table"].is_array())
    return syntax("design: 'pe_table' must be an array");
  for (std::size_t i = 0; i < d["pe_table"].size(); ++i) {
    const json &row = d["pe_table"][i];
    const std::string where = "pe_table[" + std::to_string(i) + "]";
    if (auto r = only_keys(row, {"pe_index", "kernel_id", "base_offset", "arity", "return_width"},
                           where);
        !r)
      return r.error();
    PeSlot s;
    auto field = [&](const char *key) { return unsigned_field(row, key, where); };
    auto pe = field("pe_index");
    auto kid = field("kernel_id");
    auto base = field("base_offset");
    auto arity = field("arity");
    auto rw = field("return_width");
    for (const Result<std::uint64_t> *r : {&pe, &kid, &base, &arity, &rw})
      if (!*r)
        return r->error();
    s.pe_index = static_cast<std::uint32_t>(*pe);
    s.kernel_id = static_cast<KernelId>(*kid);
    s.base_offset = *base;
    s.arity = static_cast<std::uint32_t>(*arity);
    s.return_width = static_cast<std::uint32_t>(*rw);
    out.pe_table.push_back(s);
  }
  return out;
}

Result<std::string> read_text_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    return make_error(Errc::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result<void> write_text_file(const std::filesystem::path &path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    return make_error(Errc::IoError, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out)
    return make_error(Errc::IoError, "write failed for " + path.string());
  return {};
}

} // namespace tpc
