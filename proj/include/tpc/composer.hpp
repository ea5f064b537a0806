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
 * @file composer.hpp
 * @brief Composition -> DesignArtifact toolchain. Parses the user's
 *        composition file, checks it against a platform and the kernel
 *        registry, and lays the PEs out with the chosen architecture.
 *
 * Composition file (JSON, unknown keys rejected):
 *
 *     { "architecture": "flat",
 *       "kernels": [ { "id": 10, "name": "magic", "count": 4 } ] }
 *
 * Design files are JSON with alphabetically sorted keys, two-space indent
 * and a trailing LF, so identical inputs give byte-identical files.
 */
#ifndef TPC_COMPOSER_HPP__
#define TPC_COMPOSER_HPP__

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <tpc/design.hpp>
#include <tpc/kernels.hpp>
#include <tpc/platform.hpp>
#include <tpc/result.hpp>

namespace tpc {

Result<Composition> parse_composition(std::string_view text);
std::string serialize_composition(const Composition &composition);

struct Violation {
  Errc kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(Errc kind) const;
  std::string to_string() const;
};

ValidationReport validate(const Composition &composition, const PlatformModel &platform,
                          const KernelRegistry &kernels);

/// Pure: the same inputs always produce the same artifact.
Result<DesignArtifact> compose(const Composition &composition, const PlatformModel &platform,
                               const KernelRegistry &kernels);

std::string serialize_design(const DesignArtifact &design);
Result<DesignArtifact> parse_design(std::string_view text);

Result<std::string> read_text_file(const std::filesystem::path &path);
Result<void> write_text_file(const std::filesystem::path &path, std::string_view content);

} // namespace tpc

#endif /* TPC_COMPOSER_HPP__ */
