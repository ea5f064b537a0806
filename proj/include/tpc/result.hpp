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
 * @file result.hpp
 * @brief Closed error enumeration and the value-or-error return type used by
 *        every runtime call. Nothing in the runtime throws for anticipated
 *        failures; callers inspect the Result.
 */
#ifndef TPC_RESULT_HPP__
#define TPC_RESULT_HPP__

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace tpc {

enum class Errc {
  // memory and transfers
  ZeroSize,
  OutOfDeviceMemory,
  InvalidHandle,
  SizeExceedsRegion,
  InvalidAddress,
  InvalidToken,
  // jobs
  UnknownKernel,
  UnknownJob,
  InvalidJobState,
  ArgIndexOutOfRange,
  ArgSizeMismatch,
  MissingArguments,
  ReturnSizeMismatch,
  KernelFault,
  DuplicateKernel,
  // platform
  UnknownPlatform,
  UnknownDevice,
  UnalignedAccess,
  OffsetOutOfRange,
  InvalidPE,
  AckWithoutRaise,
  InvalidConfig,
  // composition and designs
  UnknownArchitecture,
  SlotBudgetExceeded,
  RegisterSpaceExceeded,
  EmptyComposition,
  ZeroPECount,
  SyntaxError,
  ValidationFailed,
  PlatformMismatch,
  UnsupportedVersion,
  NoDesignLoaded,
  // device-wide
  DeviceBusy,
  IoError,
  InvalidArgument,
};

std::string_view to_string(Errc code) noexcept;

struct Error {
  Errc code;
  std::string message;
  /// Extra lines, e.g. every violation of a failed validation.
  std::vector<std::string> details;

  std::string describe() const;
};

inline Error make_error(Errc code, std::string message = {}) {
  return Error{code, std::move(message), {}};
}

class BadResultAccess : public std::logic_error {
public:
  explicit BadResultAccess(const Error &e)
      : std::logic_error("value() on failed result: " + e.describe()) {}
};

template <typename T> class [[nodiscard]] Result {
public:
  Result(T value) : v_(std::in_place_index<0>, std::move(value)) {}
  Result(Error error) : v_(std::in_place_index<1>, std::move(error)) {}

  bool ok() const noexcept { return v_.index() == 0; }
  explicit operator bool() const noexcept { return ok(); }

  T &value() & {
    if (!ok())
      throw BadResultAccess(std::get<1>(v_));
    return std::get<0>(v_);
  }
  const T &value() const & {
    if (!ok())
      throw BadResultAccess(std::get<1>(v_));
    return std::get<0>(v_);
  }
  T &&value() && {
    if (!ok())
      throw BadResultAccess(std::get<1>(v_));
    return std::get<0>(std::move(v_));
  }

  T &operator*() & { return value(); }
  const T &operator*() const & { return value(); }
  T *operator->() { return &value(); }
  const T *operator->() const { return &value(); }

  const Error &error() const { return std::get<1>(v_); }
  Errc code() const { return error().code; }

private:
  std::variant<T, Error> v_;
};

template <> class [[nodiscard]] Result<void> {
public:
  Result() = default;
  Result(Error error) : err_(std::move(error)) {}

  bool ok() const noexcept { return !err_.has_value(); }
  explicit operator bool() const noexcept { return ok(); }
  void value() const {
    if (err_)
      throw BadResultAccess(*err_);
  }

  const Error &error() const { return *err_; }
  Errc code() const { return err_->code; }

private:
  std::optional<Error> err_;
};

} // namespace tpc

#endif /* TPC_RESULT_HPP__ */
