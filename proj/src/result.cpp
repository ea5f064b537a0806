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
#include <tpc/result.hpp>

namespace tpc {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
  case Errc::ZeroSize: return "ZeroSize";
  case Errc::OutOfDeviceMemory: return "OutOfDeviceMemory";
  case Errc::InvalidHandle: return "InvalidHandle";
  case Errc::SizeExceedsRegion: return "SizeExceedsRegion";
  case Errc::InvalidAddress: return "InvalidAddress";
  case Errc::InvalidToken: return "InvalidToken";
  case Errc::UnknownKernel: return "UnknownKernel";
  case Errc::UnknownJob: return "UnknownJob";
  case Errc::InvalidJobState: return "InvalidJobState";
  case Errc::ArgIndexOutOfRange: return "ArgIndexOutOfRange";
  case Errc::ArgSizeMismatch: return "ArgSizeMismatch";
  case Errc::MissingArguments: return "MissingArguments";
  case Errc::ReturnSizeMismatch: return "ReturnSizeMismatch";
  case Errc::KernelFault: return "KernelFault";
  case Errc::DuplicateKernel: return "DuplicateKernel";
  case Errc::UnknownPlatform: return "UnknownPlatform";
  case Errc::UnknownDevice: return "UnknownDevice";
  case Errc::UnalignedAccess: return "UnalignedAccess";
  case Errc::OffsetOutOfRange: return "OffsetOutOfRange";
  case Errc::InvalidPE: return "InvalidPE";
  case Errc::AckWithoutRaise: return "AckWithoutRaise";
  case Errc::InvalidConfig: return "InvalidConfig";
  case Errc::UnknownArchitecture: return "UnknownArchitecture";
  case Errc::SlotBudgetExceeded: return "SlotBudgetExceeded";
  case Errc::RegisterSpaceExceeded: return "RegisterSpaceExceeded";
  case Errc::EmptyComposition: return "EmptyComposition";
  case Errc::ZeroPECount: return "ZeroPECount";
  case Errc::SyntaxError: return "SyntaxError";
  case Errc::ValidationFailed: return "ValidationFailed";
  case Errc::PlatformMismatch: return "PlatformMismatch";
  case Errc::UnsupportedVersion: return "UnsupportedVersion";
  case Errc::NoDesignLoaded: return "NoDesignLoaded";
  case Errc::DeviceBusy: return "DeviceBusy";
  case Errc::IoError: return "IoError";
  case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string Error::describe() const {
  std::string s(to_string(code));
  if (!message.empty()) {
    s += ": ";
    s += message;
  }
  for (const auto &d : details) {
    s += "\n  ";
    s += d;
  }
  return s;
}

} // namespace tpc
