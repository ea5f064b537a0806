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
 * @file sim_time.hpp
 * @brief Modeled (virtual) time. Integer picoseconds so that sums of equal
 *        durations are exact; wall-clock time never enters these values.
 */
#ifndef TPC_SIM_TIME_HPP__
#define TPC_SIM_TIME_HPP__

#include <atomic>
#include <cmath>
#include <compare>
#include <cstdint>

namespace tpc {

class SimTime {
public:
  constexpr SimTime() = default;

  static constexpr SimTime from_ps(std::int64_t ps) { return SimTime(ps); }
  static SimTime from_us(double us) {
    return SimTime(static_cast<std::int64_t>(std::llround(us * 1e6)));
  }
  /// Time for `cycles` fabric clock cycles at `mhz`.
  static SimTime from_cycles(std::uint64_t cycles, double mhz) {
    return SimTime(static_cast<std::int64_t>(
        std::llround(static_cast<double>(cycles) * 1e6 / mhz)));
  }

  constexpr std::int64_t ps() const { return ps_; }
  constexpr double us() const { return static_cast<double>(ps_) / 1e6; }

  constexpr SimTime operator+(SimTime o) const { return SimTime(ps_ + o.ps_); }
  constexpr SimTime operator-(SimTime o) const { return SimTime(ps_ - o.ps_); }
  constexpr SimTime &operator+=(SimTime o) {
    ps_ += o.ps_;
    return *this;
  }
  constexpr SimTime operator*(std::int64_t k) const { return SimTime(ps_ * k); }
  constexpr auto operator<=>(const SimTime &) const = default;

private:
  constexpr explicit SimTime(std::int64_t ps) : ps_(ps) {}
  std::int64_t ps_ = 0;
};

/// Host-side modeled clock. Only ever moves forward.
class VirtualClock {
public:
  SimTime now() const { return SimTime::from_ps(now_.load(std::memory_order_acquire)); }

  /// Moves the clock to `t` unless it is already past it; returns the new now.
  SimTime advance_to(SimTime t) {
    std::int64_t cur = now_.load(std::memory_order_relaxed);
    while (cur < t.ps() &&
           !now_.compare_exchange_weak(cur, t.ps(), std::memory_order_acq_rel))
      ;
    return now();
  }

  void reset() { now_.store(0, std::memory_order_release); }

private:
  std::atomic<std::int64_t> now_{0};
};

} // namespace tpc

#endif /* TPC_SIM_TIME_HPP__ */
