// Copyright 2026 The Pilot-Quantum Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <mutex>

namespace pilotq {

/// Monotonic time source in seconds. Backends and agents never read the
/// system clock directly so tests can drive time by hand.
class Clock {
  public:
    virtual ~Clock() = default;
    [[nodiscard]] virtual double now() const = 0;
    virtual void sleep_until(double t) = 0;
    void sleep_for(double seconds) {
        if (seconds > 0) {
            sleep_until(now() + seconds);
        }
    }
};

/// Seconds since construction on std::chrono::steady_clock.
class SteadyClock final : public Clock {
  public:
    SteadyClock() : origin_(std::chrono::steady_clock::now()) {}
    [[nodiscard]] double now() const override;
    void sleep_until(double t) override;

  private:
    std::chrono::steady_clock::time_point origin_;
};

/// Virtual time. `sleep_until` jumps the clock forward instead of blocking,
/// so a 37 s queue delay costs nothing in a unit test.
class ManualClock final : public Clock {
  public:
    explicit ManualClock(double start = 0.0) : now_(start) {}
    [[nodiscard]] double now() const override;
    void sleep_until(double t) override;
    void advance(double dt);

  private:
    mutable std::mutex mu_;
    double now_;
};

} // namespace pilotq
