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

#include "pilotq/clock.hpp"

#include <thread>

namespace pilotq {

double SteadyClock::now() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         origin_)
        .count();
}

void SteadyClock::sleep_until(double t) {
    const auto deadline =
        origin_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(t));
    std::this_thread::sleep_until(deadline);
}

double ManualClock::now() const {
    std::lock_guard lock(mu_);
    return now_;
}

void ManualClock::sleep_until(double t) {
    std::lock_guard lock(mu_);
    if (t > now_) {
        now_ = t;
    }
}

void ManualClock::advance(double dt) {
    std::lock_guard lock(mu_);
    if (dt > 0) {
        now_ += dt;
    }
}

} // namespace pilotq
