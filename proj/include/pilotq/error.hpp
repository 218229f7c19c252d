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

#include <stdexcept>
#include <string>
#include <string_view>

namespace pilotq {

/// Every failure raised by the library carries one of these codes. The C API
/// maps them one-to-one onto `pq_status` values.
enum class ErrorCode : int {
    Validation = 1,
    IllegalTransition,
    Capacity,
    DoubleRelease,
    QubitCapacityExceeded,
    WalltimeExpired,
    WorkerOversubscription,
    AgentStopped,
    DuplicatePilotName,
    UnknownPilot,
    DuplicateTaskId,
    UnknownTaskId,
    NoFeasiblePilot,
    MemoryCapExceeded,
    DimensionMismatch,
    ParamCountMismatch,
    NotCutFriendly,
    WidthExceeded,
    UnsupportedObservable,
    MissingFragmentValue,
    NoActiveSession,
    Io,
    Divergence,
    UnknownFunction,
    Internal,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for errors caused by bad caller input (CLI exit code 1).
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what),
          code_(code), detail_(what) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] const std::string &detail() const noexcept { return detail_; }

  private:
    ErrorCode code_;
    std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string &what) {
    throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string &what) {
    if (!cond) {
        throw Error(code, what);
    }
}

} // namespace pilotq
