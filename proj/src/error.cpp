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

#include "pilotq/error.hpp"

namespace pilotq {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::Validation: return "ValidationError";
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::Capacity: return "CapacityError";
    case ErrorCode::DoubleRelease: return "DoubleRelease";
    case ErrorCode::QubitCapacityExceeded: return "QubitCapacityExceeded";
    case ErrorCode::WalltimeExpired: return "WalltimeExpired";
    case ErrorCode::WorkerOversubscription: return "WorkerOversubscription";
    case ErrorCode::AgentStopped: return "AgentStopped";
    case ErrorCode::DuplicatePilotName: return "DuplicatePilotName";
    case ErrorCode::UnknownPilot: return "UnknownPilot";
    case ErrorCode::DuplicateTaskId: return "DuplicateTaskId";
    case ErrorCode::UnknownTaskId: return "UnknownTaskId";
    case ErrorCode::NoFeasiblePilot: return "NoFeasiblePilot";
    case ErrorCode::MemoryCapExceeded: return "MemoryCapExceeded";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ParamCountMismatch: return "ParamCountMismatch";
    case ErrorCode::NotCutFriendly: return "NotCutFriendly";
    case ErrorCode::WidthExceeded: return "WidthExceeded";
    case ErrorCode::UnsupportedObservable: return "UnsupportedObservable";
    case ErrorCode::MissingFragmentValue: return "MissingFragmentValue";
    case ErrorCode::NoActiveSession: return "NoActiveSession";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::UnknownFunction: return "UnknownFunction";
    case ErrorCode::Internal: return "InternalError";
    }
    return "InternalError";
}

bool is_validation_error(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::Validation:
    case ErrorCode::ParamCountMismatch:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::DuplicatePilotName:
    case ErrorCode::DuplicateTaskId:
    case ErrorCode::UnknownPilot:
    case ErrorCode::UnknownTaskId:
    case ErrorCode::UnsupportedObservable:
        return true;
    default:
        return false;
    }
}

} // namespace pilotq
