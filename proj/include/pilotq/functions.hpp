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

#include <functional>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>

#include "json.hpp"

namespace pilotq {

/// Callable behind a `classical_fn` task. Throwing marks the task FAILED.
using TaskFunction = std::function<nlohmann::json(const nlohmann::json &args)>;

/// Named functions that classical tasks may invoke.
///
/// Built-ins registered by `with_builtins()`:
///  - `noop`: returns null.
///  - `raise`: always throws (args.message, default "raised").
///  - `sleep`: blocks for args.seconds of wall time.
///  - `qsim.jacobian`: args {circuits: [Circuit], observables: [Observable],
///    memory_cap?}; returns {values: [[v]], jacobians: [[[dv/dtheta]]]},
///    indexed [circuit][observable].
class FunctionRegistry {
  public:
    static std::shared_ptr<FunctionRegistry> with_builtins();

    void add(const std::string &name, TaskFunction fn);
    [[nodiscard]] bool contains(const std::string &name) const;
    /// Throws UnknownFunction when `name` is not registered.
    nlohmann::json call(const std::string &name, const nlohmann::json &args) const;

  private:
    mutable std::shared_mutex mu_;
    std::map<std::string, TaskFunction> fns_;
};

} // namespace pilotq
