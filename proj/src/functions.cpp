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

#include "pilotq/functions.hpp"

#include <chrono>
#include <mutex>
#include <thread>

#include "pilotq/error.hpp"
#include "pilotq/qsim/simulator.hpp"

namespace pilotq {

namespace {

nlohmann::json batch_jacobian(const nlohmann::json &args) {
    const auto circuits = args.at("circuits").get<std::vector<qsim::Circuit>>();
    const auto observables =
        args.at("observables").get<std::vector<qsim::PauliObservable>>();
    const std::uint64_t cap = args.value("memory_cap", qsim::kDefaultMemoryCapBytes);
    nlohmann::json values = nlohmann::json::array();
    nlohmann::json jacobians = nlohmann::json::array();
    for (const auto &c : circuits) {
        nlohmann::json v = nlohmann::json::array();
        nlohmann::json jac = nlohmann::json::array();
        for (const auto &o : observables) {
            auto vg = qsim::value_and_gradient(c, o, cap);
            v.push_back(vg.value);
            jac.push_back(std::move(vg.gradient));
        }
        values.push_back(std::move(v));
        jacobians.push_back(std::move(jac));
    }
    return {{"values", values}, {"jacobians", jacobians}};
}

} // namespace

std::shared_ptr<FunctionRegistry> FunctionRegistry::with_builtins() {
    auto reg = std::make_shared<FunctionRegistry>();
    reg->add("noop", [](const nlohmann::json &) { return nlohmann::json(); });
    reg->add("raise", [](const nlohmann::json &args) -> nlohmann::json {
        throw std::runtime_error(args.is_object() ? args.value("message", "raised")
                                                  : "raised");
    });
    reg->add("sleep", [](const nlohmann::json &args) {
        const double s = args.value("seconds", 0.0);
        std::this_thread::sleep_for(std::chrono::duration<double>(s));
        return nlohmann::json(s);
    });
    reg->add("qsim.jacobian", batch_jacobian);
    return reg;
}

void FunctionRegistry::add(const std::string &name, TaskFunction fn) {
    std::unique_lock lock(mu_);
    fns_[name] = std::move(fn);
}

bool FunctionRegistry::contains(const std::string &name) const {
    std::shared_lock lock(mu_);
    return fns_.count(name) > 0;
}

nlohmann::json FunctionRegistry::call(const std::string &name,
                                      const nlohmann::json &args) const {
    TaskFunction fn;
    {
        std::shared_lock lock(mu_);
        auto it = fns_.find(name);
        require(it != fns_.end(), ErrorCode::UnknownFunction,
                "no function registered as '" + name + "'");
        fn = it->second;
    }
    return fn(args);
}

} // namespace pilotq
