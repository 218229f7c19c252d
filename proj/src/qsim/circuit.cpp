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

#include "pilotq/qsim/circuit.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "pilotq/error.hpp"

namespace pilotq::qsim {

namespace {
constexpr std::array<std::pair<GateKind, std::string_view>, 11> kGateNames{{
    {GateKind::H, "H"},
    {GateKind::X, "X"},
    {GateKind::Y, "Y"},
    {GateKind::Z, "Z"},
    {GateKind::S, "S"},
    {GateKind::T, "T"},
    {GateKind::RX, "RX"},
    {GateKind::RY, "RY"},
    {GateKind::RZ, "RZ"},
    {GateKind::CNOT, "CNOT"},
    {GateKind::CZ, "CZ"},
}};
} // namespace

std::string_view gate_name(GateKind kind) noexcept {
    for (const auto &[k, name] : kGateNames) {
        if (k == kind) {
            return name;
        }
    }
    return "?";
}

GateKind parse_gate_name(std::string_view name) {
    for (const auto &[k, n] : kGateNames) {
        if (n == name) {
            return k;
        }
    }
    fail(ErrorCode::Validation, "unknown gate '" + std::string(name) + "'");
}

bool is_rotation(GateKind kind) noexcept {
    return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ;
}

std::size_t gate_arity(GateKind kind) noexcept {
    return (kind == GateKind::CNOT || kind == GateKind::CZ) ? 2 : 1;
}

std::size_t Circuit::num_params() const {
    std::size_t n = 0;
    for (const auto &g : gates) {
        if (g.param_index) {
            n = std::max(n, *g.param_index + 1);
        }
    }
    return n;
}

Circuit &Circuit::add(GateKind kind, std::vector<std::size_t> qubits,
                      std::optional<double> param,
                      std::optional<std::size_t> param_index) {
    gates.push_back(Gate{kind, std::move(qubits), param, param_index});
    return *this;
}

void Circuit::bind(const std::vector<double> &params) {
    require(params.size() == num_params(), ErrorCode::ParamCountMismatch,
            "expected " + std::to_string(num_params()) + " parameters, got " +
                std::to_string(params.size()));
    for (auto &g : gates) {
        if (g.param_index) {
            g.param = params[*g.param_index];
        }
    }
}

void validate(const Circuit &circuit) {
    require(circuit.num_qubits >= 1, ErrorCode::Validation, "num_qubits");
    require(circuit.num_qubits <= 62, ErrorCode::Validation,
            "num_qubits above 62 is not addressable");
    const std::size_t np = circuit.num_params();
    std::vector<bool> seen(np, false);
    for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
        const auto &g = circuit.gates[i];
        const std::string where = "gate " + std::to_string(i);
        require(g.qubits.size() == gate_arity(g.kind), ErrorCode::Validation,
                where + ": wrong number of qubits");
        for (auto q : g.qubits) {
            require(q < circuit.num_qubits, ErrorCode::Validation,
                    where + ": qubit index out of range");
        }
        if (g.qubits.size() == 2) {
            require(g.qubits[0] != g.qubits[1], ErrorCode::Validation,
                    where + ": two-qubit gate needs distinct qubits");
        }
        require(g.param.has_value() == is_rotation(g.kind),
                ErrorCode::Validation,
                where + ": param present iff gate is a rotation");
        if (g.param_index) {
            require(is_rotation(g.kind), ErrorCode::Validation,
                    where + ": param_index on a fixed gate");
            seen[*g.param_index] = true;
        }
    }
    require(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }),
            ErrorCode::Validation, "param_index values are not dense");
}

void to_json(nlohmann::json &j, const Gate &g) {
    j = nlohmann::json{{"name", gate_name(g.kind)}, {"qubits", g.qubits}};
    if (g.param) {
        j["param"] = *g.param;
    }
    if (g.param_index) {
        j["param_index"] = *g.param_index;
    }
}

void from_json(const nlohmann::json &j, Gate &g) {
    g.kind = parse_gate_name(j.at("name").get<std::string>());
    g.qubits = j.at("qubits").get<std::vector<std::size_t>>();
    g.param = j.contains("param") ? std::optional(j["param"].get<double>())
                                  : std::nullopt;
    g.param_index = j.contains("param_index")
                        ? std::optional(j["param_index"].get<std::size_t>())
                        : std::nullopt;
}

void to_json(nlohmann::json &j, const Circuit &c) {
    j = nlohmann::json{{"num_qubits", c.num_qubits}, {"gates", c.gates}};
}

void from_json(const nlohmann::json &j, Circuit &c) {
    c.num_qubits = j.at("num_qubits").get<std::size_t>();
    c.gates = j.value("gates", std::vector<Gate>{});
}

} // namespace pilotq::qsim
