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

/**
 * @file
 * Gate-list circuit representation used as the payload of quantum tasks.
 */
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace pilotq::qsim {

enum class GateKind { H, X, Y, Z, S, T, RX, RY, RZ, CNOT, CZ };

std::string_view gate_name(GateKind kind) noexcept;
GateKind parse_gate_name(std::string_view name);
bool is_rotation(GateKind kind) noexcept;
std::size_t gate_arity(GateKind kind) noexcept;

struct Gate {
    GateKind kind{GateKind::H};
    std::vector<std::size_t> qubits;
    std::optional<double> param;
    /// Set when the rotation angle is a trainable parameter.
    std::optional<std::size_t> param_index;

    bool operator==(const Gate &) const = default;
};

/// Ordered gate list acting on `num_qubits` wires initialised to |0...0>.
struct Circuit {
    std::size_t num_qubits{1};
    std::vector<Gate> gates;

    Circuit() = default;
    explicit Circuit(std::size_t n) : num_qubits(n) {}

    /// One past the largest trainable parameter index (0 when none).
    [[nodiscard]] std::size_t num_params() const;

    Circuit &add(GateKind kind, std::vector<std::size_t> qubits,
                 std::optional<double> param = std::nullopt,
                 std::optional<std::size_t> param_index = std::nullopt);

    Circuit &h(std::size_t q) { return add(GateKind::H, {q}); }
    Circuit &x(std::size_t q) { return add(GateKind::X, {q}); }
    Circuit &y(std::size_t q) { return add(GateKind::Y, {q}); }
    Circuit &z(std::size_t q) { return add(GateKind::Z, {q}); }
    Circuit &s(std::size_t q) { return add(GateKind::S, {q}); }
    Circuit &t(std::size_t q) { return add(GateKind::T, {q}); }
    Circuit &rx(std::size_t q, double theta,
                std::optional<std::size_t> idx = std::nullopt) {
        return add(GateKind::RX, {q}, theta, idx);
    }
    Circuit &ry(std::size_t q, double theta,
                std::optional<std::size_t> idx = std::nullopt) {
        return add(GateKind::RY, {q}, theta, idx);
    }
    Circuit &rz(std::size_t q, double theta,
                std::optional<std::size_t> idx = std::nullopt) {
        return add(GateKind::RZ, {q}, theta, idx);
    }
    Circuit &cnot(std::size_t control, std::size_t target) {
        return add(GateKind::CNOT, {control, target});
    }
    Circuit &cz(std::size_t a, std::size_t b) {
        return add(GateKind::CZ, {a, b});
    }

    /// Overwrites the angles of trainable gates from `params[param_index]`.
    void bind(const std::vector<double> &params);

    bool operator==(const Circuit &) const = default;
};

/// Throws ValidationError on out-of-range or repeated qubit indices, a
/// missing/extra angle, or non-dense trainable indices.
void validate(const Circuit &circuit);

void to_json(nlohmann::json &j, const Gate &g);
void from_json(const nlohmann::json &j, Gate &g);
void to_json(nlohmann::json &j, const Circuit &c);
void from_json(const nlohmann::json &j, Circuit &c);

} // namespace pilotq::qsim
