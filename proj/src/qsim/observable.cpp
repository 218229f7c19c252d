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

#include "pilotq/qsim/observable.hpp"

#include <algorithm>

#include "pilotq/error.hpp"

namespace pilotq::qsim {

PauliMasks masks_of(const std::string &paulis) {
    PauliMasks m;
    for (std::size_t q = 0; q < paulis.size(); ++q) {
        const std::uint64_t bit = std::uint64_t{1} << q;
        switch (paulis[q]) {
        case 'I': break;
        case 'X': m.x_mask |= bit; break;
        case 'Z': m.z_mask |= bit; break;
        case 'Y':
            m.x_mask |= bit;
            m.z_mask |= bit;
            ++m.num_y;
            break;
        default:
            fail(ErrorCode::Validation,
                 std::string("invalid Pauli letter '") + paulis[q] + "'");
        }
    }
    return m;
}

PauliObservable::PauliObservable(std::vector<PauliTerm> terms)
    : terms_(std::move(terms)) {
    for (const auto &t : terms_) {
        require(!t.paulis.empty(), ErrorCode::Validation, "empty Pauli string");
        require(t.paulis.size() == terms_.front().paulis.size(),
                ErrorCode::DimensionMismatch,
                "Pauli strings of different lengths in one observable");
        (void)masks_of(t.paulis);
    }
}

PauliObservable PauliObservable::single(std::string paulis, double coefficient) {
    return PauliObservable({PauliTerm{coefficient, std::move(paulis)}});
}

PauliObservable PauliObservable::z_on(std::size_t qubit, std::size_t num_qubits) {
    std::string s(num_qubits, 'I');
    s.at(qubit) = 'Z';
    return single(std::move(s));
}

std::size_t PauliObservable::num_qubits() const noexcept {
    return terms_.empty() ? 0 : terms_.front().paulis.size();
}

bool PauliObservable::is_diagonal() const noexcept {
    return std::all_of(terms_.begin(), terms_.end(), [](const PauliTerm &t) {
        return t.paulis.find_first_of("XY") == std::string::npos;
    });
}

void to_json(nlohmann::json &j, const PauliTerm &t) {
    j = nlohmann::json{{"coefficient", t.coefficient}, {"paulis", t.paulis}};
}

void from_json(const nlohmann::json &j, PauliTerm &t) {
    t.coefficient = j.at("coefficient").get<double>();
    t.paulis = j.at("paulis").get<std::string>();
}

void to_json(nlohmann::json &j, const PauliObservable &o) {
    j = nlohmann::json{{"terms", o.terms()}};
}

void from_json(const nlohmann::json &j, PauliObservable &o) {
    o = PauliObservable(j.at("terms").get<std::vector<PauliTerm>>());
}

} // namespace pilotq::qsim
