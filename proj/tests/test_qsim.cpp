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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "pilotq/error.hpp"
#include "pilotq/qsim/ansatz.hpp"
#include "pilotq/qsim/simulator.hpp"

using namespace pilotq;
using namespace pilotq::qsim;

namespace {

std::string random_pauli(std::size_t n, std::mt19937_64 &rng) {
    static const char letters[] = "IXYZ";
    std::string s(n, 'I');
    for (auto &c : s) {
        c = letters[rng() % 4];
    }
    return s;
}

ErrorCode code_of(const std::function<void()> &fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

double counts_or_zero(const Counts &counts, const std::string &key) {
    auto it = counts.find(key);
    return it == counts.end() ? 0.0 : static_cast<double>(it->second);
}

double max_rel_err(const std::vector<double> &a, const std::vector<double> &ref) {
    double scale = 1e-12;
    for (double v : ref) {
        scale = std::max(scale, std::abs(v));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - ref[i]) / scale);
    }
    return worst;
}

} // namespace

TEST_CASE("single gates match textbook matrices") {
    for (auto kind : {GateKind::H, GateKind::X, GateKind::Y, GateKind::Z, GateKind::S,
                      GateKind::T, GateKind::RX, GateKind::RY, GateKind::RZ}) {
        for (std::size_t q = 0; q < 3; ++q) {
            Circuit c(3);
            c.h(0).ry(1, 0.3).rx(2, -1.1);  // non-trivial input state
            std::optional<double> p;
            if (is_rotation(kind)) {
                p = 0.731;
            }
            c.add(kind, {q}, p);
            const auto ref = oracle::final_state(c);
            const auto got = run_circuit(c);
            for (std::size_t i = 0; i < ref.size(); ++i) {
                CHECK(std::abs(got.amplitudes()[i] - ref[i]) < 1e-12);
            }
        }
    }
}

TEST_CASE("random circuits match the dense unitary oracle") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const std::size_t n = 1 + seed % 5;
        auto c = random_circuit(n, 6, seed);
        if (n > 1) {
            c.cz(0, n - 1);
        }
        const auto ref = oracle::final_state(c);
        const auto got = run_circuit(c);
        for (std::size_t i = 0; i < ref.size(); ++i) {
            REQUIRE(std::abs(got.amplitudes()[i] - ref[i]) < 1e-12);
        }
        CHECK(got.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("apply_inverse undoes apply") {
    auto c = random_circuit(4, 8, 99);
    auto s = run_circuit(c);
    for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) {
        s.apply_inverse(*it);
    }
    CHECK(std::abs(s.amplitudes()[0] - Complex{1.0, 0.0}) < 1e-12);
}

TEST_CASE("expectation matches dense Pauli oracle") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + trial % 5;
        const auto c = random_circuit(n, 5, 1000 + trial);
        const auto psi = oracle::final_state(c);
        const auto state = run_circuit(c);
        const auto p = random_pauli(n, rng);
        CHECK(expectation(state, PauliTerm{1.0, p}) ==
              doctest::Approx(oracle::expval(psi, p)).epsilon(1e-12));
    }
    // weighted sums are linear
    const auto c = random_circuit(3, 4, 3);
    const auto s = run_circuit(c);
    PauliObservable obs({{0.5, "XYZ"}, {-2.0, "ZIZ"}});
    const auto psi = oracle::final_state(c);
    CHECK(expectation(s, obs) ==
          doctest::Approx(0.5 * oracle::expval(psi, "XYZ") - 2.0 * oracle::expval(psi, "ZIZ")));
}

TEST_CASE("known expectation values") {
    Circuit c(1);
    c.h(0);
    CHECK(expectation(run_circuit(c), PauliTerm{1.0, "X"}) == doctest::Approx(1.0));
    Circuit bell(2);
    bell.h(0).cnot(0, 1);
    const auto s = run_circuit(bell);
    CHECK(expectation(s, PauliTerm{1.0, "ZZ"}) == doctest::Approx(1.0));
    CHECK(expectation(s, PauliTerm{1.0, "XX"}) == doctest::Approx(1.0));
    CHECK(expectation(s, PauliTerm{1.0, "YY"}) == doctest::Approx(-1.0));
    CHECK(expectation(s, PauliTerm{1.0, "ZI"}) == doctest::Approx(0.0));
}

TEST_CASE("bitstring order is little-endian by qubit") {
    Circuit c(3);
    c.x(0);
    const auto counts = sample(run_circuit(c), 10, 1);
    REQUIRE(counts.size() == 1);
    CHECK(counts.begin()->first == "100");
    CHECK(counts.begin()->second == 10);
}

TEST_CASE("sampling follows the Born rule within binomial bounds") {
    Circuit bell(2);
    bell.h(0).cnot(0, 1);
    const auto counts = sample(run_circuit(bell), 4096, 7);
    std::uint64_t total = 0;
    for (const auto &[k, v] : counts) {
        CHECK((k == "00" || k == "11"));
        total += v;
    }
    CHECK(total == 4096);
    const double sigma = std::sqrt(4096 * 0.25);
    CHECK(std::abs(double(counts.at("00")) - 2048.0) <= 4 * sigma);

    const auto c = random_circuit(4, 5, 11);
    const auto psi = oracle::final_state(c);
    const std::size_t shots = 20000;
    const auto got = sample(run_circuit(c), shots, 12);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        std::string key(4, '0');
        for (std::size_t q = 0; q < 4; ++q) {
            key[q] = ((i >> q) & 1) ? '1' : '0';
        }
        const double p = std::norm(psi[i]);
        const double n = counts_or_zero(got, key);
        CHECK(std::abs(n - shots * p) <= 5 * std::sqrt(shots * p * (1 - p)) + 1);
    }
}

TEST_CASE("sampling is reproducible per seed") {
    const auto s = run_circuit(random_circuit(5, 4, 2));
    CHECK(sample(s, 1000, 42) == sample(s, 1000, 42));
    CHECK(sample(s, 1000, 42) != sample(s, 1000, 43));
}

TEST_CASE("sample_expectation") {
    Counts counts{{"00", 3}, {"11", 1}, {"10", 4}};
    CHECK(sample_expectation(counts, PauliTerm{1.0, "ZI"}) == doctest::Approx((3 - 1 - 4) / 8.0));
    CHECK(sample_expectation(counts, PauliTerm{2.0, "ZZ"}) == doctest::Approx(2 * (3 + 1 - 4) / 8.0));
    CHECK(code_of([&] { sample_expectation(counts, PauliTerm{1.0, "XI"}); }) ==
          ErrorCode::UnsupportedObservable);
}

TEST_CASE("memory model") {
    CHECK(memory_bytes(1) == 32);
    CHECK(memory_bytes(10) == 16384);
    // 16 * 2^26 = 1 GiB < 2 GiB; 2^27 states would equal the cap.
    CHECK(max_qubits(kDefaultMemoryCapBytes) == 26);
    // three copies: 48 * 2^25 = 1.5 GiB fits, 2^26 does not.
    CHECK(max_qubits(kDefaultMemoryCapBytes, kGradientStateCopies) == 25);
    CHECK(max_qubits(1024) == 5);
    CHECK(code_of([] { check_memory(27, kDefaultMemoryCapBytes); }) ==
          ErrorCode::MemoryCapExceeded);
    CHECK(code_of([] { run_circuit(Circuit(8), 4096); }) == ErrorCode::MemoryCapExceeded);
    CHECK(code_of([] {
              Circuit c(7);
              c.ry(0, 0.1, 0);
              adjoint_gradient(c, PauliObservable::z_on(0, 7), 3 * memory_bytes(7));
          }) == ErrorCode::MemoryCapExceeded);
    Circuit c(7);
    c.ry(0, 0.1, 0);
    CHECK_NOTHROW(adjoint_gradient(c, PauliObservable::z_on(0, 7), 3 * memory_bytes(7) + 1));
}

TEST_CASE("analytic gradient RY(pi/2) with Z") {
    Circuit c(1);
    c.ry(0, M_PI / 2, 0);
    const auto vg = value_and_gradient(c, PauliObservable::single("Z"));
    CHECK(std::abs(vg.value) < 1e-12);
    REQUIRE(vg.gradient.size() == 1);
    CHECK(std::abs(vg.gradient[0] + 1.0) < 1e-9);
}

TEST_CASE("adjoint gradients against finite differences and parameter shift") {
    std::mt19937_64 rng(17);
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const std::size_t n = 1 + seed % 6;
        const std::size_t layers = 1 + seed % 3;
        const auto params = random_angles(sel_param_count(n, layers), seed);
        const auto c = sel_circuit(n, layers, params);
        const auto p = random_pauli(n, rng);
        const auto adj = adjoint_gradient(c, PauliObservable::single(p));
        CHECK(max_rel_err(adj, oracle::finite_difference(c, p, 1e-5)) <= 1e-5);
        const auto shift = oracle::parameter_shift(c, p);
        for (std::size_t j = 0; j < adj.size(); ++j) {
            CHECK(std::abs(adj[j] - shift[j]) < 1e-10);
        }
    }
}

TEST_CASE("gradient of weighted sum and shared parameters") {
    Circuit c(2);
    c.rx(0, 0.4, 0).ry(1, 0.9, 1).cnot(0, 1).rz(1, 0.4, 0).rx(1, -0.2, 1);
    PauliObservable obs({{0.3, "ZX"}, {1.5, "YZ"}});
    const auto adj = adjoint_gradient(c, obs);
    const auto a = oracle::parameter_shift(c, "ZX");
    const auto b = oracle::parameter_shift(c, "YZ");
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(adj[j] == doctest::Approx(0.3 * a[j] + 1.5 * b[j]).epsilon(1e-10));
    }
    const auto vg = value_and_gradient(c, obs);
    CHECK(vg.value == doctest::Approx(expectation(run_circuit(c), obs)));
}

TEST_CASE("ansatz shapes") {
    CHECK(efficient_su2_param_count(4, 1) == 16);
    CHECK(sel_param_count(4, 2) == 24);
    const auto e = efficient_su2(3, 2, random_angles(18, 1));
    std::size_t cnots = 0;
    for (const auto &g : e.gates) {
        cnots += g.kind == GateKind::CNOT;
    }
    CHECK(cnots == 4);
    CHECK(e.num_params() == 18);

    // layer 0 has range 1, layer 1 range 2 for n = 4
    const auto s = sel_circuit(4, 2, random_angles(24, 2));
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto &g : s.gates) {
        if (g.kind == GateKind::CNOT) {
            pairs.emplace_back(g.qubits[0], g.qubits[1]);
        }
    }
    REQUIRE(pairs.size() == 8);
    CHECK(pairs[0] == std::pair<std::size_t, std::size_t>{0, 1});
    CHECK(pairs[3] == std::pair<std::size_t, std::size_t>{3, 0});
    CHECK(pairs[4] == std::pair<std::size_t, std::size_t>{0, 2});
    CHECK(pairs[7] == std::pair<std::size_t, std::size_t>{3, 1});
    CHECK(sel_circuit(1, 2, random_angles(6, 3)).gates.size() == 6);

    CHECK(code_of([] { efficient_su2(3, 1, std::vector<double>(5)); }) ==
          ErrorCode::ParamCountMismatch);
    CHECK(code_of([] { sel_circuit(2, 1, std::vector<double>(7)); }) ==
          ErrorCode::ParamCountMismatch);
}

TEST_CASE("random circuits are deterministic and well formed") {
    const auto a = random_circuit(6, 5, 8);
    CHECK(a == random_circuit(6, 5, 8));
    CHECK_FALSE(a == random_circuit(6, 5, 9));
    CHECK_NOTHROW(validate(a));
    CHECK(a.num_params() == 0);
}

TEST_CASE("circuit validation and JSON") {
    CHECK(code_of([] { validate(Circuit(0)); }) == ErrorCode::Validation);
    CHECK(code_of([] {
              Circuit c(2);
              c.cnot(1, 1);
              validate(c);
          }) == ErrorCode::Validation);
    CHECK(code_of([] {
              Circuit c(2);
              c.h(2);
              validate(c);
          }) == ErrorCode::Validation);
    CHECK(code_of([] {
              Circuit c(1);
              c.add(GateKind::RX, {0});
              validate(c);
          }) == ErrorCode::Validation);

    const auto c = sel_circuit(3, 1, random_angles(9, 4));
    const nlohmann::json j = c;
    CHECK(j.get<Circuit>() == c);
    CHECK(j["gates"][0]["name"] == "RZ");
}

TEST_CASE("observable validation") {
    CHECK(code_of([] { PauliObservable({{1.0, "XZ"}, {1.0, "X"}}); }) == ErrorCode::DimensionMismatch);
    CHECK(code_of([] { PauliObservable::single("XQ"); }) == ErrorCode::Validation);
    CHECK(PauliObservable::single("IZZ").is_diagonal());
    CHECK_FALSE(PauliObservable::single("IXZ").is_diagonal());
    CHECK(code_of([] { expectation(StateVector(2), PauliTerm{1.0, "Z"}); }) ==
          ErrorCode::DimensionMismatch);
}
