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

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "oracle.hpp"
#include "pilotq/cutting.hpp"
#include "pilotq/error.hpp"
#include "pilotq/manager.hpp"
#include "pilotq/qsim/ansatz.hpp"

using namespace pilotq;
using namespace pilotq::cut;
using qsim::PauliObservable;

namespace {

ErrorCode code_of(const std::function<void()> &fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

std::string random_pauli(std::size_t n, std::mt19937_64 &rng) {
    static const char letters[] = "IXYZ";
    std::string s(n, 'I');
    for (auto &c : s) {
        c = letters[rng() % 4];
    }
    return s;
}

double uncut(const qsim::Circuit &c, const std::string &p) {
    return oracle::expval_sparse(oracle::simulate(c), p);
}

std::vector<std::size_t> sizes_of(std::initializer_list<std::size_t> s) { return s; }

} // namespace

TEST_CASE("clustered_circuit layout") {
    const auto s33 = sizes_of({3, 3});
    const auto c = clustered_circuit(s33, 1, std::uint64_t{1});
    CHECK(c.num_qubits == 6);
    CHECK(c.num_params() == 24);
    CHECK(c.gates.back().kind == qsim::GateKind::CNOT);
    CHECK(c.gates.back().qubits == std::vector<std::size_t>{2, 3});

    const auto s4 = sizes_of({4});
    const auto params = qsim::random_angles(16, 3);
    CHECK(clustered_circuit(s4, 1, params) == qsim::efficient_su2(4, 1, params));

    const auto s222 = sizes_of({2, 2, 2});
    const auto chain = clustered_circuit(s222, 1, std::uint64_t{2});
    const auto coupling = std::count_if(chain.gates.end() - 2, chain.gates.end(), [](auto &g) {
        return g.kind == qsim::GateKind::CNOT;
    });
    CHECK(coupling == 2);

    CHECK(code_of([&] { clustered_circuit(s33, 1, std::vector<double>(23)); }) ==
          ErrorCode::ParamCountMismatch);
}

TEST_CASE("find_cuts on clustered circuits") {
    const auto s33 = sizes_of({3, 3});
    const auto c = clustered_circuit(s33, 1, std::uint64_t{1});
    const auto plan = find_cuts(c, 4);
    CHECK(plan.k() == 1);
    REQUIRE(plan.fragments.size() == 2);
    CHECK(plan.fragments[0].width == 3);
    CHECK(plan.fragments[1].width == 4);
    CHECK(plan.cuts[0].qubit == 2);
    CHECK(plan.locate(2).fragment == 1);
    CHECK(plan.locate(2).wire == 3);
    CHECK(plan.locate(4).wire == 1);

    const auto s4 = sizes_of({4});
    const auto single = find_cuts(clustered_circuit(s4, 1, std::uint64_t{1}), 4);
    CHECK(single.k() == 0);
    CHECK(single.fragments.size() == 1);

    CHECK(code_of([&] { find_cuts(c, 3); }) == ErrorCode::WidthExceeded);
    CHECK(code_of([&] { find_cuts(clustered_circuit(s4, 1, std::uint64_t{1}), 3); }) ==
          ErrorCode::NotCutFriendly);

    const auto s222 = sizes_of({2, 2, 2});
    const auto chain = find_cuts(clustered_circuit(s222, 1, std::uint64_t{1}), 3);
    CHECK(chain.k() == 2);
    CHECK(chain.fragments[1].incoming.size() == 1);
    CHECK(chain.fragments[1].outgoing.size() == 1);

    const nlohmann::json j = plan;
    CHECK(j["k"] == 1);
    CHECK(j["fragments"][1]["width"] == 4);
}

TEST_CASE("fragments cover every gate exactly once") {
    const auto sizes = sizes_of({3, 1, 2, 3});
    const auto c = clustered_circuit(sizes, 2, std::uint64_t{5});
    const auto plan = find_cuts(c, 4);
    CHECK(plan.k() == 3);
    std::size_t total = 0;
    for (const auto &f : plan.fragments) {
        total += f.gates.size();
        for (const auto &g : f.gates) {
            for (auto q : g.qubits) {
                CHECK(q < f.width);
            }
        }
    }
    CHECK(total == c.gates.size());
}

TEST_CASE("subexperiment and term counts") {
    const auto s33 = sizes_of({3, 3});
    const auto c = clustered_circuit(s33, 1, std::uint64_t{1});
    const auto plan = find_cuts(c, 4);
    const auto exps = generate_subexperiments(c, plan, PauliObservable::single("ZZZZZZ"));
    CHECK(exps.subexperiments.size() == 9);
    CHECK(exps.terms.size() == 8);
    double abs_sum = 0;
    for (const auto &t : exps.terms) {
        abs_sum += std::abs(t.coefficient);
    }
    CHECK(abs_sum == doctest::Approx(4.0));
    for (const auto &s : exps.subexperiments) {
        CHECK(s.circuit.num_qubits == plan.fragments[s.fragment_index].width);
    }

    const auto s6 = sizes_of({6});
    const auto c6 = clustered_circuit(s6, 1, std::uint64_t{1});
    const auto p0 = find_cuts(c6, 6);
    const auto e0 = generate_subexperiments(c6, p0, PauliObservable::single("XIIIIZ"));
    CHECK(e0.subexperiments.size() == 1);
    REQUIRE(e0.terms.size() == 1);
    CHECK(e0.terms[0].coefficient == 1.0);

    // count formula 3^out * 6^in per fragment, checked for k <= 3
    for (const auto &sizes : {sizes_of({2, 2, 2}), sizes_of({2, 2, 2, 2}), sizes_of({1, 2})}) {
        const auto cc = clustered_circuit(sizes, 1, std::uint64_t{3});
        const auto pp = find_cuts(cc, 3);
        const auto ee =
            generate_subexperiments(cc, pp, PauliObservable::single(std::string(cc.num_qubits, 'Z')));
        std::size_t expected = 0;
        for (const auto &f : pp.fragments) {
            expected += static_cast<std::size_t>(std::pow(3, f.outgoing.size()) *
                                                 std::pow(6, f.incoming.size()));
        }
        CHECK(ee.subexperiments.size() == expected);
        CHECK(ee.terms.size() == static_cast<std::size_t>(std::pow(8, pp.k())));
        if (pp.k() == 2) {
            std::size_t middle = 0;
            for (const auto &s : ee.subexperiments) {
                middle += s.fragment_index == 1;
            }
            CHECK(middle == 18);
            CHECK(ee.terms.size() == 64);
        }
    }

    CHECK(code_of([&] {
              generate_subexperiments(c, plan, PauliObservable({{1.0, "ZIIIII"}, {1.0, "IIIIIZ"}}));
          }) == ErrorCode::UnsupportedObservable);
}

TEST_CASE("wire-cut table reconstructs single-qubit density matrices") {
    // rho = sum_t c_t Tr(O_t rho) rho_t
    using oracle::C;
    std::mt19937_64 rng(9);
    std::normal_distribution<double> gauss;
    const auto state_of = [](PrepState s) {
        const double r = 1 / std::sqrt(2.0);
        switch (s) {
        case PrepState::Zero:
            return std::array<C, 2>{1, 0};
        case PrepState::One:
            return std::array<C, 2>{0, 1};
        case PrepState::Plus:
            return std::array<C, 2>{r, r};
        case PrepState::Minus:
            return std::array<C, 2>{r, -r};
        case PrepState::PlusI:
            return std::array<C, 2>{r, C{0, r}};
        case PrepState::MinusI:
            return std::array<C, 2>{r, C{0, -r}};
        }
        return std::array<C, 2>{};
    };
    for (int trial = 0; trial < 100; ++trial) {
        // random mixed state: normalised G G^dagger
        oracle::Dense g(2);
        for (auto &v : g.a) {
            v = C{gauss(rng), gauss(rng)};
        }
        auto rho = oracle::mul(g, oracle::dagger(g));
        const C tr = rho(0, 0) + rho(1, 1);
        for (auto &v : rho.a) {
            v /= tr;
        }
        oracle::Dense rebuilt(2);
        for (const auto &e : wire_cut_table()) {
            const auto o = oracle::mul(oracle::pauli(e.observable), rho);
            const C expval = o(0, 0) + o(1, 1);
            const auto v = state_of(e.prep);
            for (int r = 0; r < 2; ++r) {
                for (int c = 0; c < 2; ++c) {
                    rebuilt(r, c) += e.coefficient * expval * v[r] * std::conj(v[c]);
                }
            }
        }
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(std::abs(rebuilt.a[i] - rho.a[i]) < 1e-12);
        }
    }
}

TEST_CASE("prep and basis circuits") {
    // H then measure X -> +1 ; prep |1> then Z -> -1
    Subexperiment sub;
    sub.circuit = qsim::Circuit(1);
    sub.circuit.h(0).h(0);  // H, then X-basis rotation
    sub.outgoing_wires = {0};
    sub.measure_settings = {Basis::X};
    CHECK(fragment_value(sub, 0, {}) == doctest::Approx(1.0));
    CHECK(fragment_value(sub, 1, {}) == doctest::Approx(1.0));

    Subexperiment prep;
    prep.circuit = qsim::Circuit(1);
    prep.circuit.x(0);
    prep.observable_mask = 1;
    CHECK(fragment_value(prep, 0, {}) == doctest::Approx(-1.0));
}

TEST_CASE("exact reconstruction equals the uncut oracle") {
    std::mt19937_64 rng(21);
    const std::vector<std::vector<std::size_t>> layouts = {
        {3, 3}, {2, 2, 2}, {1, 3}, {4, 2, 3}, {2, 3, 3, 2}, {3, 1, 2}, {6, 6}};
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 35; ++seed) {
        const auto &sizes = layouts[seed % layouts.size()];
        const auto c = clustered_circuit(sizes, 1 + seed % 2, seed);
        std::size_t widest = 0;
        for (auto s : sizes) {
            widest = std::max(widest, s + 1);
        }
        const auto p = random_pauli(c.num_qubits, rng);
        const double got = cut_expectation(c, PauliObservable::single(p), widest, {});
        CHECK(std::abs(got - uncut(c, p)) <= 1e-9);
        ++checked;
    }
    CHECK(checked == 35);

    // multi-term observables go term by term
    const auto s33 = sizes_of({3, 3});
    const auto c = clustered_circuit(s33, 1, std::uint64_t{4});
    PauliObservable obs({{0.7, "XIZYIZ"}, {-1.2, "ZZZZZZ"}});
    CHECK(cut_expectation(c, obs, 4, {}) ==
          doctest::Approx(0.7 * uncut(c, "XIZYIZ") - 1.2 * uncut(c, "ZZZZZZ")).epsilon(1e-12));
}

TEST_CASE("reconstruct edge cases") {
    const auto s33 = sizes_of({3, 3});
    const auto c = clustered_circuit(s33, 1, std::uint64_t{7});
    const auto plan = find_cuts(c, 4);
    const auto exps = generate_subexperiments(c, plan, PauliObservable::single("ZIZIZI"));
    std::map<FragmentValueKey, double> zeros;
    for (std::size_t i = 0; i < exps.subexperiments.size(); ++i) {
        for (std::uint32_t m = 0; m < exps.subexperiments[i].identity_variants(); ++m) {
            zeros[{i, m}] = 0.0;
        }
    }
    CHECK(reconstruct(exps.terms, zeros) == 0.0);
    zeros.erase(zeros.begin());
    CHECK(code_of([&] { reconstruct(exps.terms, zeros); }) == ErrorCode::MissingFragmentValue);

    ReconstructionTerm only;
    only.factors = {{0, 0}};
    CHECK(reconstruct({only}, {{{0, 0}, 0.375}}) == 0.375);
}

TEST_CASE("sampling overhead is 16^k") {
    for (std::size_t k = 0; k <= 4; ++k) {
        std::vector<std::size_t> sizes(k + 1, 2);
        const auto plan = find_cuts(clustered_circuit(sizes, 1, std::uint64_t{1}), 3);
        REQUIRE(plan.k() == k);
        CHECK(sampling_overhead(plan) == std::pow(16.0, double(k)));
    }
}

TEST_CASE("shot-mode fragment values converge") {
    const auto sizes = sizes_of({3});
    const auto c = clustered_circuit(sizes, 1, std::uint64_t{12});
    const auto plan = find_cuts(c, 3);
    const auto exps = generate_subexperiments(c, plan, PauliObservable::single("XYZ"));
    const auto &sub = exps.subexperiments[0];
    const double exact = fragment_value(sub, 0, {});
    CHECK(exact == doctest::Approx(uncut(c, "XYZ")).epsilon(1e-12));
    const std::size_t shots = 100000;
    const double est = fragment_value(sub, 0, {shots, 3});
    CHECK(std::abs(est - exact) <= 5.0 / std::sqrt(double(shots)));
}

TEST_CASE("shot-mode error shrinks with more shots") {
    const auto s33 = sizes_of({2, 2});
    const auto c = clustered_circuit(s33, 1, std::uint64_t{8});
    const auto obs = PauliObservable::single("ZZZZ");
    const double exact = uncut(c, "ZZZZ");
    const std::size_t S = 2000;
    std::vector<double> e1, e4;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        e1.push_back(std::abs(cut_expectation(c, obs, 3, {S, seed}) - exact));
        e4.push_back(std::abs(cut_expectation(c, obs, 3, {4 * S, seed + 1000}) - exact));
    }
    std::nth_element(e1.begin(), e1.begin() + 25, e1.end());
    std::nth_element(e4.begin(), e4.begin() + 25, e4.end());
    CHECK(e4[25] <= e1[25] / 1.5);
}

TEST_CASE("workflow through the manager") {
    auto opts = ManagerOptions::defaults();
    PilotManager mgr(opts);
    PilotDescription d;
    d.name = "p";
    d.backend_kind = BackendKind::Local;
    d.cores_per_node = 4;
    mgr.create_pilot(d);

    const auto s33 = sizes_of({3, 3});
    const auto c = clustered_circuit(s33, 1, std::uint64_t{3});
    const auto obs = PauliObservable::single("ZXZYZZ");
    WorkflowOptions wo;
    wo.max_width = 4;
    const auto res = run_cut_workflow(mgr, c, obs, wo);
    CHECK(std::abs(res.value - uncut(c, "ZXZYZZ")) <= 1e-9);
    CHECK(res.subexperiments == 9);
    CHECK(res.metrics.tasks_done == 9);
    CHECK(res.metrics.phases_s.count("execute") == 1);

    // qpu too small: refused before anything is submitted
    PilotManager small(ManagerOptions::defaults());
    PilotDescription q;
    q.name = "q";
    q.backend_kind = BackendKind::QpuSim;
    q.qpu_qubits = 3;
    q.queue_model = {0.0, 0.0, 0.0};
    small.create_pilot(q);
    CHECK(code_of([&] { run_cut_workflow(small, c, obs, wo); }) == ErrorCode::NoFeasiblePilot);
    CHECK(small.status()["tasks_total"] == 0);
}
