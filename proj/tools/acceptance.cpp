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

// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
//
//   pq_acceptance            all criteria
//   pq_acceptance 3 7        selected criteria

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "oracle.hpp"
#include "pilotq/bench.hpp"
#include "pilotq/cutting.hpp"
#include "pilotq/error.hpp"
#include "pilotq/event_log.hpp"
#include "pilotq/manager.hpp"
#include "pilotq/qsim/ansatz.hpp"
#include "pilotq/qsim/simulator.hpp"

using namespace pilotq;

namespace {

struct Outcome {
    bool pass{false};
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char *f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double median(std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
    return v[v.size() / 2];
}

std::string random_pauli(std::size_t n, std::mt19937_64 &rng) {
    static const char kLetters[] = "IXYZ";
    std::string p(n, 'I');
    for (auto &c : p) {
        c = kLetters[rng() % 4];
    }
    return p;
}

std::vector<std::vector<std::string>> parse_csv(const std::string &text) {
    std::vector<std::vector<std::string>> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            cells.emplace_back();
        }
        out.push_back(cells);
    }
    return out;
}

std::size_t col(const std::vector<std::string> &header, const std::string &name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw std::runtime_error("missing column " + name);
    }
    return static_cast<std::size_t>(it - header.begin());
}

bench::Report run(const std::string &command, const nlohmann::json &config) {
    bench::Common common;
    common.seed = config.value("seed", std::uint64_t{7});
    bench::Session session(common);
    if (command == "throughput") {
        return bench::run_throughput(config.get<bench::ThroughputConfig>(), session);
    }
    if (command == "circuits") {
        return bench::run_circuits(config.get<bench::CircuitsConfig>(), session);
    }
    if (command == "cut") {
        return bench::run_cut(config.get<bench::CutConfig>(), session);
    }
    return bench::run_vqc(config.get<bench::VqcConfig>(), session);
}

// 1 ---------------------------------------------------------------------------
Outcome cut_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    double worst = 0.0;
    int circuits = 0;
    std::set<std::size_t> ks;
    while (circuits < 60) {
        const std::size_t k = rng() % 4;
        std::vector<std::size_t> sizes(k + 1);
        std::size_t n = 0;
        for (auto &s : sizes) {
            s = 1 + rng() % 4;
            n += s;
        }
        if (n > 12) {
            continue;
        }
        const auto c = cut::clustered_circuit(sizes, 1 + rng() % 2, rng());
        const auto p = random_pauli(n, rng);
        const std::size_t width = *std::max_element(sizes.begin(), sizes.end()) + 1;
        const double got =
            cut::cut_expectation(c, qsim::PauliObservable::single(p), width, {});
        const double want = oracle::expval_sparse(oracle::simulate(c), p);
        worst = std::max(worst, std::abs(got - want));
        ks.insert(cut::find_cuts(c, width).k());
        ++circuits;
    }
    const double secs = since(t0);
    return {worst <= 1e-9 && secs < 120 && ks.size() == 4,
            std::to_string(circuits) + " circuits, k in {0..3}, max |err| " +
                fmt("%.2e", worst) + ", " + fmt("%.1f", secs) + " s"};
}

// 2 ---------------------------------------------------------------------------
Outcome wire_identity() {
    using oracle::C;
    const auto t0 = Clock::now();
    const double r = 1 / std::sqrt(2.0);
    const std::map<cut::PrepState, std::array<C, 2>> kets{
        {cut::PrepState::Zero, {1, 0}},          {cut::PrepState::One, {0, 1}},
        {cut::PrepState::Plus, {r, r}},          {cut::PrepState::Minus, {r, -r}},
        {cut::PrepState::PlusI, {r, C{0, r}}},   {cut::PrepState::MinusI, {r, C{0, -r}}}};
    std::mt19937_64 rng(202);
    std::normal_distribution<double> gauss;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
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
        for (const auto &e : cut::wire_cut_table()) {
            const auto o = oracle::mul(oracle::pauli(e.observable), rho);
            const C ev = o(0, 0) + o(1, 1);
            const auto &v = kets.at(e.prep);
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    rebuilt(i, j) += e.coefficient * ev * v[i] * std::conj(v[j]);
                }
            }
        }
        for (std::size_t i = 0; i < 4; ++i) {
            worst = std::max(worst, std::abs(rebuilt.a[i] - rho.a[i]));
        }
    }
    const double secs = since(t0);
    return {worst <= 1e-12 && secs < 1.0, "100 density matrices, max |err| " +
                                              fmt("%.2e", worst) + ", " + fmt("%.3f", secs) +
                                              " s"};
}

// 3 ---------------------------------------------------------------------------
Outcome overhead_law() {
    bool exact = true;
    for (std::size_t k = 0; k <= 4; ++k) {
        std::vector<std::size_t> sizes(k + 1, 2);
        const auto plan = cut::find_cuts(cut::clustered_circuit(sizes, 1, std::uint64_t{k}), 3);
        exact = exact && plan.k() == k && cut::sampling_overhead(plan) == std::pow(16.0, double(k));
    }
    const std::vector<std::size_t> sizes{2, 2};
    const auto c = cut::clustered_circuit(sizes, 1, std::uint64_t{33});
    const auto obs = qsim::PauliObservable::single("ZZZZ");
    const double truth = oracle::expval_sparse(oracle::simulate(c), "ZZZZ");
    const std::size_t S = 2000;
    std::vector<double> e1, e4;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        e1.push_back(std::abs(cut::cut_expectation(c, obs, 3, {S, seed}) - truth));
        e4.push_back(std::abs(cut::cut_expectation(c, obs, 3, {4 * S, seed + 5000}) - truth));
    }
    const double m1 = median(e1), m4 = median(e4);
    return {exact && m4 <= m1 / 1.5,
            std::string("16^k exact for k=0..4: ") + (exact ? "yes" : "no") +
                "; median err S=" + fmt("%.4f", m1) + " 4S=" + fmt("%.4f", m4) +
                " ratio " + fmt("%.2f", m1 / m4)};
}

// 4 ---------------------------------------------------------------------------
Outcome adjoint_gradients() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(404);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng() % 7;
        const std::size_t layers = 1 + rng() % std::min<std::size_t>(3, 60 / (3 * n));
        const auto theta = qsim::random_angles(qsim::sel_param_count(n, layers), rng());
        const auto c = qsim::sel_circuit(n, layers, theta);
        const auto p = random_pauli(n, rng);
        const auto adj = qsim::adjoint_gradient(c, qsim::PauliObservable::single(p));
        const auto fd = oracle::finite_difference(c, p, 1e-5);
        double diff = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < fd.size(); ++k) {
            diff = std::max(diff, std::abs(adj[k] - fd[k]));
            scale = std::max(scale, std::abs(fd[k]));
        }
        worst = std::max(worst, diff / std::max(scale, 1e-12));
    }
    qsim::Circuit ry(1);
    ry.ry(0, M_PI / 2, 0);
    const double g = qsim::adjoint_gradient(ry, qsim::PauliObservable::single("Z"))[0];
    const double secs = since(t0);
    return {worst <= 1e-5 && std::abs(g + 1.0) <= 1e-9 && secs < 60,
            "20 SEL circuits, max rel err " + fmt("%.2e", worst) + "; RY(pi/2)/Z grad " +
                fmt("%.12f", g) + ", " + fmt("%.1f", secs) + " s"};
}

// 5 ---------------------------------------------------------------------------
Outcome scheduler_safety() {
    std::size_t worst_spread = 0;
    {
        std::mt19937_64 rng(505);
        for (int trial = 0; trial < 20; ++trial) {
            auto opts = ManagerOptions::defaults();
            opts.auto_schedule = false;
            PilotManager m(opts);
            const int pilots = 2 + static_cast<int>(rng() % 6);
            for (int p = 0; p < pilots; ++p) {
                PilotDescription d;
                d.name = "h" + std::to_string(p);
                d.cores_per_node = 2;
                m.create_pilot(d);
            }
            const int tasks = 1 + static_cast<int>(rng() % 500);
            for (int i = 0; i < tasks; ++i) {
                m.submit_task(TaskDescription::zero_compute("z" + std::to_string(i)));
            }
            std::map<std::string, std::size_t> counts;
            for (const auto &a : m.schedule_pending()) {
                ++counts[a.pilot];
            }
            std::size_t lo = SIZE_MAX, hi = 0;
            for (const auto &name : m.pilot_names()) {
                lo = std::min(lo, counts[name]);
                hi = std::max(hi, counts[name]);
            }
            worst_spread = std::max(worst_spread, hi - lo);
            m.wait_all(60);
        }
    }

    PilotManager m(ManagerOptions::defaults());
    std::mt19937_64 rng(5050);
    std::vector<std::string> alive;
    std::set<std::string> removed;
    int next = 0;
    const auto add_pilot = [&] {
        PilotDescription d;
        d.name = "s" + std::to_string(next++);
        if (rng() % 3 == 0) {
            d.backend_kind = BackendKind::QpuSim;
            d.qpu_qubits = static_cast<std::uint32_t>(2 + rng() % 6);
        } else {
            d.cores_per_node = static_cast<std::uint32_t>(1 + rng() % 4);
            d.gpus_per_node = static_cast<std::uint32_t>(rng() % 3);
        }
        m.create_pilot(d);
        alive.push_back(d.name);
    };
    for (int i = 0; i < 3; ++i) {
        add_pilot();
    }
    std::vector<std::string> ids;
    for (int i = 0; i < 10000; ++i) {
        const std::string id = "x" + std::to_string(i);
        TaskDescription d;
        if (rng() % 5 == 0) {
            QuantumPayload p;
            p.circuit = qsim::random_circuit(1 + rng() % 8, 2, rng());
            p.shots = 8;
            d = TaskDescription::quantum(id, p);
        } else {
            d = TaskDescription::zero_compute(id);
            d.requires_cores = static_cast<std::uint32_t>(1 + rng() % 4);
            d.requires_gpus = static_cast<std::uint32_t>(rng() % 3);
            if (rng() % 10 == 0) {
                d.requires_cores = 64;
            }
        }
        if (rng() % 20 == 0) {
            d.target_pilot = alive[rng() % alive.size()];
        }
        ids.push_back(m.submit_task(d));
        if (i % 500 == 499) {
            if (alive.size() > 1 && rng() % 2) {
                const auto k = rng() % alive.size();
                m.remove_pilot(alive[k], rng() % 2 == 0);
                removed.insert(alive[k]);
                alive.erase(alive.begin() + static_cast<long>(k));
            }
            add_pilot();
        }
    }
    PilotDescription big;
    big.name = "final-cpu";
    big.cores_per_node = 4;
    big.gpus_per_node = 2;
    m.create_pilot(big);
    PilotDescription q;
    q.name = "final-qpu";
    q.backend_kind = BackendKind::QpuSim;
    q.qpu_qubits = 8;
    m.create_pilot(q);
    for (const auto &id : ids) {
        const auto r = m.record(id);
        if (r.state == TaskState::New && r.description.target_pilot &&
            removed.count(*r.description.target_pilot)) {
            m.cancel(id);  // pinned to a pilot that is gone
        }
    }
    const auto res = m.wait(ids, 120);

    const auto events = m.log()->snapshot();
    const auto violations = audit_assignments(events);
    std::map<std::string, int> terminal_events;
    for (const auto &e : events) {
        if (e.event == "task_done" || e.event == "task_failed" || e.event == "task_canceled" ||
            e.event == "task_rejected") {
            ++terminal_events[e.entity_id];
        }
    }
    std::size_t bad_terminal = 0;
    for (const auto &id : ids) {
        bad_terminal += !is_terminal(res.records.at(id).state) || terminal_events[id] != 1;
    }
    return {res.complete && violations.empty() && bad_terminal == 0 && worst_spread <= 1,
            "10000 tasks, " + std::to_string(next + 2) + " pilots created, " +
                std::to_string(violations.size()) + " audit violations, " +
                std::to_string(bad_terminal) + " tasks without exactly one terminal state; " +
                "homogeneous max-min " + std::to_string(worst_spread)};
}

// 6 ---------------------------------------------------------------------------
Outcome throughput() {
    const auto t0 = Clock::now();
    const auto rep = run("throughput", {{"tasks", {256, 8192}}, {"pilots", 1}, {"workers", 8}});
    const auto &h = rep.table.header;
    const auto &r256 = rep.table.rows[0];
    const auto &r8k = rep.table.rows[1];
    const double tp256 = std::stod(r256[col(h, "throughput_tasks_per_s")]);
    const double tp8k = std::stod(r8k[col(h, "throughput_tasks_per_s")]);
    const double dispatch_ms = std::stod(r8k[col(h, "median_dispatch_ms")]);
    const bool clean = r8k[col(h, "done")] == "8192" && r8k[col(h, "failed")] == "0";
    const double secs = since(t0);
    return {clean && tp8k >= 0.25 * tp256 && dispatch_ms < 10 && secs < 180,
            "8192 done/0 failed: " + std::string(clean ? "yes" : "no") + "; throughput " +
                fmt("%.0f", tp256) + " -> " + fmt("%.0f", tp8k) + " tasks/s (ratio " +
                fmt("%.2f", tp8k / tp256) + "); median dispatch " + fmt("%.4f", dispatch_ms) +
                " ms; " + fmt("%.1f", secs) + " s"};
}

// 7 ---------------------------------------------------------------------------
Outcome circuit_scaling() {
    const auto rep = run("circuits", {{"qubits_min", 12},
                                      {"qubits_max", 16},
                                      {"qubits_step", 2},
                                      {"count", 64},
                                      {"depth", 4},
                                      {"qpu_latency_s", 0.2},
                                      {"qpu_jitter_s", 0.0}});
    const auto &h = rep.table.header;
    std::map<std::string, std::map<std::size_t, double>> mean;
    std::size_t failed = 0;
    for (const auto &row : rep.table.rows) {
        failed += std::stoul(row[col(h, "failed")]);
        mean[row[col(h, "backend")]][std::stoul(row[col(h, "qubits")])] =
            std::stod(row[col(h, "mean_s")]);
    }
    const double ratio = mean["local"][16] / mean["local"][12];
    double lo = 1e300, hi = 0;
    for (const auto &[q, m] : mean["qpu_sim"]) {
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    const double spread = (hi - lo) / lo;
    return {failed == 0 && ratio >= 4 && spread <= 0.2,
            "local mean(16)/mean(12) " + fmt("%.1f", ratio) + "; qpu_sim 12..16 qubits spread " +
                fmt("%.1f", 100 * spread) + "% (" + fmt("%.3f", lo) + ".." + fmt("%.3f", hi) +
                " s)"};
}

// 8 ---------------------------------------------------------------------------
Outcome cut_speedup() {
    const auto rep = run("cut", {{"cluster_sizes", {6, 6}},
                                 {"reps", 1},
                                 {"shots", 0},
                                 {"workers", {1, 4}},
                                 {"backend", "qpu_sim"},
                                 {"qpu_latency_s", 0.02}});
    const auto &h = rep.table.header;
    std::map<std::string, double> exec;
    double worst = 0.0;
    std::string subexperiments;
    for (const auto &row : rep.table.rows) {
        worst = std::max(worst, std::stod(row[col(h, "abs_error")]));
        if (row[col(h, "config")] == "cut") {
            exec[row[col(h, "workers")]] = std::stod(row[col(h, "exec_s")]);
            subexperiments = row[col(h, "subexperiments")];
        }
    }
    return {exec["4"] < exec["1"] / 1.3 && worst <= 1e-9,
            "[6,6] exact, " + subexperiments + " subexperiments; execute " +
                fmt("%.3f", exec["1"]) + " s (1 worker) vs " + fmt("%.3f", exec["4"]) +
                " s (4 workers), speedup " + fmt("%.2f", exec["1"] / exec["4"]) +
                "; max |err| " + fmt("%.1e", worst)};
}

// 9 ---------------------------------------------------------------------------
Outcome vqc() {
    const auto rep = run("vqc", {{"n_qubits", 4}, {"layers", 2}, {"samples", 200}, {"epochs", 50}});
    const auto &rows = rep.table.rows;
    const double loss0 = std::stod(rows.front()[1]);
    const double loss1 = std::stod(rows.back()[1]);
    const double acc = std::stod(rows.back()[2]);

    // linearity: summed mini-batch gradients vs one full-batch task
    const auto data = bench::make_blobs(200, 4, 0.8, 0.35, 7);
    const auto theta = qsim::random_angles(qsim::sel_param_count(4, 2), 99);
    PilotManager m(ManagerOptions::defaults());
    PilotDescription d;
    d.name = "lin";
    d.cores_per_node = 4;
    m.create_pilot(d);
    std::vector<std::vector<std::size_t>> batches(10);
    std::vector<std::size_t> all(200);
    for (std::size_t i = 0; i < 200; ++i) {
        batches[i / 20].push_back(i);
        all[i] = i;
    }
    const auto parts = bench::vqc_batches(m, data, batches, 2, theta, "part");
    const auto whole = bench::vqc_batches(m, data, {all}, 2, theta, "whole").front();
    double gap = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        double s = 0.0;
        for (const auto &p : parts) {
            s += p.gradient[k];
        }
        gap = std::max(gap, std::abs(s - whole.gradient[k]));
    }
    return {acc >= 0.9 && loss1 < loss0 && gap <= 1e-9,
            "final train accuracy " + fmt("%.3f", acc) + "; loss " + fmt("%.4f", loss0) +
                " -> " + fmt("%.4f", loss1) + "; batch-sum vs full gradient " +
                fmt("%.1e", gap)};
}

// 10 --------------------------------------------------------------------------
int run_binary(const std::string &args, const std::filesystem::path &stdout_to) {
    const std::string cmd =
        std::string(PQ_BINARY) + " " + args + " >" + stdout_to.string() + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string value_columns(const std::filesystem::path &csv) {
    std::ifstream f(csv);
    const auto rows = parse_csv(std::string(std::istreambuf_iterator<char>(f), {}));
    if (rows.empty()) {
        return "";
    }
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < rows[0].size(); ++i) {
        const auto &name = rows[0][i];
        const bool timing = name.ends_with("_s") || name.ends_with("_ms");
        if (!timing) {
            keep.push_back(i);
        }
    }
    std::string out;
    for (const auto &row : rows) {
        for (auto i : keep) {
            out += (i < row.size() ? row[i] : "") + ",";
        }
        out += "\n";
    }
    return out;
}

Outcome determinism() {
    const auto dir = std::filesystem::temp_directory_path() / "pq-acceptance";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const std::vector<std::pair<std::string, std::string>> commands{
        {"throughput", "--tasks 256,1024"},
        {"circuits", "--qubits-max 10 --count 4 --latency 0.01"},
        {"gradients", "--n-max 8"},
        {"cut", "--clusters 4,4 --shots 500 --latency 0.005"},
        {"vqc", "--epochs 5"},
    };
    std::vector<std::string> bad;
    for (const auto &[cmd, args] : commands) {
        std::string runs[2];
        for (int i = 0; i < 2; ++i) {
            const auto csv = dir / (cmd + std::to_string(i) + ".csv");
            const auto log = dir / (cmd + std::to_string(i) + ".jsonl");
            const int rc = run_binary(cmd + " " + args + " --seed 11 --out " + csv.string() +
                                          " --log " + log.string(),
                                      dir / "stdout.txt");
            runs[i] = rc == 0 ? value_columns(csv) : "exit " + std::to_string(rc);
        }
        if (runs[0] != runs[1] || runs[0].rfind("exit", 0) == 0 || runs[0].empty()) {
            bad.push_back(cmd);
        }
    }
    // status replays the same log identically
    std::string snaps[2];
    for (int i = 0; i < 2; ++i) {
        const auto out = dir / ("status" + std::to_string(i) + ".json");
        if (run_binary("status --log " + (dir / "cut0.jsonl").string(), out) == 0) {
            std::ifstream f(out);
            snaps[i] = std::string(std::istreambuf_iterator<char>(f), {});
        }
    }
    if (snaps[0].empty() || snaps[0] != snaps[1]) {
        bad.push_back("status");
    }
    std::string detail = "6 subcommands run twice with --seed 11";
    for (const auto &b : bad) {
        detail += "; differs: " + b;
    }
    return {bad.empty(), detail};
}

} // namespace

int main(int argc, char **argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"cut reconstruction matches uncut simulation", cut_oracle},
        {"wire-cut identity on random density matrices", wire_identity},
        {"sampling overhead law and shot scaling", overhead_law},
        {"adjoint gradients vs finite differences", adjoint_gradients},
        {"scheduler safety and balance", scheduler_safety},
        {"throughput benchmark", throughput},
        {"circuit execution scaling shape", circuit_scaling},
        {"cutting parallel speedup", cut_speedup},
        {"VQC training", vqc},
        {"determinism of CSV value columns", determinism},
    };
    std::set<std::size_t> only;
    for (int i = 1; i < argc; ++i) {
        only.insert(std::strtoul(argv[i], nullptr, 10));
    }
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!only.empty() && !only.count(i + 1)) {
            continue;
        }
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception &e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failures ? 1 : 0;
}
