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

#include "pilotq/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "pilotq/cutting.hpp"
#include "pilotq/error.hpp"
#include "pilotq/event_log.hpp"
#include "pilotq/qsim/ansatz.hpp"
#include "pilotq/qsim/simulator.hpp"

namespace pilotq::bench {

namespace {

using Stopwatch = std::chrono::steady_clock;

double since(Stopwatch::time_point t0) {
    return std::chrono::duration<double>(Stopwatch::now() - t0).count();
}

std::string num(double v, const char *fmt = "%.10g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string secs(double v) { return num(v, "%.6f"); }

std::string join(const std::vector<std::string> &cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) {
            out += ',';
        }
        out += cells[i];
    }
    return out;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

template <class T>
void read(const nlohmann::json &j, const char *key, T &field) {
    if (j.contains(key) && !j.at(key).is_null()) {
        field = j.at(key).get<T>();
    }
}

std::string pilot_name(const std::string &prefix, std::size_t i) {
    return prefix + "-p" + std::to_string(i);
}

struct Tally {
    std::uint64_t done{0}, failed{0}, canceled{0};
};

Tally tally(const WaitResult &res) {
    Tally t;
    for (const auto &[id, r] : res.records) {
        t.done += r.state == TaskState::Done;
        t.failed += r.state == TaskState::Failed;
        t.canceled += r.state == TaskState::Canceled;
    }
    return t;
}

void add(RunMetrics &m, const Tally &t, std::size_t total) {
    m.tasks_total += total;
    m.tasks_done += t.done;
    m.tasks_failed += t.failed;
    m.tasks_canceled += t.canceled;
}

void drain_all(PilotManager &m) {
    for (const auto &name : m.pilot_names()) {
        m.remove_pilot(name, true);
    }
}

double mean_of(const std::vector<double> &v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double> &v) {
    const double mu = mean_of(v);
    double ss = 0.0;
    for (double x : v) {
        ss += (x - mu) * (x - mu);
    }
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

bool mentions(const std::optional<std::string> &error, const char *what) {
    return error && error->find(what) != std::string::npos;
}

} // namespace

std::string Table::to_csv() const {
    std::string out = join(header) + "\n";
    for (const auto &r : rows) {
        out += join(r) + "\n";
    }
    return out;
}

std::string Table::value_csv() const {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (!timing_columns.count(header[i])) {
            keep.push_back(i);
        }
    }
    const auto pick = [&](const std::vector<std::string> &row) {
        std::vector<std::string> out;
        for (auto i : keep) {
            out.push_back(i < row.size() ? row[i] : "");
        }
        return join(out);
    };
    std::string out = pick(header) + "\n";
    for (const auto &r : rows) {
        out += pick(r) + "\n";
    }
    return out;
}

void Table::write(const std::filesystem::path &path) const {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    require(f.good(), ErrorCode::Io, "cannot open " + path.string() + " for writing");
    f << to_csv();
    f.flush();
    require(f.good(), ErrorCode::Io, "write failed on " + path.string());
}

Session::Session(const Common &common)
    : common_(common), clock_(std::make_shared<SteadyClock>()) {
    log_ = common.log ? std::make_shared<EventLog>(clock_, *common.log)
                      : std::make_shared<EventLog>(clock_);
}

ManagerOptions Session::options(bool auto_schedule) const {
    ManagerOptions o;
    o.clock = clock_;
    o.log = log_;
    o.backends = std::make_shared<BackendRegistry>(clock_);
    o.functions = FunctionRegistry::with_builtins();
    o.memory_cap = common_.memory_cap_bytes;
    o.auto_schedule = auto_schedule;
    return o;
}

void from_json(const nlohmann::json &j, Common &c) {
    if (j.contains("out") && !j.at("out").is_null()) {
        c.out = j.at("out").get<std::string>();
    }
    if (j.contains("log") && !j.at("log").is_null()) {
        c.log = j.at("log").get<std::string>();
    }
    read(j, "seed", c.seed);
    if (j.contains("memory_cap_mb")) {
        const double mb = j.at("memory_cap_mb").get<double>();
        require(mb > 0, ErrorCode::Validation, "memory_cap_mb must be > 0");
        c.memory_cap_bytes = static_cast<std::uint64_t>(mb * 1024.0 * 1024.0);
    }
}

void from_json(const nlohmann::json &j, ThroughputConfig &c) {
    if (j.contains("tasks") && j.at("tasks").is_number()) {
        c.tasks = {j.at("tasks").get<std::size_t>()};
    } else {
        read(j, "tasks", c.tasks);
    }
    read(j, "pilots", c.pilots);
    read(j, "workers", c.workers);
}

void from_json(const nlohmann::json &j, CircuitsConfig &c) {
    read(j, "qubits_min", c.qubits_min);
    read(j, "qubits_max", c.qubits_max);
    read(j, "qubits_step", c.qubits_step);
    read(j, "count", c.count);
    read(j, "depth", c.depth);
    read(j, "shots", c.shots);
    read(j, "backends", c.backends);
    read(j, "local_workers", c.local_workers);
    read(j, "qpu_workers", c.qpu_workers);
    read(j, "qpu_latency_s", c.qpu_latency_s);
    read(j, "qpu_jitter_s", c.qpu_jitter_s);
}

void from_json(const nlohmann::json &j, GradientsConfig &c) {
    read(j, "n_min", c.n_min);
    read(j, "n_max", c.n_max);
    read(j, "n_step", c.n_step);
    read(j, "layers", c.layers);
    read(j, "fd_max_qubits", c.fd_max_qubits);
    read(j, "fd_step", c.fd_step);
}

void from_json(const nlohmann::json &j, CutConfig &c) {
    read(j, "cluster_sizes", c.cluster_sizes);
    read(j, "reps", c.reps);
    read(j, "max_width", c.max_width);
    read(j, "shots", c.shots);
    read(j, "workers", c.workers);
    read(j, "backend", c.backend);
    read(j, "qpu_latency_s", c.qpu_latency_s);
    read(j, "observable", c.observable);
}

void from_json(const nlohmann::json &j, VqcConfig &c) {
    read(j, "n_qubits", c.n_qubits);
    read(j, "layers", c.layers);
    read(j, "samples", c.samples);
    read(j, "epochs", c.epochs);
    read(j, "batch_size", c.batch_size);
    read(j, "learning_rate", c.learning_rate);
    read(j, "optimizer", c.optimizer);
    read(j, "momentum", c.momentum);
    read(j, "separation", c.separation);
    read(j, "spread", c.spread);
    read(j, "workers", c.workers);
}

double median_dispatch_interval(const std::vector<EventRecord> &events,
                                const std::string &task_prefix) {
    std::vector<double> starts;
    for (const auto &e : events) {
        if (e.event == "task_started" && e.entity_id.rfind(task_prefix, 0) == 0) {
            starts.push_back(e.ts_s);
        }
    }
    if (starts.size() < 2) {
        return 0.0;
    }
    std::sort(starts.begin(), starts.end());
    std::vector<double> gaps(starts.size() - 1);
    for (std::size_t i = 1; i < starts.size(); ++i) {
        gaps[i - 1] = starts[i] - starts[i - 1];
    }
    auto mid = gaps.begin() + static_cast<long>(gaps.size() / 2);
    std::nth_element(gaps.begin(), mid, gaps.end());
    return *mid;
}

// ---------------------------------------------------------------- throughput

Report run_throughput(const ThroughputConfig &config, Session &session) {
    require(!config.tasks.empty(), ErrorCode::Validation, "tasks must not be empty");
    for (auto n : config.tasks) {
        require(n >= 1, ErrorCode::Validation, "tasks must be >= 1");
    }
    require(config.pilots >= 1, ErrorCode::Validation, "pilots must be >= 1");
    require(config.workers >= 1, ErrorCode::Validation, "workers must be >= 1");

    Report rep;
    rep.metrics.workload = "throughput";
    rep.metrics.params = {{"pilots", std::to_string(config.pilots)},
                          {"workers", std::to_string(config.workers)}};
    rep.table.header = {"tasks",     "pilots",
                        "workers",   "done",
                        "failed",    "startup_s",
                        "runtime_s", "runtime_incl_startup_s",
                        "throughput_tasks_per_s", "median_dispatch_ms"};
    rep.table.timing_columns = {"startup_s", "runtime_s", "runtime_incl_startup_s",
                                "throughput_tasks_per_s", "median_dispatch_ms"};

    const auto t_all = Stopwatch::now();
    for (auto n : config.tasks) {
        PilotManager m(session.options());
        const std::string prefix = "n" + std::to_string(n);

        const auto t0 = Stopwatch::now();
        for (std::size_t p = 0; p < config.pilots; ++p) {
            PilotDescription d;
            d.name = pilot_name(prefix, p);
            d.backend_kind = BackendKind::Local;
            d.cores_per_node = static_cast<std::uint32_t>(config.workers);
            m.create_pilot(d);
        }
        const double startup = since(t0);

        const auto t1 = Stopwatch::now();
        for (std::size_t i = 0; i < n; ++i) {
            m.submit_task(TaskDescription::zero_compute(prefix + "-t" + std::to_string(i)));
        }
        const auto res = m.wait_all(3600);
        const double runtime = since(t1);
        require(res.complete, ErrorCode::Internal, "throughput tasks did not finish");
        const auto t = tally(res);
        drain_all(m);

        const double dispatch =
            median_dispatch_interval(session.log()->snapshot(), prefix + "-t");
        add(rep.metrics, t, n);
        rep.metrics.phases_s["startup"] += startup;
        rep.metrics.phases_s["run"] += runtime;
        rep.table.rows.push_back({std::to_string(n), std::to_string(config.pilots),
                                  std::to_string(config.workers), std::to_string(t.done),
                                  std::to_string(t.failed), secs(startup), secs(runtime),
                                  secs(startup + runtime),
                                  num(static_cast<double>(t.done) / runtime, "%.3f"),
                                  num(dispatch * 1e3, "%.4f")});
    }
    rep.metrics.finish(since(t_all));
    return rep;
}

// ------------------------------------------------------------------ circuits

Report run_circuits(const CircuitsConfig &config, Session &session) {
    require(config.qubits_min >= 1 && config.qubits_min <= config.qubits_max,
            ErrorCode::Validation, "qubits range");
    require(config.qubits_step >= 1, ErrorCode::Validation, "qubits_step must be >= 1");
    require(config.count >= 1, ErrorCode::Validation, "count must be >= 1");
    require(!config.backends.empty(), ErrorCode::Validation, "backends must not be empty");
    require(config.qpu_latency_s >= 0 && config.qpu_jitter_s >= 0, ErrorCode::Validation,
            "qpu latency and jitter must be >= 0");
    for (const auto &b : config.backends) {
        require(b == "local" || b == "qpu_sim", ErrorCode::Validation,
                "backend must be local or qpu_sim, got '" + b + "'");
    }

    const std::uint64_t seed = session.common().seed;
    Report rep;
    rep.metrics.workload = "circuits";
    rep.metrics.params = {{"count", std::to_string(config.count)},
                          {"depth", std::to_string(config.depth)},
                          {"shots", std::to_string(config.shots)},
                          {"qpu_latency_s", num(config.qpu_latency_s)}};
    rep.table.header = {"backend", "qubits", "count", "failed", "mean_s", "std_s"};
    rep.table.timing_columns = {"mean_s", "std_s"};

    const auto t_all = Stopwatch::now();
    for (const auto &backend : config.backends) {
        PilotManager m(session.options());
        PilotDescription d;
        d.name = "circuits-" + backend;
        if (backend == "local") {
            d.backend_kind = BackendKind::Local;
            d.cores_per_node = static_cast<std::uint32_t>(config.local_workers);
        } else {
            d.backend_kind = BackendKind::QpuSim;
            d.cores_per_node = static_cast<std::uint32_t>(config.qpu_workers);
            d.qpu_qubits = static_cast<std::uint32_t>(config.qubits_max);
            d.queue_model = {0.0, config.qpu_jitter_s, config.qpu_latency_s};
            d.seed = seed;
        }
        m.create_pilot(d);

        std::vector<std::size_t> widths;
        for (auto q = config.qubits_min; q <= config.qubits_max; q += config.qubits_step) {
            widths.push_back(q);
        }
        const auto t0 = Stopwatch::now();
        std::map<std::size_t, std::vector<std::string>> ids;
        for (auto q : widths) {
            for (std::size_t i = 0; i < config.count; ++i) {
                QuantumPayload p;
                p.circuit = qsim::random_circuit(q, config.depth, mix(mix(seed, q), i));
                p.shots = config.shots;
                p.seed = mix(seed ^ 0xC1, q * 100003 + i);
                const std::string id =
                    backend + "-q" + std::to_string(q) + "-c" + std::to_string(i);
                ids[q].push_back(m.submit_task(TaskDescription::quantum(id, p)));
            }
        }
        const auto res = m.wait_all(24 * 3600);
        rep.metrics.phases_s[backend] = since(t0);
        add(rep.metrics, tally(res), widths.size() * config.count);
        drain_all(m);

        for (auto q : widths) {
            std::vector<double> times;
            std::size_t failed = 0;
            for (const auto &id : ids[q]) {
                const auto &r = res.records.at(id);
                if (r.state == TaskState::Done) {
                    times.push_back(*r.end_s - *r.start_s);
                } else {
                    ++failed;
                }
            }
            rep.table.rows.push_back(
                {backend, std::to_string(q), std::to_string(config.count),
                 std::to_string(failed), times.empty() ? "" : secs(mean_of(times)),
                 times.size() < 2 ? "" : secs(sample_std(times))});
        }
    }
    rep.metrics.finish(since(t_all));
    return rep;
}

// ----------------------------------------------------------------- gradients

Report run_gradients(const GradientsConfig &config, Session &session) {
    require(config.n_min >= 1 && config.n_min <= config.n_max, ErrorCode::Validation,
            "n range");
    require(config.n_step >= 1, ErrorCode::Validation, "n_step must be >= 1");
    require(config.layers >= 1, ErrorCode::Validation, "layers must be >= 1");
    require(config.fd_step > 0, ErrorCode::Validation, "fd_step must be > 0");

    const std::uint64_t seed = session.common().seed;
    const std::uint64_t cap = session.common().memory_cap_bytes;
    Report rep;
    rep.metrics.workload = "gradients";
    rep.metrics.params = {{"layers", std::to_string(config.layers)},
                          {"memory_cap_bytes", std::to_string(cap)},
                          {"max_qubits_expect", std::to_string(qsim::max_qubits(cap))},
                          {"max_qubits_grad",
                           std::to_string(qsim::max_qubits(cap, qsim::kGradientStateCopies))}};
    rep.table.header = {"n", "params", "expect_s", "grad_s", "grad_fd_max_rel_err", "status"};
    rep.table.timing_columns = {"expect_s", "grad_s"};

    PilotManager m(session.options());
    PilotDescription d;
    d.name = "gradients";
    d.backend_kind = BackendKind::Local;
    m.create_pilot(d);

    const auto t_all = Stopwatch::now();
    for (auto n = config.n_min; n <= config.n_max; n += config.n_step) {
        const auto theta = qsim::random_angles(qsim::sel_param_count(n, config.layers),
                                               mix(seed, n));
        QuantumPayload p;
        p.circuit = qsim::sel_circuit(n, config.layers, theta);
        p.observables = {qsim::PauliObservable::z_on(0, n)};
        const std::string base = "g-n" + std::to_string(n);
        m.submit_task(TaskDescription::quantum(base + "-e", p));
        p.gradient = true;
        m.submit_task(TaskDescription::quantum(base + "-g", p));
        const auto res = m.wait({base + "-e", base + "-g"}, 24 * 3600);
        add(rep.metrics, tally(res), 2);
        const auto &e = res.records.at(base + "-e");
        const auto &g = res.records.at(base + "-g");

        const auto oom = [](const TaskRecord &r) {
            return mentions(r.error, "MemoryCapExceeded") || mentions(r.error, "NoFeasiblePilot");
        };
        std::string status = "ok";
        if (e.state != TaskState::Done) {
            status = oom(e) ? "oom" : "error";
        } else if (g.state != TaskState::Done) {
            status = oom(g) ? "grad:oom" : "grad:error";
        }

        std::string rel_err;
        if (g.state == TaskState::Done && n <= config.fd_max_qubits) {
            const auto &adj = g.result->gradient;
            double diff = 0.0, scale = 0.0;
            auto shifted = theta;
            for (std::size_t k = 0; k < theta.size(); ++k) {
                const auto value_at = [&](double v) {
                    shifted[k] = v;
                    auto c = p.circuit;
                    c.bind(shifted);
                    return qsim::expectation(qsim::run_circuit(c, cap), p.observables[0]);
                };
                const double fd = (value_at(theta[k] + config.fd_step) -
                                   value_at(theta[k] - config.fd_step)) /
                                  (2 * config.fd_step);
                shifted[k] = theta[k];
                diff = std::max(diff, std::abs(adj[k] - fd));
                scale = std::max(scale, std::abs(fd));
            }
            rel_err = num(diff / std::max(scale, 1e-12), "%.3e");
        }
        rep.table.rows.push_back(
            {std::to_string(n), std::to_string(theta.size()),
             e.state == TaskState::Done ? secs(e.result->exec_s) : "",
             g.state == TaskState::Done ? secs(g.result->exec_s) : "", rel_err, status});
    }
    drain_all(m);
    rep.metrics.phases_s["run"] = since(t_all);
    rep.metrics.finish(since(t_all));
    return rep;
}

// ----------------------------------------------------------------------- cut

Report run_cut(const CutConfig &config, Session &session) {
    require(!config.cluster_sizes.empty(), ErrorCode::Validation,
            "cluster_sizes must not be empty");
    require(!config.workers.empty(), ErrorCode::Validation, "workers must not be empty");
    for (auto w : config.workers) {
        require(w >= 1, ErrorCode::Validation, "workers must be >= 1");
    }
    require(config.backend == "local" || config.backend == "qpu_sim", ErrorCode::Validation,
            "backend must be local or qpu_sim");

    const std::uint64_t seed = session.common().seed;
    const std::uint64_t cap = session.common().memory_cap_bytes;
    const std::size_t n =
        std::accumulate(config.cluster_sizes.begin(), config.cluster_sizes.end(), std::size_t{0});
    const std::size_t max_width =
        config.max_width ? config.max_width
                         : *std::max_element(config.cluster_sizes.begin(),
                                             config.cluster_sizes.end()) + 1;
    const auto circuit = cut::clustered_circuit(config.cluster_sizes, config.reps, seed);
    const auto observable =
        qsim::PauliObservable::single(config.observable.empty() ? std::string(n, 'Z')
                                                                : config.observable);
    require(observable.num_qubits() == n, ErrorCode::DimensionMismatch,
            "observable has " + std::to_string(observable.num_qubits()) +
                " qubits, circuit has " + std::to_string(n));

    Report rep;
    rep.metrics.workload = "cut";
    rep.table.header = {"config",  "workers", "subexperiments", "exec_s",
                        "total_s", "value",   "oracle_value",   "abs_error"};
    rep.table.timing_columns = {"exec_s", "total_s"};

    const auto t_all = Stopwatch::now();
    const auto t0 = Stopwatch::now();
    const double oracle = qsim::expectation(qsim::run_circuit(circuit, cap), observable);
    const double baseline_s = since(t0);
    rep.metrics.phases_s["baseline"] = baseline_s;
    rep.table.rows.push_back({"baseline", "1", "1", secs(baseline_s), secs(baseline_s),
                              num(oracle, "%.12f"), num(oracle, "%.12f"), num(0.0, "%.3e")});

    const auto plan = cut::find_cuts(circuit, max_width);
    rep.metrics.params = {{"n", std::to_string(n)},
                          {"k", std::to_string(plan.k())},
                          {"max_width", std::to_string(max_width)},
                          {"shots", std::to_string(config.shots)},
                          {"backend", config.backend},
                          {"sampling_overhead", num(cut::sampling_overhead(plan))}};

    if (plan.k() > 0) {
        for (auto w : config.workers) {
            PilotManager m(session.options());
            PilotDescription d;
            d.name = "cut-w" + std::to_string(w);
            d.cores_per_node = static_cast<std::uint32_t>(w);
            if (config.backend == "qpu_sim") {
                d.backend_kind = BackendKind::QpuSim;
                d.qpu_qubits = static_cast<std::uint32_t>(max_width);
                d.queue_model = {0.0, 0.0, config.qpu_latency_s};
                d.seed = seed;
            }
            m.create_pilot(d);

            cut::WorkflowOptions opts;
            opts.max_width = max_width;
            opts.mode = {config.shots, seed};
            opts.task_prefix = "w" + std::to_string(w);
            const auto r = cut::run_cut_workflow(m, circuit, observable, opts);
            drain_all(m);

            double total = 0.0;
            for (const auto &[phase, s] : r.metrics.phases_s) {
                total += s;
            }
            const double exec = r.metrics.phases_s.at("execute");
            rep.metrics.merge(r.metrics);
            rep.metrics.params["subexperiments"] = std::to_string(r.subexperiments);
            rep.table.rows.push_back({"cut", std::to_string(w), std::to_string(r.subexperiments),
                                      secs(exec), secs(total), num(r.value, "%.12f"),
                                      num(oracle, "%.12f"),
                                      num(std::abs(r.value - oracle), "%.3e")});
        }
    }
    rep.metrics.finish(since(t_all));
    return rep;
}

// ----------------------------------------------------------------------- vqc

Dataset make_blobs(std::size_t samples, std::size_t dim, double separation, double spread,
                   std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, spread);
    Dataset d;
    for (std::size_t i = 0; i < samples; ++i) {
        const int label = static_cast<int>(i % 2);
        const double centre = label ? separation : -separation;
        std::vector<double> x(dim);
        for (auto &v : x) {
            v = centre + noise(rng);
        }
        d.features.push_back(std::move(x));
        d.labels.push_back(label);
    }
    return d;
}

qsim::Circuit vqc_circuit(const std::vector<double> &features, std::size_t layers,
                          const std::vector<double> &theta) {
    const std::size_t n = features.size();
    qsim::Circuit c(n);
    for (std::size_t q = 0; q < n; ++q) {
        c.ry(q, features[q]);
    }
    const auto body = qsim::sel_circuit(n, layers, theta);
    c.gates.insert(c.gates.end(), body.gates.begin(), body.gates.end());
    return c;
}

nlohmann::json vqc_task_args(const Dataset &data, const std::vector<std::size_t> &indices,
                             std::size_t layers, const std::vector<double> &theta,
                             std::uint64_t memory_cap) {
    const std::size_t n = data.features.front().size();
    nlohmann::json circuits = nlohmann::json::array();
    for (auto i : indices) {
        circuits.push_back(vqc_circuit(data.features[i], layers, theta));
    }
    return {{"circuits", circuits},
            {"observables",
             {qsim::PauliObservable::z_on(0, n), qsim::PauliObservable::z_on(1, n)}},
            {"memory_cap", memory_cap}};
}

BatchGradient vqc_batch_from_jacobian(const nlohmann::json &result,
                                      const std::vector<int> &labels,
                                      std::size_t num_params) {
    const auto &values = result.at("values");
    const auto &jacobians = result.at("jacobians");
    require(values.size() == labels.size(), ErrorCode::DimensionMismatch,
            "jacobian result has " + std::to_string(values.size()) + " rows for " +
                std::to_string(labels.size()) + " labels");
    BatchGradient out;
    out.gradient.assign(num_params, 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double z0 = values[i][0].get<double>();
        const double z1 = values[i][1].get<double>();
        const double top = std::max(z0, z1);
        const double e0 = std::exp(z0 - top), e1 = std::exp(z1 - top);
        const double p[2] = {e0 / (e0 + e1), e1 / (e0 + e1)};
        const int y = labels[i];
        out.loss_sum += -std::log(p[y]);
        out.correct += (z1 > z0 ? 1 : 0) == y;
        ++out.count;
        for (int c = 0; c < 2; ++c) {
            const double w = p[c] - (c == y ? 1.0 : 0.0);
            const auto row = jacobians[i][c].get<std::vector<double>>();
            for (std::size_t k = 0; k < num_params; ++k) {
                out.gradient[k] += w * row[k];
            }
        }
    }
    return out;
}

std::vector<BatchGradient> vqc_batches(PilotManager &manager, const Dataset &data,
                                       const std::vector<std::vector<std::size_t>> &batches,
                                       std::size_t layers, const std::vector<double> &theta,
                                       const std::string &id_prefix) {
    std::vector<std::string> ids;
    for (std::size_t b = 0; b < batches.size(); ++b) {
        ids.push_back(manager.submit_task(TaskDescription::classical(
            id_prefix + "-b" + std::to_string(b), "qsim.jacobian",
            vqc_task_args(data, batches[b], layers, theta, qsim::kDefaultMemoryCapBytes))));
    }
    const auto res = manager.wait(ids, 24 * 3600);
    std::vector<BatchGradient> out;
    for (std::size_t b = 0; b < batches.size(); ++b) {
        const auto &r = res.records.at(ids[b]);
        require(r.state == TaskState::Done, ErrorCode::Internal,
                "gradient task " + ids[b] + " ended " + std::string(to_string(r.state)) +
                    (r.error ? ": " + *r.error : ""));
        std::vector<int> labels;
        for (auto i : batches[b]) {
            labels.push_back(data.labels[i]);
        }
        out.push_back(vqc_batch_from_jacobian(r.result->data, labels, theta.size()));
    }
    return out;
}

Report run_vqc(const VqcConfig &config, Session &session) {
    require(config.n_qubits >= 2, ErrorCode::Validation, "n_qubits must be >= 2");
    require(config.layers >= 1, ErrorCode::Validation, "layers must be >= 1");
    require(config.samples >= 2, ErrorCode::Validation, "samples must be >= 2");
    require(config.batch_size >= 1, ErrorCode::Validation, "batch_size must be >= 1");
    require(config.learning_rate > 0, ErrorCode::Validation, "learning_rate must be > 0");
    require(config.optimizer == "gd" || config.optimizer == "momentum", ErrorCode::Validation,
            "optimizer must be gd or momentum");
    require(config.workers >= 1, ErrorCode::Validation, "workers must be >= 1");

    const std::uint64_t seed = session.common().seed;
    const auto data =
        make_blobs(config.samples, config.n_qubits, config.separation, config.spread, seed);
    auto theta = qsim::random_angles(qsim::sel_param_count(config.n_qubits, config.layers),
                                     mix(seed, 1));
    std::vector<double> velocity(theta.size(), 0.0);

    PilotManager m(session.options());
    PilotDescription d;
    d.name = "vqc";
    d.cores_per_node = static_cast<std::uint32_t>(config.workers);
    m.create_pilot(d);

    Report rep;
    rep.metrics.workload = "vqc";
    rep.table.header = {"epoch", "loss", "train_accuracy"};

    std::vector<std::size_t> order(config.samples);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto evaluate = [&](const std::string &tag) {
        std::vector<std::vector<std::size_t>> chunks;
        for (std::size_t i = 0; i < order.size(); i += config.batch_size) {
            chunks.emplace_back(order.begin() + static_cast<long>(i),
                                order.begin() +
                                    static_cast<long>(std::min(order.size(), i + config.batch_size)));
        }
        double loss = 0.0;
        std::size_t correct = 0;
        for (const auto &b : vqc_batches(m, data, chunks, config.layers, theta, tag)) {
            loss += b.loss_sum;
            correct += b.correct;
        }
        rep.metrics.tasks_total += chunks.size();
        rep.metrics.tasks_done += chunks.size();
        return std::pair{loss / static_cast<double>(config.samples),
                         static_cast<double>(correct) / static_cast<double>(config.samples)};
    };

    const auto t_all = Stopwatch::now();
    const auto [loss0, acc0] = evaluate("vqc-init");
    rep.metrics.params["initial_loss"] = num(loss0, "%.10f");
    rep.metrics.params["initial_accuracy"] = num(acc0, "%.4f");

    std::mt19937_64 rng(mix(seed, 2));
    const auto t_train = Stopwatch::now();
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double loss = 0.0;
        std::size_t correct = 0;
        for (std::size_t i = 0, b = 0; i < order.size(); i += config.batch_size, ++b) {
            const std::vector<std::size_t> batch(
                order.begin() + static_cast<long>(i),
                order.begin() + static_cast<long>(std::min(order.size(), i + config.batch_size)));
            const auto g = vqc_batches(m, data, {batch}, config.layers, theta,
                                       "vqc-e" + std::to_string(epoch) + "-b" +
                                           std::to_string(b))
                               .front();
            rep.metrics.tasks_total += 1;
            rep.metrics.tasks_done += 1;
            loss += g.loss_sum;
            correct += g.correct;
            const double scale = 1.0 / static_cast<double>(g.count);
            for (std::size_t k = 0; k < theta.size(); ++k) {
                const double step = config.learning_rate * g.gradient[k] * scale;
                if (config.optimizer == "momentum") {
                    velocity[k] = config.momentum * velocity[k] + step;
                    theta[k] -= velocity[k];
                } else {
                    theta[k] -= step;
                }
            }
        }
        loss /= static_cast<double>(config.samples);
        require(std::isfinite(loss), ErrorCode::Divergence,
                "loss became " + num(loss) + " in epoch " + std::to_string(epoch) +
                    "; lower learning_rate (now " + num(config.learning_rate) + ")");
        rep.table.rows.push_back(
            {std::to_string(epoch), num(loss, "%.10f"),
             num(static_cast<double>(correct) / static_cast<double>(config.samples), "%.4f")});
    }
    rep.metrics.phases_s["train"] = since(t_train);

    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto [loss1, acc1] = evaluate("vqc-final");
    rep.metrics.params["final_loss"] = num(loss1, "%.10f");
    rep.metrics.params["final_accuracy"] = num(acc1, "%.4f");
    rep.metrics.params["params"] = std::to_string(theta.size());
    drain_all(m);
    rep.metrics.finish(since(t_all));
    return rep;
}

// -------------------------------------------------------------------- status

nlohmann::json status(const std::optional<std::filesystem::path> &log) {
    if (!log) {
        PilotManager m(ManagerOptions::defaults());
        return m.status();
    }
    require(std::filesystem::exists(*log), ErrorCode::NoActiveSession,
            "no session log at " + log->string());
    return replay_status(read_jsonl(*log));
}

// ------------------------------------------------------------------ dispatch

namespace {

const std::map<std::string, std::set<std::string>> &command_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"throughput", {"tasks", "pilots", "workers"}},
        {"circuits",
         {"qubits_min", "qubits_max", "qubits_step", "count", "depth", "shots", "backends",
          "local_workers", "qpu_workers", "qpu_latency_s", "qpu_jitter_s"}},
        {"gradients", {"n_min", "n_max", "n_step", "layers", "fd_max_qubits", "fd_step"}},
        {"cut",
         {"cluster_sizes", "reps", "max_width", "shots", "workers", "backend",
          "qpu_latency_s", "observable"}},
        {"vqc",
         {"n_qubits", "layers", "samples", "epochs", "batch_size", "learning_rate",
          "optimizer", "momentum", "separation", "spread", "workers"}},
        {"status", {}},
    };
    return keys;
}

template <class Config>
Config parse(const nlohmann::json &j) {
    try {
        return j.get<Config>();
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::Validation, std::string("bad config value: ") + e.what());
    }
}

} // namespace

nlohmann::json run_command(const std::string &command, const nlohmann::json &config) {
    const auto &keys = command_keys();
    const auto it = keys.find(command);
    require(it != keys.end(), ErrorCode::Validation, "unknown command '" + command + "'");
    require(config.is_object() || config.is_null(), ErrorCode::Validation,
            "config must be a JSON object");
    const nlohmann::json cfg = config.is_null() ? nlohmann::json::object() : config;
    static const std::set<std::string> common{"out", "log", "seed", "memory_cap_mb"};
    for (const auto &[key, value] : cfg.items()) {
        require(common.count(key) || it->second.count(key), ErrorCode::Validation,
                "unknown key '" + key + "' for " + command);
    }
    const auto c = parse<Common>(cfg);

    if (command == "status") {
        return {{"status", status(c.log)}};
    }

    Session session(c);
    Report rep;
    if (command == "throughput") {
        rep = run_throughput(parse<ThroughputConfig>(cfg), session);
    } else if (command == "circuits") {
        rep = run_circuits(parse<CircuitsConfig>(cfg), session);
    } else if (command == "gradients") {
        rep = run_gradients(parse<GradientsConfig>(cfg), session);
    } else if (command == "cut") {
        rep = run_cut(parse<CutConfig>(cfg), session);
    } else {
        rep = run_vqc(parse<VqcConfig>(cfg), session);
    }
    rep.metrics.params["seed"] = std::to_string(c.seed);
    session.log()->flush();
    if (c.out) {
        rep.table.write(*c.out);
    }
    return {{"metrics", rep.metrics},
            {"csv", rep.table.to_csv()},
            {"timing_columns", rep.table.timing_columns}};
}

} // namespace pilotq::bench
