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

#include "pilotq/pq.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "pilotq/bench.hpp"
#include "pilotq/error.hpp"
#include "pilotq/manager.hpp"

struct pq_manager {
    std::unique_ptr<pilotq::PilotManager> rep;
};

namespace {

thread_local std::string g_last_error;

using pilotq::ErrorCode;
using nlohmann::json;

char *dup(const std::string &s) {
    auto *out = static_cast<char *>(std::malloc(s.size() + 1));
    if (out) {
        std::memcpy(out, s.c_str(), s.size() + 1);
    }
    return out;
}

pq_status fail(pq_status status, const std::string &message) {
    g_last_error = message;
    return status;
}

json parse(const char *text, const char *what) {
    if (!text) {
        throw pilotq::Error(ErrorCode::Validation, std::string(what) + " is NULL");
    }
    try {
        return json::parse(text);
    } catch (const json::exception &e) {
        throw pilotq::Error(ErrorCode::Validation,
                            std::string(what) + " is not valid JSON: " + e.what());
    }
}

void put(char **out, const std::string &s) {
    if (out) {
        *out = dup(s);
    }
}

// Runs `fn`, translating every exception into a status code.
template <class Fn>
pq_status guarded(Fn &&fn) {
    try {
        fn();
        g_last_error.clear();
        return PQ_OK;
    } catch (const pilotq::Error &e) {
        return fail(static_cast<pq_status>(e.code()), e.what());
    } catch (const json::exception &e) {
        return fail(PQ_ERR_VALIDATION, std::string("Validation: ") + e.what());
    } catch (const std::bad_alloc &) {
        return fail(PQ_ERR_INTERNAL, "Internal: out of memory");
    } catch (const std::exception &e) {
        return fail(PQ_ERR_INTERNAL, std::string("Internal: ") + e.what());
    } catch (...) {
        return fail(PQ_ERR_INTERNAL, "Internal: unknown exception");
    }
}

pq_status need_manager(const pq_manager *m) {
    return m && m->rep ? PQ_OK : fail(PQ_ERR_VALIDATION, "Validation: manager is NULL");
}

} // namespace

extern "C" {

const char *pq_version(void) { return "0.1.0"; }

const char *pq_last_error(void) { return g_last_error.c_str(); }

const char *pq_status_name(pq_status status) {
    if (status == PQ_OK) {
        return "OK";
    }
    if (status < PQ_ERR_VALIDATION || status > PQ_ERR_INTERNAL) {
        return "Unknown";
    }
    return pilotq::to_string(static_cast<ErrorCode>(status)).data();
}

int pq_status_is_validation(pq_status status) { return status == PQ_ERR_VALIDATION; }

void pq_free_string(char *s) { std::free(s); }

pq_status pq_manager_create(const char *options_json, pq_manager **out) {
    if (!out) {
        return fail(PQ_ERR_VALIDATION, "Validation: out is NULL");
    }
    *out = nullptr;
    return guarded([&] {
        const json j = options_json ? parse(options_json, "options") : json::object();
        auto opts = pilotq::ManagerOptions::defaults();
        opts.auto_schedule = j.value("auto_schedule", true);
        opts.dispatch_window = j.value("dispatch_window", std::size_t{0});
        if (j.contains("memory_cap_mb")) {
            opts.memory_cap =
                static_cast<std::uint64_t>(j.at("memory_cap_mb").get<double>() * 1024 * 1024);
        }
        if (j.contains("log")) {
            opts.log = std::make_shared<pilotq::EventLog>(
                opts.clock, std::filesystem::path(j.at("log").get<std::string>()));
        }
        auto handle = std::make_unique<pq_manager>();
        handle->rep = std::make_unique<pilotq::PilotManager>(std::move(opts));
        *out = handle.release();
    });
}

void pq_manager_destroy(pq_manager *m) { delete m; }

pq_status pq_manager_create_pilot(pq_manager *m, const char *pilot_json, size_t workers,
                                  char **name_out) {
    if (auto s = need_manager(m)) {
        return s;
    }
    return guarded([&] {
        const auto desc = parse(pilot_json, "pilot").get<pilotq::PilotDescription>();
        put(name_out, m->rep->create_pilot(desc, workers));
    });
}

pq_status pq_manager_remove_pilot(pq_manager *m, const char *name, int drain,
                                  char **metrics_json_out) {
    if (auto s = need_manager(m)) {
        return s;
    }
    if (!name) {
        return fail(PQ_ERR_VALIDATION, "Validation: name is NULL");
    }
    return guarded([&] {
        put(metrics_json_out, json(m->rep->remove_pilot(name, drain != 0)).dump());
    });
}

pq_status pq_manager_submit_task(pq_manager *m, const char *task_json, char **id_out) {
    if (auto s = need_manager(m)) {
        return s;
    }
    return guarded([&] {
        const auto desc = parse(task_json, "task").get<pilotq::TaskDescription>();
        put(id_out, m->rep->submit_task(desc));
    });
}

pq_status pq_manager_schedule_pending(pq_manager *m, char **assignments_json_out) {
    if (auto s = need_manager(m)) {
        return s;
    }
    return guarded([&] {
        json out = json::array();
        for (const auto &a : m->rep->schedule_pending()) {
            out.push_back({{"task_id", a.task_id}, {"pilot", a.pilot}});
        }
        put(assignments_json_out, out.dump());
    });
}

pq_status pq_manager_wait(pq_manager *m, const char *ids_json, double timeout_s,
                          int *complete_out, char **records_json_out) {
    if (auto s = need_manager(m)) {
        return s;
    }
    return guarded([&] {
        const auto ids = parse(ids_json, "ids").get<std::vector<std::string>>();
        const auto res = m->rep->wait(ids, timeout_s);
        if (complete_out) {
            *complete_out = res.complete ? 1 : 0;
        }
        put(records_json_out, json(res.records).dump());
    });
}

pq_status pq_manager_cancel(pq_manager *m, const char *task_id, int *canceled_out,
                            char **record_json_out) {
    if (auto s = need_manager(m)) {
        return s;
    }
    if (!task_id) {
        return fail(PQ_ERR_VALIDATION, "Validation: task_id is NULL");
    }
    return guarded([&] {
        const auto res = m->rep->cancel(task_id);
        if (canceled_out) {
            *canceled_out = res.canceled ? 1 : 0;
        }
        put(record_json_out, json(res.record).dump());
    });
}

pq_status pq_manager_task(pq_manager *m, const char *task_id, char **record_json_out) {
    if (auto s = need_manager(m)) {
        return s;
    }
    if (!task_id) {
        return fail(PQ_ERR_VALIDATION, "Validation: task_id is NULL");
    }
    return guarded([&] { put(record_json_out, json(m->rep->record(task_id)).dump()); });
}

pq_status pq_manager_status(pq_manager *m, char **status_json_out) {
    if (auto s = need_manager(m)) {
        return s;
    }
    return guarded([&] { put(status_json_out, m->rep->status().dump()); });
}

pq_status pq_run_workload(const char *command, const char *config_json,
                          char **report_json_out) {
    if (!command) {
        return fail(PQ_ERR_VALIDATION, "Validation: command is NULL");
    }
    return guarded([&] {
        const json cfg = config_json ? parse(config_json, "config") : json::object();
        put(report_json_out, pilotq::bench::run_command(command, cfg).dump());
    });
}

pq_status pq_status_from_log(const char *path, char **status_json_out) {
    if (!path) {
        return fail(PQ_ERR_VALIDATION, "Validation: path is NULL");
    }
    return guarded([&] {
        put(status_json_out, pilotq::bench::status(std::filesystem::path(path)).dump());
    });
}

} // extern "C"
