// Copyright 2026 The qudsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qud/experiment.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace qud {

using Json = nlohmann::ordered_json;

namespace {

constexpr const char *kVersion = "0.1.0";

double number_field(const Json &obj, const std::string &key, const std::string &path) {
    const Json &v = obj.at(key);
    if (!v.is_number()) {
        throw ConfigError(path, "must be a number");
    }
    double x = v.get<double>();
    if (!std::isfinite(x)) {
        throw ConfigError(path, "must be finite");
    }
    return x;
}

std::optional<double> optional_number(const Json &obj, const std::string &key, const std::string &path) {
    if (!obj.contains(key)) {
        return std::nullopt;
    }
    return number_field(obj, key, path);
}

uint64_t integer_field(const Json &obj, const std::string &key, const std::string &path) {
    const Json &v = obj.at(key);
    if (v.is_number_unsigned()) {
        return v.get<uint64_t>();
    }
    if (v.is_number_integer()) {
        if (v.get<int64_t>() < 0) {
            throw ConfigError(path, "must be non-negative");
        }
        return static_cast<uint64_t>(v.get<int64_t>());
    }
    if (v.is_number_float()) {
        double x = v.get<double>();
        if (x >= 0.0 && x == std::floor(x) && x < 1.8e19) {
            return static_cast<uint64_t>(x);
        }
    }
    throw ConfigError(path, "must be a non-negative integer");
}

void reject_unknown(const Json &obj, const std::set<std::string> &allowed, const std::string &prefix) {
    for (const auto &[key, value] : obj.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError(prefix + key, "unknown field");
        }
    }
}

QubitState parse_state(const Json &obj, const std::string &path) {
    if (!obj.is_object()) {
        throw ConfigError(path, "must be an object with rho11, re_rho12, im_rho12");
    }
    reject_unknown(obj, {"rho11", "re_rho12", "im_rho12"}, path + ".");
    if (!obj.contains("rho11")) {
        throw ConfigError(path + ".rho11", "is required");
    }
    double rho11 = number_field(obj, "rho11", path + ".rho11");
    double re = optional_number(obj, "re_rho12", path + ".re_rho12").value_or(0.0);
    double im = optional_number(obj, "im_rho12", path + ".im_rho12").value_or(0.0);
    if (rho11 < 0.0 || rho11 > 1.0) {
        throw ConfigError(path + ".rho11", "must lie in [0, 1]");
    }
    double bound = rho11 * (1.0 - rho11);
    if (re * re + im * im > bound + kStructuralTol) {
        throw ConfigError(path + ".re_rho12", "|rho12|^2 exceeds rho11*rho22; the state is not positive");
    }
    return QubitState::from_components(rho11, Complex(re, im));
}

void check_dqd_values(double r0_or_t1, bool is_t1, double timeout, double dt, const std::string &path) {
    if (is_t1 && !(r0_or_t1 > 0.0)) {
        throw ConfigError(path, "t1 must be positive");
    }
    if (!is_t1 && std::abs(r0_or_t1) > kMaxResultMagnitude) {
        throw ConfigError(path, "|r0| must not exceed 700");
    }
    if (!(timeout > 0.0)) {
        throw ConfigError("timeout", "must be positive");
    }
    if (!(dt > 0.0) || dt > 0.1) {
        throw ConfigError("dt", "must lie in (0, 0.1] (units of t_m)");
    }
    if (is_t1 && std::abs(std::round(r0_or_t1 / dt) * dt - r0_or_t1) > dt) {
        throw ConfigError(path, "t1 must be a whole number of steps");
    }
}

std::string state_path(size_t index, bool list) {
    return list ? "initial_states[" + std::to_string(index) + "]" : "initial_state";
}

}  // namespace

DqdDetectorParams ExperimentConfig::detector() const {
    DqdDetectorParams p;
    p.i0 = i0;
    p.delta_i = delta_i;
    p.s_i = s_i;
    p.dt = dt * p.t_m();
    return p;
}

PhaseQubitParams ExperimentConfig::phase_params() const {
    PhaseQubitParams p;
    p.t_low = t_low;
    p.gamma = t_low > 0.0 ? gamma_t / t_low : 0.0;
    p.phi = phi;
    p.gamma_ratio = gamma_ratio;
    return p;
}

ExperimentConfig parse_config(const std::string &json_text) {
    Json root;
    try {
        root = Json::parse(json_text);
    } catch (const Json::parse_error &e) {
        throw ConfigError("<config>", std::string("unreadable JSON: ") + e.what());
    }
    if (!root.is_object()) {
        throw ConfigError("<config>", "top level must be an object");
    }
    ExperimentConfig cfg;

    if (!root.contains("system") || !root["system"].is_string()) {
        throw ConfigError("system", "is required and must be \"dqd\" or \"phase\"");
    }
    std::string system = root["system"].get<std::string>();
    if (system == "dqd") {
        cfg.system = SystemKind::kDqd;
    } else if (system == "phase") {
        cfg.system = SystemKind::kPhase;
    } else {
        throw ConfigError("system", "unknown system \"" + system + "\" (expected \"dqd\" or \"phase\")");
    }
    bool dqd = cfg.system == SystemKind::kDqd;

    std::set<std::string> allowed = {"system", "initial_state", "initial_states", "n_attempts", "master_seed", "sweep"};
    if (dqd) {
        allowed.insert({"r0", "t1", "timeout", "dt", "detector", "crossing"});
    } else {
        allowed.insert({"gamma_t", "phi", "t_low", "gamma_ratio"});
    }
    reject_unknown(root, allowed, "");

    bool has_one = root.contains("initial_state");
    bool has_list = root.contains("initial_states");
    if (has_one == has_list) {
        throw ConfigError("initial_state", "exactly one of initial_state or initial_states is required");
    }
    if (has_one) {
        cfg.initial_states.push_back(parse_state(root["initial_state"], "initial_state"));
    } else {
        const Json &list = root["initial_states"];
        if (!list.is_array() || list.empty()) {
            throw ConfigError("initial_states", "must be a non-empty array");
        }
        for (size_t i = 0; i < list.size(); ++i) {
            cfg.initial_states.push_back(parse_state(list[i], state_path(i, true)));
        }
    }

    if (!root.contains("n_attempts")) {
        throw ConfigError("n_attempts", "is required");
    }
    cfg.n_attempts = integer_field(root, "n_attempts", "n_attempts");
    if (cfg.n_attempts == 0 || cfg.n_attempts >= (1ULL << 40)) {
        throw ConfigError("n_attempts", "must lie in [1, 2^40)");
    }
    if (root.contains("master_seed")) {
        cfg.master_seed = integer_field(root, "master_seed", "master_seed");
    }

    if (dqd) {
        cfg.r0 = optional_number(root, "r0", "r0");
        cfg.t1 = optional_number(root, "t1", "t1");
        if (cfg.r0.has_value() == cfg.t1.has_value()) {
            throw ConfigError("r0", "exactly one of r0 (fixed first result) or t1 (first-measurement duration) is required");
        }
        cfg.timeout = optional_number(root, "timeout", "timeout").value_or(cfg.timeout);
        cfg.dt = optional_number(root, "dt", "dt").value_or(cfg.dt);
        if (root.contains("detector")) {
            const Json &det = root["detector"];
            if (!det.is_object()) {
                throw ConfigError("detector", "must be an object");
            }
            reject_unknown(det, {"i0", "delta_i", "s_i"}, "detector.");
            cfg.i0 = optional_number(det, "i0", "detector.i0").value_or(cfg.i0);
            cfg.delta_i = optional_number(det, "delta_i", "detector.delta_i").value_or(cfg.delta_i);
            cfg.s_i = optional_number(det, "s_i", "detector.s_i").value_or(cfg.s_i);
            if (cfg.delta_i == 0.0) {
                throw ConfigError("detector.delta_i", "must be nonzero");
            }
            if (!(cfg.s_i > 0.0)) {
                throw ConfigError("detector.s_i", "must be positive");
            }
        }
        if (root.contains("crossing")) {
            std::string c = root["crossing"].is_string() ? root["crossing"].get<std::string>() : "";
            if (c == "bridge") {
                cfg.crossing = CrossingDetection::kBrownianBridge;
            } else if (c == "sign_change") {
                cfg.crossing = CrossingDetection::kSignChange;
            } else {
                throw ConfigError("crossing", "must be \"bridge\" or \"sign_change\"");
            }
        }
        bool is_t1 = cfg.t1.has_value();
        check_dqd_values(is_t1 ? *cfg.t1 : *cfg.r0, is_t1, cfg.timeout, cfg.dt, is_t1 ? "t1" : "r0");
    } else {
        if (!root.contains("gamma_t")) {
            throw ConfigError("gamma_t", "is required for the phase system");
        }
        cfg.gamma_t = number_field(root, "gamma_t", "gamma_t");
        if (cfg.gamma_t < 0.0) {
            throw ConfigError("gamma_t", "must be non-negative");
        }
        cfg.phi = optional_number(root, "phi", "phi").value_or(0.0);
        cfg.t_low = optional_number(root, "t_low", "t_low").value_or(1.0);
        if (!(cfg.t_low > 0.0)) {
            throw ConfigError("t_low", "must be positive");
        }
        if (root.contains("gamma_ratio")) {
            cfg.gamma_ratio = number_field(root, "gamma_ratio", "gamma_ratio");
            if (cfg.gamma_ratio < 1.0) {
                throw ConfigError("gamma_ratio", "must be at least 1");
            }
        }
    }

    if (root.contains("sweep")) {
        const Json &sw = root["sweep"];
        if (!sw.is_object()) {
            throw ConfigError("sweep", "must be an object");
        }
        reject_unknown(sw, {"parameter", "start", "stop", "steps"}, "sweep.");
        SweepSpec spec;
        if (!sw.contains("parameter") || !sw["parameter"].is_string()) {
            throw ConfigError("sweep.parameter", "is required");
        }
        spec.parameter = sw["parameter"].get<std::string>();
        std::set<std::string> sweepable = dqd ? std::set<std::string>{"r0", "t1", "timeout"}
                                              : std::set<std::string>{"gamma_t", "phi"};
        if (!sweepable.contains(spec.parameter)) {
            throw ConfigError("sweep.parameter", "cannot sweep \"" + spec.parameter + "\" for this system");
        }
        if ((spec.parameter == "r0" && !cfg.r0) || (spec.parameter == "t1" && !cfg.t1)) {
            throw ConfigError("sweep.parameter", "sweeping " + spec.parameter + " requires " + spec.parameter +
                                                     " to be the configured first-result policy");
        }
        for (const char *key : {"start", "stop", "steps"}) {
            if (!sw.contains(key)) {
                throw ConfigError(std::string("sweep.") + key, "is required");
            }
        }
        spec.start = number_field(sw, "start", "sweep.start");
        spec.stop = number_field(sw, "stop", "sweep.stop");
        uint64_t steps = integer_field(sw, "steps", "sweep.steps");
        if (steps < 1 || steps > 100000) {
            throw ConfigError("sweep.steps", "must lie in [1, 100000]");
        }
        spec.steps = static_cast<int>(steps);
        for (int k = 0; k < spec.steps; ++k) {
            double v = spec.value(k);
            std::string where = "sweep (" + spec.parameter + " = " + std::to_string(v) + ")";
            try {
                if (spec.parameter == "r0") {
                    check_dqd_values(v, false, cfg.timeout, cfg.dt, "r0");
                } else if (spec.parameter == "t1") {
                    check_dqd_values(v, true, cfg.timeout, cfg.dt, "t1");
                } else if (spec.parameter == "timeout") {
                    check_dqd_values(cfg.t1.value_or(cfg.r0.value_or(0.0)), cfg.t1.has_value(), v, cfg.dt, "timeout");
                } else if (spec.parameter == "gamma_t" && v < 0.0) {
                    throw ConfigError("gamma_t", "must be non-negative");
                }
            } catch (const ConfigError &e) {
                throw ConfigError("sweep", where + ": " + e.what());
            }
        }
        cfg.sweep = spec;
    }

    if (dqd) {
        try {
            cfg.detector().validate();
        } catch (const std::invalid_argument &e) {
            throw ConfigError("detector", e.what());
        }
    } else {
        cfg.phase_params().validate();
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("<config>", "cannot read " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string format_csv_number(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json state_json(const QubitState &s) {
    Json j;
    j["rho11"] = s.rho11();
    j["re_rho12"] = s.rho12().real();
    j["im_rho12"] = s.rho12().imag();
    return j;
}

Json interval_json(const Interval &i) { return Json::array({i.lo, i.hi}); }

struct DqdPoint {
    double r0_or_t1;
    double timeout;
};

Json dqd_summary_json(const UndoSummary &s, const ExperimentConfig &cfg, const QubitState &state, const DqdPoint &p,
                      double t_m) {
    Json j;
    j["system"] = "dqd";
    j["initial_state"] = state_json(state);
    j[cfg.t1 ? "t1" : "r0"] = p.r0_or_t1;
    j["n_attempts"] = s.n_attempts;
    j["n_success"] = s.n_success;
    j["rate"] = s.rate;
    j["rate_ci95"] = interval_json(s.rate_ci95);
    j["mean_undo_time"] = s.n_success > 0 ? Json(s.mean_undo_time) : Json(nullptr);
    j["se_undo_time"] = s.n_success > 1 ? Json(s.se_undo_time) : Json(nullptr);
    j["timeout"] = s.timeout;
    j["dt"] = s.dt;
    j["seed"] = s.seed;
    j["ps_analytic"] = s.ps_analytic;
    j["t_undo_analytic"] = s.t_undo_analytic;
    j["t_m"] = t_m;
    j["mean_elapsed_time"] = s.mean_elapsed_time;
    j["censoring_deficit"] = s.censoring_deficit;
    j["crossing"] = cfg.crossing == CrossingDetection::kBrownianBridge ? "bridge" : "sign_change";
    j["green_lights"] = s.n_success;
    j["red_lights"] = s.n_attempts - s.n_success;
    j["n_timeout"] = s.n_timeout;
    j["n_latent_one"] = s.n_latent_one;
    j["n_success_latent_one"] = s.n_success_latent_one;
    j["n_latent_two"] = s.n_latent_two;
    j["n_success_latent_two"] = s.n_success_latent_two;
    j["min_restoration_fidelity"] = s.min_restoration_fidelity;
    j["n_restoration_failures"] = s.n_restoration_failures;
    j["warnings"] = s.warnings;
    (void)p;
    return j;
}

Json phase_summary_json(const PhaseSummary &s, const QubitState &state, const PhaseQubitParams &params) {
    Json j;
    j["system"] = "phase";
    j["initial_state"] = state_json(state);
    j["n_attempts"] = s.n_attempts;
    j["n_success"] = s.n_success;
    j["rate"] = s.double_null_rate;
    j["rate_ci95"] = interval_json(s.double_null_ci95);
    j["mean_undo_time"] = s.undo_time;
    j["se_undo_time"] = 0.0;
    j["timeout"] = nullptr;
    j["dt"] = nullptr;
    j["seed"] = s.seed;
    j["ps_analytic"] = s.ps_analytic;
    j["t_undo_analytic"] = 2.0 * params.t_low;
    j["gamma_t"] = s.gamma_t;
    j["phi"] = s.phi;
    j["t_low"] = params.t_low;
    j["gamma_ratio"] = number_or_null(params.gamma_ratio);
    j["double_null_rate"] = s.double_null_rate;
    j["double_null_ci95"] = interval_json(s.double_null_ci95);
    j["double_null_analytic"] = s.double_null_analytic;
    j["n_survived_first"] = s.n_survived_first;
    j["ps_conditional"] = s.n_survived_first > 0 ? Json(s.ps_conditional) : Json(nullptr);
    j["ps_conditional_ci95"] = interval_json(s.ps_conditional_ci95);
    j["green_lights"] = s.n_success;
    j["red_lights"] = s.n_attempts - s.n_success;
    j["fidelity_min"] = s.fidelity_min;
    j["max_restoration_error"] = s.max_restoration_error;
    return j;
}

std::string join_row(const std::vector<double> &values, bool with_state, size_t state_index) {
    std::string row = with_state ? std::to_string(state_index) : "";
    for (size_t i = 0; i < values.size(); ++i) {
        if (!row.empty() || i > 0 || with_state) {
            row += ",";
        }
        row += format_csv_number(values[i]);
    }
    if (!with_state && !row.empty() && row.front() == ',') {
        row.erase(0, 1);
    }
    return row + "\n";
}

}  // namespace

ResultFiles run_experiment(const ExperimentConfig &cfg, RunMode mode, unsigned workers) {
    if (mode == RunMode::kSweep && !cfg.sweep) {
        throw ConfigError("sweep", "the sweep command needs a sweep specification");
    }
    bool dqd = cfg.system == SystemKind::kDqd;
    bool sweep = mode == RunMode::kSweep;
    int n_points = sweep ? cfg.sweep->steps : 1;
    bool multi_state = cfg.initial_states.size() > 1;

    std::vector<Json> summaries;
    std::string csv;
    if (sweep) {
        std::string first = cfg.sweep->parameter;
        if (multi_state) {
            csv += "state_index,";
        }
        if (dqd) {
            csv += first + ",ps_empirical,ps_ci_lo,ps_ci_hi,ps_analytic,t_undo_empirical,t_undo_analytic\n";
        } else {
            csv += first +
                   ",double_null_rate,double_null_ci_lo,double_null_ci_hi,double_null_analytic,"
                   "ps_conditional,ps_ci_lo,ps_ci_hi,ps_analytic\n";
        }
    }

    for (size_t si = 0; si < cfg.initial_states.size(); ++si) {
        const QubitState &state = cfg.initial_states[si];
        for (int k = 0; k < n_points; ++k) {
            uint64_t point = si * static_cast<uint64_t>(n_points) + static_cast<uint64_t>(k);
            double swept = sweep ? cfg.sweep->value(k) : 0.0;
            if (dqd) {
                DqdDetectorParams det = cfg.detector();
                double t_m = det.t_m();
                double value = cfg.t1 ? *cfg.t1 : *cfg.r0;
                double timeout = cfg.timeout;
                if (sweep && cfg.sweep->parameter == "timeout") {
                    timeout = swept;
                } else if (sweep) {
                    value = swept;
                }
                R0Policy policy = cfg.t1 ? R0Policy::first_measurement(value * t_m) : R0Policy::fixed(value);
                UndoRunOptions opts;
                opts.workers = workers;
                opts.point_index = point;
                opts.undo.detection = cfg.crossing;
                UndoSummary s =
                    run_undo_experiment(det, state, policy, cfg.n_attempts, timeout * t_m, cfg.master_seed, opts);
                summaries.push_back(dqd_summary_json(s, cfg, state, {value, timeout}, t_m));
                if (sweep) {
                    double t_emp = s.n_success > 0 ? s.mean_undo_time : std::nan("");
                    csv += join_row({swept, s.rate, s.rate_ci95.lo, s.rate_ci95.hi, s.ps_analytic, t_emp, s.t_undo_analytic},
                                    multi_state, si);
                }
            } else {
                ExperimentConfig local = cfg;
                if (sweep && cfg.sweep->parameter == "gamma_t") {
                    local.gamma_t = swept;
                } else if (sweep) {
                    local.phi = swept;
                }
                PhaseQubitParams params = local.phase_params();
                PhaseRunOptions opts;
                opts.workers = workers;
                opts.point_index = point;
                PhaseSummary s = run_phase_experiment(state, params, cfg.n_attempts, cfg.master_seed, opts);
                summaries.push_back(phase_summary_json(s, state, params));
                if (sweep) {
                    double ps = s.n_survived_first > 0 ? s.ps_conditional : std::nan("");
                    csv += join_row({swept, s.double_null_rate, s.double_null_ci95.lo, s.double_null_ci95.hi,
                                     s.double_null_analytic, ps, s.ps_conditional_ci95.lo, s.ps_conditional_ci95.hi,
                                     s.ps_analytic},
                                    multi_state, si);
                }
            }
        }
    }

    ResultFiles files;
    Json summary;
    if (!sweep && summaries.size() == 1) {
        summary = summaries.front();
    } else {
        summary["system"] = dqd ? "dqd" : "phase";
        if (sweep) {
            summary["parameter"] = cfg.sweep->parameter;
            summary["points"] = summaries;
        } else {
            summary["runs"] = summaries;
        }
    }
    files.summary_json = summary.dump(2) + "\n";
    if (sweep) {
        files.sweep_csv = csv;
    }
    return files;
}

std::string make_meta(RunMode mode, const std::string &config_path, unsigned workers,
                      std::optional<uint64_t> seed_override) {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm utc{};
    gmtime_r(&t, &utc);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &utc);
    Json j;
    j["tool"] = "qudsim";
    j["version"] = kVersion;
    j["command"] = mode == RunMode::kRun ? "run" : "sweep";
    j["config"] = config_path;
    j["workers"] = workers;
    j["seed_override"] = seed_override ? Json(*seed_override) : Json(nullptr);
    j["rng"] = "philox4x32-10";
    j["timestamp"] = stamp;
    return j.dump(2) + "\n";
}

void write_result_files(const ResultFiles &files, const std::string &meta_json, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    auto write = [&](const char *name, const std::string &text) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write " + (dir / name).string());
        }
        out << text;
    };
    write("summary.json", files.summary_json);
    if (files.sweep_csv) {
        write("sweep.csv", *files.sweep_csv);
    }
    write("meta.json", meta_json);
}

}  // namespace qud
