// SPDX-License-Identifier: Apache-2.0
//
// otfs-zak: link-level OTFS simulator comparing two-step and Zak receivers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// otfs_sim command-line application: sweep-speed, sweep-snr, single-path and
// validate. Exit codes: 0 success, 1 validation failure, 2 usage error.

#pragma once

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "otfs/capacity.hpp"
#include "otfs/channel.hpp"
#include "otfs/scenarios.hpp"
#include "otfs/validation.hpp"

namespace otfs::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kSuccess = 0, kValidationFailure = 1, kUsageError = 2 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parameters shared by all commands. Defaults are the en-route UAS link.
struct RunConfig {
    std::string command;
    int M = 15;
    int N = 46;
    double delta_f = 2000.0;
    double carrier_hz = 5.06e9;
    double k_db = 15.0;
    double beamwidth_deg = 3.5;
    double tau2_s = 33e-6;
    double speed_mps = 400.0;
    double rho_db = 10.0;
    std::vector<double> speeds = default_speed_grid();
    std::vector<double> rhos_db = default_rho_grid_db();
    int trials = 2000;
    std::uint64_t seed = 1;
    int threads = 0;
    int q = 3;
    double h1_re = 1.0;
    double h1_im = 0.0;
    bool quick = false;
    bool inject_fault = false;
    std::string out;
    std::string format;
};

inline nlohmann::ordered_json to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["command"] = c.command;
    j["grid"] = {{"M", c.M}, {"N", c.N}, {"delta_f_hz", c.delta_f}};
    if (c.command == "sweep-speed" || c.command == "sweep-snr") {
        j["scenario"] = {{"carrier_hz", c.carrier_hz}, {"k_db", c.k_db}, {"beamwidth_deg", c.beamwidth_deg}, {"tau2_s", c.tau2_s}};
        if (c.command == "sweep-speed") {
            j["rho_db"] = c.rho_db;
            j["speeds_mps"] = c.speeds;
        } else {
            j["speed_mps"] = c.speed_mps;
            j["rhos_db"] = c.rhos_db;
        }
        j["trials"] = c.trials;
        j["threads"] = c.threads;
    } else if (c.command == "single-path") {
        j["q"] = c.q;
        j["rho_db"] = c.rho_db;
        j["h1"] = {c.h1_re, c.h1_im};
    } else if (c.command == "validate") {
        j["quick"] = c.quick;
        if (c.inject_fault) j["inject_fault"] = true;
    }
    j["seed"] = c.seed;
    j["format"] = c.format;
    j["out"] = c.out;
    return j;
}

/// UTC time, or SOURCE_DATE_EPOCH when set so reruns can be byte-identical.
inline std::string timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (end != env && *end == '\0') t = static_cast<std::time_t>(v);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline nlohmann::ordered_json meta(const RunConfig& c) {
    return {{"tool", "otfs_sim"}, {"version", kVersion}, {"config", to_json(c)}, {"seed", c.seed}, {"timestamp", timestamp()}};
}

inline std::string csv_header(const RunConfig& c) {
    std::ostringstream s;
    s << "# otfs_sim " << kVersion << '\n';
    s << "# config: " << to_json(c).dump() << '\n';
    s << "# seed: " << c.seed << '\n';
    s << "# timestamp: " << timestamp() << '\n';
    return s.str();
}

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline GridConfig grid_of(const RunConfig& c) {
    if (c.M < 1 || c.N < 1) throw UsageError("--M and --N must be >= 1");
    if (!(c.delta_f > 0.0) || !std::isfinite(c.delta_f)) throw UsageError("--delta-f must be positive");
    return {c.M, c.N, c.delta_f};
}

inline SweepSettings sweep_settings(const RunConfig& c) {
    if (c.trials < 1) throw UsageError("--trials must be >= 1");
    SweepSettings s;
    s.scenario.grid = grid_of(c);
    s.scenario.carrier_hz = c.carrier_hz;
    s.scenario.K_db = c.k_db;
    s.scenario.beamwidth_deg = c.beamwidth_deg;
    s.scenario.tau2_s = c.tau2_s;
    s.scenario.speed_mps = c.speed_mps;
    if (!(c.tau2_s >= 0.0 && c.tau2_s < s.scenario.grid.T())) throw UsageError("--tau2 must lie in [0, 1/delta_f)");
    s.rho_db = c.rho_db;
    s.trials = c.trials;
    s.seed = c.seed;
    s.threads = c.threads;
    return s;
}

inline std::string render_sweep(const RunConfig& c, const SweepResult& r) {
    if (c.format == "json") {
        nlohmann::ordered_json j;
        j["meta"] = meta(c);
        j["axis"] = r.axis_name;
        j["trials"] = r.trials;
        j["seed"] = r.seed;
        auto& pts = j["points"] = nlohmann::ordered_json::array();
        for (const auto& p : r.points)
            pts.push_back({{r.axis_name, p.axis},
                           {"se_zak_exact", p.zak_exact.mean},
                           {"se_zak_exact_stderr", p.zak_exact.std_error},
                           {"se_zak_approx", p.zak_approx.mean},
                           {"se_zak_approx_stderr", p.zak_approx.std_error},
                           {"se_twostep", p.two_step.mean},
                           {"se_twostep_stderr", p.two_step.std_error},
                           {"gap_zak_exact_minus_twostep", p.gap.mean},
                           {"gap_stderr", p.gap.std_error}});
        return j.dump(2) + "\n";
    }
    std::ostringstream s;
    s << csv_header(c);
    s << r.axis_name << ",se_zak_exact,se_zak_exact_stderr,se_zak_approx,se_zak_approx_stderr,se_twostep,se_twostep_stderr,trials,seed\n";
    for (const auto& p : r.points)
        s << num(p.axis) << ',' << num(p.zak_exact.mean) << ',' << num(p.zak_exact.std_error) << ',' << num(p.zak_approx.mean) << ','
          << num(p.zak_approx.std_error) << ',' << num(p.two_step.mean) << ',' << num(p.two_step.std_error) << ',' << r.trials << ','
          << r.seed << '\n';
    return s.str();
}

struct CommandOutput {
    std::string text;
    int code = kSuccess;
};

inline CommandOutput cmd_sweep_speed(const RunConfig& c) {
    if (c.speeds.empty()) throw UsageError("--speeds must not be empty");
    for (double v : c.speeds)
        if (!(v >= 0.0) || !std::isfinite(v)) throw UsageError("--speeds must be nonnegative");
    return {render_sweep(c, sweep_speed(c.speeds, sweep_settings(c)))};
}

inline CommandOutput cmd_sweep_snr(const RunConfig& c) {
    if (c.rhos_db.empty()) throw UsageError("--rhos-db must not be empty");
    for (double r : c.rhos_db)
        if (!std::isfinite(r)) throw UsageError("--rhos-db values must be finite");
    if (!(c.speed_mps >= 0.0)) throw UsageError("--speed must be nonnegative");
    return {render_sweep(c, sweep_rho(c.rhos_db, sweep_settings(c)))};
}

/// Matrix route against the closed forms for one path at Doppler q delta_f.
inline CommandOutput cmd_single_path(const RunConfig& c) {
    const GridConfig cfg = grid_of(c);
    if (c.q < 0 || c.q >= cfg.M()) throw UsageError("--q must lie in [0, M)");
    const double rho = db_to_linear(c.rho_db);
    const Complex h1(c.h1_re, c.h1_im);
    const PathSet paths{{h1, 0.0, c.q * cfg.delta_f()}};

    const auto Ht = build_two_step_matrix(paths, cfg);
    const auto Hz = build_zak_matrix(paths, cfg);
    const double c_two = se_two_step(Ht, rho).se_bits_per_sec_per_hz;
    const double c_zak = se_zak_approx(Hz, rho).se_bits_per_sec_per_hz;
    const double c_zak_exact = se_zak_exact(Hz, rho).se_bits_per_sec_per_hz;
    const auto cf = single_path_closed_forms(c.q, cfg.M(), h1, rho);

    const int M = cfg.M();
    const CMatrix A = (Ht.matrix.adjoint() * Ht.matrix).block(0, 0, M, M);
    const Eigen::VectorXd ev = hermitian_eigenvalues(0.5 * (A + A.adjoint()));
    const double g = std::norm(h1);
    int n_nonzero = 0, n_zero = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (std::abs(ev(i) - g) <= 1e-6) ++n_nonzero;
        else if (std::abs(ev(i)) <= 1e-6) ++n_zero;
    }

    constexpr double tol = 1e-6;
    nlohmann::ordered_json mismatches = nlohmann::ordered_json::array();
    const auto compare = [&](const char* what, double got, double want) {
        if (std::abs(got - want) > tol) mismatches.push_back({{"quantity", what}, {"matrix", got}, {"closed_form", want}});
    };
    compare("se_twostep", c_two, cf.c_two_step);
    compare("se_zak_approx", c_zak, cf.c_zak);
    if (g > tol) {
        compare("multiplicity_nonzero", n_nonzero, cf.multiplicity_nonzero);
        compare("multiplicity_zero", n_zero, cf.multiplicity_zero);
    }

    nlohmann::ordered_json j;
    j["meta"] = meta(c);
    j["matrix"] = {{"se_twostep", c_two},
                   {"se_zak_approx", c_zak},
                   {"se_zak_exact", c_zak_exact},
                   {"a_eigenvalues", std::vector<double>(ev.data(), ev.data() + ev.size())},
                   {"multiplicity_nonzero", n_nonzero},
                   {"multiplicity_zero", n_zero}};
    j["closed_form"] = {{"se_twostep", cf.c_two_step},
                        {"se_zak", cf.c_zak},
                        {"multiplicity_nonzero", cf.multiplicity_nonzero},
                        {"multiplicity_zero", cf.multiplicity_zero}};
    j["tolerance"] = tol;
    j["mismatches"] = mismatches;
    j["passed"] = mismatches.empty();
    return {j.dump(2) + "\n", mismatches.empty() ? kSuccess : kValidationFailure};
}

inline CommandOutput cmd_validate(const RunConfig& c) {
    ValidationOptions o;
    o.quick = c.quick;
    o.seed = c.seed;
    o.grid = grid_of(c);
    if (c.inject_fault) o.zak_variant = ZakKernelVariant::FlippedFloorPhase;
    const auto results = run_validation(o);
    const bool ok = all_passed(results);
    std::ostringstream s;
    if (c.format == "json") {
        nlohmann::ordered_json j;
        j["meta"] = meta(c);
        auto& arr = j["checks"] = nlohmann::ordered_json::array();
        for (const auto& r : results)
            arr.push_back({{"name", r.name}, {"passed", r.passed}, {"metric", r.metric}, {"threshold", r.threshold}, {"detail", r.detail}, {"seconds", r.seconds}});
        j["passed"] = ok;
        s << j.dump(2) << '\n';
    } else {
        s << csv_header(c);
        for (const auto& r : results) s << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        s << (ok ? "all checks passed" : "validation FAILED") << '\n';
    }
    return {s.str(), ok ? kSuccess : kValidationFailure};
}

/// Rejects empty list elements, which would otherwise convert to 0.
inline const CLI::Validator kNonEmpty(
    [](std::string& v) { return v.find_first_not_of(" \t") == std::string::npos ? std::string("empty value in list") : std::string(); },
    "NONEMPTY");

inline void add_grid_options(CLI::App* sub, RunConfig& c) {
    sub->add_option("--M", c.M, "delay bins (subcarriers)")->capture_default_str();
    sub->add_option("--N", c.N, "Doppler bins (symbols)")->capture_default_str();
    sub->add_option("--delta-f", c.delta_f, "subcarrier spacing in Hz")->capture_default_str();
    sub->add_option("--seed", c.seed, "base random seed")->capture_default_str();
    sub->add_option("--out", c.out, "output file (default: stdout)");
}

inline void add_scenario_options(CLI::App* sub, RunConfig& c) {
    sub->add_option("--trials", c.trials, "Monte Carlo trials per point")->capture_default_str();
    sub->add_option("--k-db", c.k_db, "Rician K factor in dB")->capture_default_str();
    sub->add_option("--carrier", c.carrier_hz, "carrier frequency in Hz")->capture_default_str();
    sub->add_option("--beamwidth", c.beamwidth_deg, "Doppler beamwidth in degrees")->capture_default_str();
    sub->add_option("--tau2", c.tau2_s, "reflected-path delay in seconds")->capture_default_str();
    sub->add_option("--threads", c.threads, "worker threads (0: OTFS_THREADS or hardware)")->capture_default_str();
}

/// Runs the application. `args` excludes the program name.
inline int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"OTFS link-level simulator: two-step and Zak receivers", "otfs_sim"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key=value file overriding defaults, keys as command.option or in [command] sections");

    auto* speed = app.add_subcommand("sweep-speed", "mean spectral efficiency versus UAS speed");
    add_grid_options(speed, c);
    add_scenario_options(speed, c);
    speed->add_option("--speeds", c.speeds, "speeds in m/s")->delimiter(',')->check(kNonEmpty)->capture_default_str();
    speed->add_option("--rho-db", c.rho_db, "rho in dB")->capture_default_str();
    speed->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->default_str("csv");

    auto* snr = app.add_subcommand("sweep-snr", "mean spectral efficiency versus rho");
    add_grid_options(snr, c);
    add_scenario_options(snr, c);
    snr->add_option("--rhos-db", c.rhos_db, "rho values in dB")->delimiter(',')->check(kNonEmpty)->capture_default_str();
    snr->add_option("--speed", c.speed_mps, "UAS speed in m/s")->capture_default_str();
    snr->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->default_str("csv");

    auto* single = app.add_subcommand("single-path", "single integer-Doppler path: matrix route vs closed forms");
    add_grid_options(single, c);
    single->add_option("--q", c.q, "Doppler in units of delta_f")->capture_default_str();
    single->add_option("--rho-db", c.rho_db, "rho in dB")->capture_default_str();
    single->add_option("--h1", c.h1_re, "path gain, real part")->capture_default_str();
    single->add_option("--h1-imag", c.h1_im, "path gain, imaginary part")->capture_default_str();
    single->add_option("--format", c.format, "json only")->check(CLI::IsMember({"json"}))->default_str("json");

    auto* validate = app.add_subcommand("validate", "run the oracle and property checks");
    add_grid_options(validate, c);
    validate->add_flag("--quick", c.quick, "reduced subset");
    validate->add_flag("--inject-fault", c.inject_fault)->group("");
    validate->add_option("--format", c.format, "text or json")->check(CLI::IsMember({"text", "json"}))->default_str("text");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        app.exit(e, out, err);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsageError;
    }

    CLI::App* chosen = app.get_subcommands().front();
    c.command = chosen->get_name();
    if (c.format.empty()) c.format = c.command == "single-path" ? "json" : (c.command == "validate" ? "text" : "csv");

    CommandOutput result;
    try {
        if (c.command == "sweep-speed") result = cmd_sweep_speed(c);
        else if (c.command == "sweep-snr") result = cmd_sweep_snr(c);
        else if (c.command == "single-path") result = cmd_single_path(c);
        else result = cmd_validate(c);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\nRun with --help for more information.\n";
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }

    if (c.out.empty()) {
        out << result.text;
    } else {
        std::ofstream f(c.out, std::ios::binary);
        if (!f) {
            err << "error: cannot open " << c.out << " for writing\n";
            return kUsageError;
        }
        f << result.text;
    }
    return result.code;
}

}  // namespace otfs::cli
