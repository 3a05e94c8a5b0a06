// racetrack: simulate the racetrack economy, compute its Fourier-mode spectrum,
// sweep transport costs and check model invariants.
//
//   racetrack simulate --config cfg.json --out run/
//   racetrack spectrum --regions 4 --tau 1
//   racetrack sweep    --regions 3 --out sweep/
//   racetrack validate --config cfg.json
//
// Exit codes: 0 success, 1 validation error, 2 model-consistency failure.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "racetrack/racetrack.hpp"

namespace fs = std::filesystem;
using namespace racetrack;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_consistency = 2;

struct Overrides {
    std::optional<std::string> config_path;
    std::optional<std::string> out;
    std::optional<double> tau;
    std::optional<int> regions;
    std::optional<int> mode;
    std::optional<double> eps;
    std::optional<double> t_end;
    std::optional<double> dt;
    std::optional<std::uint64_t> seed;
    std::optional<double> tau_min;
    std::optional<double> tau_max;
    std::optional<int> steps;
    std::optional<int> stride;
    bool dump_config = false;
};

int fail(const std::string& kind, const std::vector<std::string>& messages, int code) {
    Json err{{"error", kind}, {"messages", messages}};
    std::cerr << err.dump() << '\n';
    return code;
}

RunConfig load_config(const Overrides& o) {
    RunConfig cfg;
    if (o.config_path) {
        std::ifstream in(*o.config_path);
        if (!in) throw ConfigError("cannot open config file '" + *o.config_path + "'");
        Json j;
        try {
            j = Json::parse(in);
        } catch (const Json::parse_error& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        cfg = config_from_json(j);
    }
    if (o.out) cfg.out = *o.out;
    if (o.tau) cfg.params.tau = *o.tau;
    if (o.regions) cfg.params.R = *o.regions;
    if (o.mode) cfg.mode = *o.mode;
    if (o.eps) cfg.eps = *o.eps;
    if (o.t_end) cfg.t_end = *o.t_end;
    if (o.dt) cfg.dt = *o.dt;
    if (o.seed) cfg.seed = *o.seed;
    if (o.tau_min) cfg.tau_min = *o.tau_min;
    if (o.tau_max) cfg.tau_max = *o.tau_max;
    if (o.steps) cfg.steps = *o.steps;
    if (o.stride) cfg.sample_stride = *o.stride;
    return cfg;
}

fs::path prepare_out_dir(const RunConfig& cfg) {
    fs::path dir(cfg.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("output directory '" + cfg.out + "' is not writable");
    return dir;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path.string() + "'");
    f << text;
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

PopulationState initial_state(const RunConfig& cfg) {
    if (cfg.eps == 0.0) return homogeneous_state(cfg.params);
    if (cfg.mode == 0) return random_perturbation(cfg.params, cfg.eps, cfg.seed);
    return cosine_perturbation(cfg.params, cfg.mode, cfg.eps);
}

int cmd_simulate(const RunConfig& cfg) {
    const auto& p = cfg.params;
    const auto dir = prepare_out_dir(cfg);
    IntegrateOptions opts;
    opts.sample_stride = cfg.sample_stride;
    const auto traj = integrate(initial_state(cfg), p, cfg.t_end, cfg.dt, opts);

    std::ostringstream csv;
    write_trajectory_csv(csv, traj, p.R);
    write_file(dir / "trajectory.csv", csv.str());

    const auto& last = traj.samples.back();
    const auto amps = dft(last.lambda);
    Json modes = Json::array();
    for (int k = 1; k < p.R; ++k) {
        const auto a = amps[static_cast<std::size_t>(k)];
        modes.push_back({{"k", k}, {"re", a.real()}, {"im", a.imag()}, {"abs", std::abs(a)}});
    }
    Json summary{{"terminal_reason", to_string(traj.terminal_reason)},
                 {"steps", traj.steps},
                 {"clamp_events", traj.clamp_events},
                 {"final_time", last.time},
                 {"final_mode_amplitudes", modes}};
    if (cfg.eps > 0.0 && cfg.mode > 0) {
        Json growth{{"k", cfg.mode}, {"predicted", p.v * p.mean_mobile() * omega_numeric(p, cfg.mode)}};
        if (auto fit = fit_growth_rate(traj, cfg.mode, cfg.eps)) {
            growth["fitted"] = fit->rate;
            growth["points"] = fit->points;
        } else {
            growth["fitted"] = nullptr;
            growth["points"] = 0;
        }
        summary["growth_rate"] = growth;
    }
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    std::cout << summary.dump(2) << '\n';
    return exit_ok;
}

int cmd_spectrum(const RunConfig& cfg) {
    const auto dir = prepare_out_dir(cfg);
    const auto report = to_json(stability_report(cfg.params));
    write_file(dir / "spectrum.json", report.dump(2) + "\n");
    std::cout << report.dump(2) << '\n';
    return exit_ok;
}

int cmd_sweep(const RunConfig& cfg) {
    const auto& p = cfg.params;
    const auto dir = prepare_out_dir(cfg);
    const int n = cfg.steps;
    std::vector<double> taus(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        taus[static_cast<std::size_t>(i)] = cfg.tau_min + (cfg.tau_max - cfg.tau_min) * i / (n - 1);

    // Grid points are independent; results land in their own slot so row order
    // does not depend on scheduling.
    std::vector<std::vector<double>> rows(taus.size());
    const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 8u));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < taus.size(); i += workers) rows[i] = omega_modes(p.with_tau(taus[i]));
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::ostringstream csv;
    csv << "tau,k,omega_k\n";
    for (std::size_t i = 0; i < taus.size(); ++i)
        for (int k = 1; k < p.R; ++k)
            csv << fmt_double(taus[i]) << ',' << k << ',' << fmt_double(rows[i][static_cast<std::size_t>(k - 1)]) << '\n';
    write_file(dir / "sweep.csv", csv.str());

    std::ostringstream crit;
    crit << "k,critical_tau\n";
    Json modes = Json::array();
    for (int k = 1; k < p.R; ++k) {
        const auto tc = critical_tau(p, k);
        crit << k << ',' << (tc ? fmt_double(*tc) : "none") << '\n';
        int crossings = 0;
        double grid_min = rows[0][static_cast<std::size_t>(k - 1)];
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const double a = rows[i - 1][static_cast<std::size_t>(k - 1)], b = rows[i][static_cast<std::size_t>(k - 1)];
            if ((a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0)) ++crossings;
            grid_min = std::min(grid_min, b);
        }
        modes.push_back({{"k", k},
                         {"critical_tau", tc ? Json(*tc) : Json(nullptr)},
                         {"sign_changes_on_grid", crossings},
                         {"min_on_grid", grid_min}});
    }
    write_file(dir / "critical.csv", crit.str());
    Json summary{{"R", p.R}, {"tau_min", cfg.tau_min}, {"tau_max", cfg.tau_max}, {"steps", n}, {"modes", modes}};
    std::cout << summary.dump(2) << '\n';
    return exit_ok;
}

int cmd_validate(const RunConfig& cfg) {
    const auto& p = cfg.params;
    const auto dir = prepare_out_dir(cfg);
    std::vector<double> taus;
    for (int i = 1; i <= 20; ++i) taus.push_back(0.5 * i);

    std::vector<CheckResult> checks = spectral_checks(p, taus);
    for (auto& c : equilibrium_checks(p, 20, cfg.seed)) checks.push_back(std::move(c));
    checks.push_back(conservation_check(p, cfg.t_end, cfg.dt, cfg.eps > 0.0 ? cfg.eps : 1e-4, cfg.seed));
    if (has_closed_form(p.R)) {
        const auto q = quad_coefficients(p);
        const bool ok = q.A < 0.0 && q.B > 0.0 && (!q.C || *q.C > 0.0);
        checks.push_back({"sign pattern A<0, B>0, C>0", ok, q.A, 0.0});
    }

    Json out = Json::array();
    bool all = true;
    for (const auto& c : checks) {
        all = all && c.passed;
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  (value " << fmt_double(c.value)
                  << ", tolerance " << fmt_double(c.tolerance) << ")\n";
        out.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"tolerance", c.tolerance}});
    }
    write_file(dir / "validate.json", Json{{"params", to_json(p)}, {"checks", out}}.dump(2) + "\n");
    return all ? exit_ok : exit_consistency;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Racetrack economy simulator and spectral stability analyzer"};
    app.require_subcommand(1);
    app.fallthrough();

    Overrides o;
    app.add_option("--config", o.config_path, "JSON run config or flat parameter object");
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--tau", o.tau, "Transport cost per unit distance");
    app.add_option("--regions", o.regions, "Number of regions R");
    app.add_option("--mode", o.mode, "Fourier mode to seed (0: random zero-sum perturbation)");
    app.add_option("--eps", o.eps, "Perturbation amplitude");
    app.add_option("--t-end", o.t_end, "Integration horizon");
    app.add_option("--dt", o.dt, "RK4 step");
    app.add_option("--seed", o.seed, "Seed for random perturbations");
    app.add_option("--tau-min", o.tau_min, "Sweep lower bound");
    app.add_option("--tau-max", o.tau_max, "Sweep upper bound");
    app.add_option("--steps", o.steps, "Sweep grid points");
    app.add_option("--stride", o.stride, "Trajectory sample stride");
    app.add_flag("--dump-config", o.dump_config, "Print the effective config as JSON and exit");

    auto* simulate = app.add_subcommand("simulate", "Integrate the migration dynamics");
    auto* spectrum = app.add_subcommand("spectrum", "Modal growth rates of the homogeneous state");
    auto* sweep = app.add_subcommand("sweep", "Omega_k over a transport-cost grid");
    auto* validate = app.add_subcommand("validate", "Check model invariants on the given parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return exit_validation;
    }

    try {
        const RunConfig cfg = load_config(o);
        if (auto v = config_violations(cfg); !v.empty()) return fail("validation", v, exit_validation);
        if (o.dump_config) {
            std::cout << to_json(cfg).dump(2) << '\n';
            return exit_ok;
        }
        if (simulate->parsed()) return cmd_simulate(cfg);
        if (spectrum->parsed()) return cmd_spectrum(cfg);
        if (sweep->parsed()) return cmd_sweep(cfg);
        if (validate->parsed()) return cmd_validate(cfg);
    } catch (const ParameterError& e) {
        return fail("validation", e.violations(), exit_validation);
    } catch (const ModelConsistencyError& e) {
        return fail("model_consistency", {e.what()}, exit_consistency);
    } catch (const NonContractionError& e) {
        return fail("model_consistency", {e.what()}, exit_consistency);
    } catch (const std::invalid_argument& e) {
        return fail("validation", {e.what()}, exit_validation);
    } catch (const std::exception& e) {
        return fail("runtime", {e.what()}, exit_consistency);
    }
    return exit_ok;
}
