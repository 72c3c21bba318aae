// imethod: command-line front end for the experiment harness.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "imethod/imethod.hpp"

namespace fs = std::filesystem;
using namespace imethod;

namespace {

struct CommonOptions {
    std::string config;
    std::string out = ".";
    std::string blend = "smoothstep-log";
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config, "experiment config file (key = value)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", opts.out, "output directory")->required();
}

void add_blend(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--blend", opts.blend, "multiplier transition: smoothstep-log or hermite-log");
}

ExperimentConfig load(const CommonOptions& opts) {
    ExperimentConfig cfg = load_config(opts.config);
    cfg.output_path = opts.out;
    fs::create_directories(opts.out);
    return cfg;
}

void list_files(const std::vector<fs::path>& files) {
    for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
}

GroundStateProfile profile_for(const ExperimentConfig& cfg, const std::string& path) {
    if (!path.empty()) return load_profile(path);
    return shoot(cfg.params);
}

std::optional<double> alpha_from_summary(const fs::path& summary) {
    std::ifstream in(summary);
    if (!in) return std::nullopt;
    std::string line;
    while (std::getline(in, line)) {
        const Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("kind") || j["kind"] != "fit") continue;
        const std::string q = j.value("quantity", "");
        if (q.rfind("drift_", 0) == 0 && j["slope"].is_number()) return -j["slope"].get<double>();
    }
    return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral NLS laboratory: modified energies, ground states, orbital distances"};
    app.require_subcommand(1);

    CommonOptions gs_opts;
    double gs_tolerance = 1e-18;
    auto* gs = app.add_subcommand("ground-state", "compute the ground-state profile by shooting");
    add_common(gs, gs_opts);
    gs->add_option("--tolerance", gs_tolerance, "bisection width on Q(0)");

    CommonOptions ex_opts;
    auto* ex = app.add_subcommand("exponents", "solve and verify the Strichartz exponent system");
    add_common(ex, ex_opts);

    CommonOptions sim_opts;
    std::string sim_data = "gaussian";
    bool allow_supercritical = false;
    auto* sim = app.add_subcommand("simulate", "evolve one initial datum and write its diagnostics trace");
    add_common(sim, sim_opts);
    add_blend(sim, sim_opts);
    sim->add_option("--data", sim_data, "gaussian, focusing-gaussian, ground-state or rough");
    sim->add_flag("--allow-supercritical", allow_supercritical, "permit focusing runs with s_c >= 0");

    auto* exp = app.add_subcommand("exp", "experiment sweeps");
    exp->require_subcommand(1);

    CommonOptions ac_opts;
    auto* ac = exp->add_subcommand("almost-conservation", "drift of H(I_N u) or L(I_N u) against N");
    add_common(ac, ac_opts);
    add_blend(ac, ac_opts);

    CommonOptions st_opts;
    std::string st_profile;
    auto* st = exp->add_subcommand("stability", "orbital distance and exit times against sigma");
    add_common(st, st_opts);
    add_blend(st, st_opts);
    st->add_option("--profile", st_profile, "saved ground-state profile (computed when absent)");

    CommonOptions gr_opts;
    auto* gr = exp->add_subcommand("growth", "H^s norm trace of a defocusing run");
    add_common(gr, gr_opts);
    add_blend(gr, gr_opts);

    CommonOptions rs_opts;
    std::optional<double> rs_alpha;
    auto* rs = exp->add_subcommand("rescaling", "scaling identities and (N, lambda) selection");
    add_common(rs, rs_opts);
    add_blend(rs, rs_opts);
    rs->add_option("--alpha-fit", rs_alpha,
                   "decay exponent from an almost-conservation run (read from its summary in --out when absent)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gs) {
            const auto cfg = load(gs_opts);
            ShootOptions options;
            options.tolerance = gs_tolerance;
            const auto profile = shoot(cfg.params, options);
            const fs::path path = fs::path(gs_opts.out) / "ground_state.txt";
            save_profile(profile, path.string());
            std::cout.precision(17);
            std::cout << "q0 = " << profile.q0 << "\nresidual = " << profile.residual << "\nr_max = " << profile.r_max
                      << "\nmass = " << profile.radial_mass() << '\n';
            list_files({path});
        } else if (*ex) {
            const auto cfg = load(ex_opts);
            const auto e = solve_exponents(cfg.params.dim, exact_power(cfg));
            const std::string report = exponent_report(e);
            const fs::path path = fs::path(ex_opts.out) / "exponents.txt";
            std::ofstream(path) << report;
            std::cout << report;
            list_files({path});
        } else if (*sim) {
            const auto cfg = load(sim_opts);
            const Blend blend = parse_blend(sim_opts.blend);
            if (cfg.params.sign == Sign::focusing && !cfg.params.l2_subcritical() && !allow_supercritical)
                throw std::invalid_argument("simulate: focusing run with s_c >= 0 may blow up; pass --allow-supercritical");
            const InitialData kind = parse_initial_data(sim_data);
            SpectralField u0;
            std::optional<GroundStateProfile> profile;
            switch (kind) {
                case InitialData::gaussian: u0 = gaussian(cfg.grid); break;
                case InitialData::focusing_gaussian: u0 = focusing_gaussian(cfg.grid, 1.0, 1.5, 0.5 * cfg.solver.t_end); break;
                case InitialData::ground_state:
                    profile = shoot(cfg.params);
                    u0 = embed(*profile, cfg.grid);
                    break;
                case InitialData::rough: {
                    const double smallest = *std::min_element(cfg.N_list.begin(), cfg.N_list.end());
                    u0 = rough_data(cfg.seed, RoughDataSpec::for_sweep(smallest, cfg.grid), cfg.s, cfg.grid);
                    break;
                }
            }
            DiagnosticsOptions options{cfg.s, MultiplierSpec(cfg.s, cfg.N_list.front(), blend),
                                       profile ? &*profile : nullptr};
            const auto traj = evolve(u0, cfg.params, cfg.solver, {}, make_augmenter(cfg.params, cfg.grid, options));
            const fs::path path = fs::path(sim_opts.out) / "simulate.csv";
            write_trace_csv(path,
                            manifest("simulate", cfg, blend,
                                     {{"data", to_string(kind)},
                                      {"N", format_number(cfg.N_list.front())},
                                      {"status", to_string(traj.status)}}),
                            traj.records);
            std::cout << "status = " << to_string(traj.status) << '\n';
            if (!traj.message.empty()) std::cout << "message = " << traj.message << '\n';
            list_files({path});
            return traj.completed() ? 0 : 3;
        } else if (*ac) {
            const auto cfg = load(ac_opts);
            const auto result = run_almost_conservation(cfg, std::nullopt, parse_blend(ac_opts.blend));
            list_files(write_almost_conservation(ac_opts.out, cfg, result));
            for (const auto& r : result.rows)
                std::cout << "N = " << r.N << "  drift_H = " << r.drift_H << "  drift_L = " << r.drift_L
                          << "  commutator = " << r.commutator_max << '\n';
            if (result.drift_fit)
                std::cout << "drift slope = " << result.drift_fit->slope << "  r2 = " << result.drift_fit->r_squared << '\n';
            if (!result.fit_note.empty()) std::cout << result.fit_note << '\n';
            if (result.status != RunStatus::completed) std::cout << "run stopped: " << result.message << '\n';
            return result.status == RunStatus::completed ? 0 : 3;
        } else if (*st) {
            const auto cfg = load(st_opts);
            const Blend blend = parse_blend(st_opts.blend);
            const auto profile = profile_for(cfg, st_profile);
            const auto result = run_stability(cfg, profile, std::nullopt, blend);
            list_files(write_stability(st_opts.out, cfg, result, blend));
            for (const auto& r : result.runs) {
                std::cout << "sigma = " << r.sigma << "  exit = ";
                if (r.exit_time)
                    std::cout << *r.exit_time;
                else
                    std::cout << "none";
                std::cout << "  max dist = " << r.max_distance << "  status = " << to_string(r.status) << '\n';
            }
            std::cout << "monotone = " << (result.monotone ? "true" : "false") << '\n';
            if (result.fit) std::cout << "exit slope = " << result.fit->slope << "  r2 = " << result.fit->r_squared << '\n';
            if (!result.fit_note.empty()) std::cout << result.fit_note << '\n';
        } else if (*gr) {
            const auto cfg = load(gr_opts);
            const Blend blend = parse_blend(gr_opts.blend);
            const auto result = run_growth(cfg, std::nullopt, blend);
            list_files(write_growth(gr_opts.out, cfg, result, blend));
            if (result.fit) std::cout << "growth slope = " << result.fit->slope << '\n';
            if (!result.fit_note.empty()) std::cout << result.fit_note << '\n';
            return result.status == RunStatus::completed ? 0 : 3;
        } else if (*rs) {
            const auto cfg = load(rs_opts);
            const Blend blend = parse_blend(rs_opts.blend);
            if (!rs_alpha) rs_alpha = alpha_from_summary(fs::path(rs_opts.out) / "almost_conservation_summary.jsonl");
            if (!rs_alpha)
                throw std::invalid_argument("rescaling: pass --alpha-fit or run 'exp almost-conservation' into --out first");
            const auto result = run_rescaling(cfg, *rs_alpha, blend);
            list_files(write_rescaling(rs_opts.out, cfg, result, blend));
            for (const auto& r : result.rows)
                std::cout << "lambda = " << r.lambda << "  max rel error = " << r.max_relative_error << '\n';
            std::cout << "parameters: " << result.choice.reason;
            if (result.choice.feasible) std::cout << "  N = " << result.choice.N << "  lambda = " << result.choice.lambda;
            std::cout << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
