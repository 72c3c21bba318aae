#pragma once

// Experiment drivers: almost-conservation sweeps over N, orbital stability
// sweeps over sigma, Sobolev growth traces and the rescaling pipeline.

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "imethod/config.hpp"
#include "imethod/data.hpp"
#include "imethod/fitting.hpp"
#include "imethod/functionals.hpp"
#include "imethod/ground_state.hpp"
#include "imethod/integrator.hpp"
#include "imethod/operators.hpp"
#include "imethod/orbital.hpp"

namespace imethod {

/// H(I u), L(I u) and the commutator for one multiplier.
struct ModifiedQuantities {
    double hamiltonian_i = 0.0;
    double lyapunov_i = 0.0;
    double commutator = 0.0;
};

inline ModifiedQuantities modified_quantities(const SpectralField& u, const SymbolTable& multiplier,
                                              const EquationParams& params) {
    const SpectralField iu = multiplier.apply(u);
    ModifiedQuantities q;
    q.hamiltonian_i = hamiltonian(iu, params);
    q.lyapunov_i = 2.0 * q.hamiltonian_i + mass(iu);
    q.commutator = commutator_residual(u, multiplier, params);
    return q;
}

struct DiagnosticsOptions {
    double s = 0.9;
    std::optional<MultiplierSpec> multiplier;  // fills H_I, L_I and the commutator
    const GroundStateProfile* profile = nullptr;  // fills dist
};

/// Augmenter for evolve(): H^s norm always, the rest as requested.
inline RecordAugmenter make_augmenter(const EquationParams& params, const BoxGrid& grid,
                                      const DiagnosticsOptions& options) {
    std::optional<SymbolTable> table;
    if (options.multiplier) table = multiplier_table(grid, *options.multiplier);
    return [params, grid, options, table](const SpectralField& u, DiagnosticsRecord& rec) {
        rec.sobolev_norm = sobolev_norm(u, options.s);
        if (table) {
            const auto q = modified_quantities(u, *table, params);
            rec.hamiltonian_i = q.hamiltonian_i;
            rec.lyapunov_i = q.lyapunov_i;
            rec.commutator = q.commutator;
        }
        if (options.profile) rec.distance = dist_to_cylinder(u, *options.profile, options.s, grid).distance;
    };
}

/// max_t |f(t) - f(0)| / |f(0)| over the records (absolute when f(0) = 0).
template <class Get>
double relative_drift(const std::vector<DiagnosticsRecord>& records, Get&& get) {
    if (records.empty()) return 0.0;
    const double f0 = get(records.front());
    double worst = 0.0;
    for (const auto& r : records) worst = std::max(worst, std::abs(get(r) - f0));
    return f0 != 0.0 ? worst / std::abs(f0) : worst;
}

// ---------------------------------------------------------------- almost conservation

struct DriftRow {
    double N = 0.0;
    double drift_H = 0.0;  // sup_t |H(I u(t)) - H(I u(0))|
    double drift_L = 0.0;  // sup_t |L(I u(t)) - L(I u(0))|
    double commutator_max = 0.0;
    double commutator_initial = 0.0;
};

struct AlmostConservationResult {
    std::vector<DriftRow> rows;
    std::vector<std::vector<DiagnosticsRecord>> traces;  // one per N, same sample times
    std::string drift_quantity;                          // "H" (defocusing) or "L" (focusing)
    std::optional<LogLogFit> drift_fit;
    std::optional<LogLogFit> commutator_fit;
    std::string fit_note;
    RunStatus status = RunStatus::completed;
    std::string message;
    double mass_drift = 0.0;         // relative
    double hamiltonian_drift = 0.0;  // relative, unmodified H
    Blend blend = Blend::smoothstep_log;
};

/// Evolves the data once and evaluates I_N diagnostics for every N at each sample.
inline AlmostConservationResult run_almost_conservation(const ExperimentConfig& config,
                                                        std::optional<SpectralField> initial = std::nullopt,
                                                        Blend blend = Blend::smoothstep_log) {
    config.validate();
    const EquationParams& params = config.params;
    if (params.sign == Sign::focusing && !params.l2_subcritical())
        throw std::invalid_argument("almost-conservation: focusing runs require s_c < 0");
    if (!initial) {
        const double smallest = *std::min_element(config.N_list.begin(), config.N_list.end());
        initial = rough_data(config.seed, RoughDataSpec::for_sweep(smallest, config.grid), config.s, config.grid);
    }
    std::vector<SymbolTable> tables;
    for (double N : config.N_list) tables.push_back(multiplier_table(config.grid, MultiplierSpec(config.s, N, blend)));

    std::vector<std::vector<ModifiedQuantities>> per_N(tables.size());
    const Observer observer = [&](const SpectralField& u, double) {
        for (std::size_t k = 0; k < tables.size(); ++k) per_N[k].push_back(modified_quantities(u, tables[k], params));
    };
    const Trajectory traj =
        evolve(*initial, params, config.solver, {observer}, make_augmenter(params, config.grid, {config.s, {}, nullptr}));

    AlmostConservationResult result;
    result.blend = blend;
    result.status = traj.status;
    result.message = traj.message;
    result.drift_quantity = params.sign == Sign::defocusing ? "H" : "L";
    result.mass_drift = relative_drift(traj.records, [](const DiagnosticsRecord& r) { return r.mass; });
    result.hamiltonian_drift = relative_drift(traj.records, [](const DiagnosticsRecord& r) { return r.hamiltonian; });
    for (std::size_t k = 0; k < tables.size(); ++k) {
        std::vector<DiagnosticsRecord> trace = traj.records;
        DriftRow row;
        row.N = config.N_list[k];
        for (std::size_t j = 0; j < trace.size(); ++j) {
            const auto& q = per_N[k][j];
            trace[j].hamiltonian_i = q.hamiltonian_i;
            trace[j].lyapunov_i = q.lyapunov_i;
            trace[j].commutator = q.commutator;
            row.drift_H = std::max(row.drift_H, std::abs(q.hamiltonian_i - per_N[k][0].hamiltonian_i));
            row.drift_L = std::max(row.drift_L, std::abs(q.lyapunov_i - per_N[k][0].lyapunov_i));
            row.commutator_max = std::max(row.commutator_max, q.commutator);
        }
        if (!per_N[k].empty()) row.commutator_initial = per_N[k][0].commutator;
        result.rows.push_back(row);
        result.traces.push_back(std::move(trace));
    }

    std::vector<std::pair<double, double>> drift_pts, comm_pts;
    for (const auto& row : result.rows) {
        drift_pts.emplace_back(row.N, result.drift_quantity == "H" ? row.drift_H : row.drift_L);
        comm_pts.emplace_back(row.N, row.commutator_max);
    }
    try {
        result.drift_fit = fit_loglog(drift_pts);
    } catch (const std::invalid_argument& e) {
        result.fit_note = std::string("drift fit unavailable: ") + e.what();
    }
    try {
        result.commutator_fit = fit_loglog(comm_pts);
    } catch (const std::invalid_argument& e) {
        result.fit_note += (result.fit_note.empty() ? "" : "; ") + std::string("commutator fit unavailable: ") + e.what();
    }
    return result;
}

// ---------------------------------------------------------------- orbital stability

struct StabilityRun {
    double sigma = 0.0;
    std::optional<double> N;  // sigma^-a, for sigma > 0
    double radius = 0.0;
    std::optional<double> exit_time;  // first t with ||u(t)||_{H^s} > radius
    double max_distance = 0.0;
    std::vector<DiagnosticsRecord> records;
    RunStatus status = RunStatus::completed;
    std::string message;
};

struct StabilityResult {
    std::vector<StabilityRun> runs;  // in sigma_list order
    bool monotone = true;            // exit time nondecreasing as sigma decreases (ties allowed)
    std::optional<LogLogFit> fit;    // log t* against log(1/sigma)
    std::string fit_note;
    FrequencyBand band;
};

/// Default perturbation band for stability sweeps.
inline FrequencyBand stability_band() { return {0.05, 1.0}; }

inline StabilityRun stability_run(const ExperimentConfig& config, const GroundStateProfile& profile, double sigma,
                                  FrequencyBand band, Blend blend = Blend::smoothstep_log) {
    StabilityRun run;
    run.sigma = sigma;
    SpectralField u0 = embed(profile, config.grid);
    if (sigma > 0.0) u0 += perturbation(config.seed, band, config.s, sigma, config.grid);
    run.radius = config.radius_R > 0.0 ? config.radius_R : 2.0 * sobolev_norm(u0, config.s);
    DiagnosticsOptions options{config.s, {}, &profile};
    if (sigma > 0.0) {
        run.N = std::max(1.0, std::pow(sigma, -config.a));
        options.multiplier = MultiplierSpec(config.s, *run.N, blend);
    }
    const Trajectory traj = evolve(u0, config.params, config.solver, {}, make_augmenter(config.params, config.grid, options));
    run.records = traj.records;
    run.status = traj.status;
    run.message = traj.message;
    for (const auto& r : run.records) {
        if (r.distance) run.max_distance = std::max(run.max_distance, *r.distance);
        if (!run.exit_time && r.sobolev_norm && *r.sobolev_norm > run.radius) run.exit_time = r.t;
    }
    return run;
}

inline StabilityResult run_stability(const ExperimentConfig& config, const GroundStateProfile& profile,
                                     std::optional<FrequencyBand> band = std::nullopt,
                                     Blend blend = Blend::smoothstep_log) {
    config.validate();
    if (config.params.sign != Sign::focusing || !config.params.l2_subcritical())
        throw std::invalid_argument("stability: requires the focusing sign and s_c < 0");
    if (profile.params.dim != config.params.dim || profile.params.power != config.params.power)
        throw std::invalid_argument("stability: ground-state profile does not match the equation");
    StabilityResult result;
    result.band = band.value_or(stability_band());

    std::vector<std::future<StabilityRun>> jobs;
    for (double sigma : config.sigma_list)
        jobs.push_back(std::async(std::launch::async, [&, sigma] {
            return stability_run(config, profile, sigma, result.band, blend);
        }));
    for (auto& job : jobs) result.runs.push_back(job.get());

    // Exit times against decreasing sigma; "no exit" counts as +infinity.
    std::vector<const StabilityRun*> order;
    for (const auto& r : result.runs)
        if (r.sigma > 0.0) order.push_back(&r);
    std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->sigma > b->sigma; });
    auto exit_or_inf = [](const StabilityRun* r) {
        return r->exit_time.value_or(std::numeric_limits<double>::infinity());
    };
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const bool undetermined = (order[i]->status != RunStatus::completed && !order[i]->exit_time) ||
                                  (order[i + 1]->status != RunStatus::completed && !order[i + 1]->exit_time);
        if (undetermined || exit_or_inf(order[i + 1]) < exit_or_inf(order[i])) result.monotone = false;
    }

    std::vector<std::pair<double, double>> pts;
    for (const auto* r : order)
        if (r->exit_time && *r->exit_time > 0.0) pts.emplace_back(1.0 / r->sigma, *r->exit_time);
    if (pts.size() >= 3) {
        result.fit = fit_loglog(pts);
    } else {
        std::ostringstream note;
        note << "exit-time fit unavailable: " << pts.size() << " of " << order.size()
             << " perturbed runs left the H^s ball before t_end";
        result.fit_note = note.str();
    }
    return result;
}

// ---------------------------------------------------------------- growth

struct GrowthResult {
    std::vector<DiagnosticsRecord> records;
    std::optional<LogLogFit> fit;  // running max of ||u(t)||_{H^s} against t, t > 0
    std::string fit_note;
    RunStatus status = RunStatus::completed;
    std::string message;
};

inline GrowthResult run_growth(const ExperimentConfig& config, std::optional<SpectralField> initial = std::nullopt,
                               Blend blend = Blend::smoothstep_log) {
    config.validate();
    if (config.params.sign != Sign::defocusing) throw std::invalid_argument("growth: requires the defocusing sign");
    if (!initial) {
        const double smallest = *std::min_element(config.N_list.begin(), config.N_list.end());
        initial = rough_data(config.seed, RoughDataSpec::for_sweep(smallest, config.grid), config.s, config.grid);
    }
    DiagnosticsOptions options{config.s, MultiplierSpec(config.s, config.N_list.front(), blend), nullptr};
    const Trajectory traj = evolve(*initial, config.params, config.solver, {}, make_augmenter(config.params, config.grid, options));
    GrowthResult result;
    result.records = traj.records;
    result.status = traj.status;
    result.message = traj.message;
    std::vector<std::pair<double, double>> pts;
    double running = 0.0;
    for (const auto& r : result.records) {
        running = std::max(running, r.sobolev_norm.value_or(0.0));
        if (r.t > 0.0) pts.emplace_back(r.t, running);
    }
    try {
        result.fit = fit_loglog(pts);
    } catch (const std::invalid_argument& e) {
        result.fit_note = std::string("growth fit unavailable: ") + e.what();
    }
    return result;
}

// ---------------------------------------------------------------- rescaling

struct ParameterMenu {
    double N_min = 8.0;
    int N_doublings = 24;
    double lambda_min = 2.0;
    int lambda_doublings = 40;
};

struct ParameterChoice {
    bool feasible = false;
    double N = 0.0;
    double lambda = 0.0;
    double hamiltonian_bound = 0.0;  // N^(2(1-s)) lambda^(2(s_c-s))
    double time_reach = 0.0;         // N^alpha / lambda^2
    std::string reason;
};

/// Smallest N on the menu, then smallest lambda, with
/// N^(2(1-s)) lambda^(2(s_c-s)) <= 0.1 and N^alpha / lambda^2 >= 10 T.
inline ParameterChoice choose_parameters(double T_target, double s, const EquationParams& params, double alpha_fit,
                                         const ParameterMenu& menu = {}) {
    if (!(T_target >= 0.0)) throw ContractViolation("choose_parameters: T_target must be >= 0");
    if (!(s > 0.0 && s <= 1.0)) throw ContractViolation("choose_parameters: s must lie in (0, 1]");
    ParameterChoice choice;
    const double sc = params.critical_regularity();
    if (!(alpha_fit > 0.0)) {
        choice.reason = "infeasible: fitted decay exponent alpha <= 0 gives no time gain from N";
        return choice;
    }
    if (!(sc < s)) {
        choice.reason = "infeasible: s_c >= s, rescaling cannot shrink the modified energy";
        return choice;
    }
    for (int i = 0; i <= menu.N_doublings; ++i) {
        const double N = menu.N_min * std::ldexp(1.0, i);
        for (int j = 0; j <= menu.lambda_doublings; ++j) {
            const double lambda = menu.lambda_min * std::ldexp(1.0, j);
            const double bound = std::pow(N, 2.0 * (1.0 - s)) * std::pow(lambda, 2.0 * (sc - s));
            const double reach = std::pow(N, alpha_fit) / (lambda * lambda);
            if (reach < 10.0 * T_target) break;  // larger lambda only shortens the reach
            if (bound <= 0.1) {
                choice = {true, N, lambda, bound, reach, "feasible"};
                return choice;
            }
        }
    }
    choice.reason = "infeasible: menu exhausted";
    return choice;
}

struct ScalingRow {
    double lambda = 1.0;
    double hs_ratio = 0.0;        // ||u_lambda||_{Hdot^s} / ||u||_{Hdot^s}
    double hs_expected = 0.0;     // lambda^(s_c - s)
    double l2_ratio = 0.0;        // ||u_lambda||_2 / ||u||_2
    double l2_expected = 0.0;     // lambda^(s_c): the s = 0 case of the line above
    double max_relative_error = 0.0;
};

inline ScalingRow scaling_check(const SpectralField& u, double lambda, double s, const EquationParams& params) {
    const SpectralField v = rescale(u, lambda, params);
    const double sc = params.critical_regularity();
    ScalingRow row;
    row.lambda = lambda;
    row.hs_ratio = sobolev_norm(v, s, DerivativeKind::homogeneous) / sobolev_norm(u, s, DerivativeKind::homogeneous);
    row.hs_expected = std::pow(lambda, sc - s);
    row.l2_ratio = std::sqrt(mass(v) / mass(u));
    row.l2_expected = std::pow(lambda, sc);
    row.max_relative_error = std::max(std::abs(row.hs_ratio / row.hs_expected - 1.0),
                                      std::abs(row.l2_ratio / row.l2_expected - 1.0));
    return row;
}

/// Band-limited test data for the scaling identities.
inline SpectralField scaling_test_data(const ExperimentConfig& config) {
    return perturbation(config.seed, {0.0, 0.25 * config.grid.xi_max()}, config.s, 1.0, config.grid);
}

struct RescalingResult {
    std::vector<ScalingRow> rows;
    ParameterChoice choice;
    double alpha_fit = 0.0;
    Trajectory rescaled_run;  // evolution of the rescaled Gaussian at config.lambda
    BoxGrid rescaled_grid;
};

inline RescalingResult run_rescaling(const ExperimentConfig& config, double alpha_fit,
                                     Blend blend = Blend::smoothstep_log) {
    config.validate();
    RescalingResult result;
    result.alpha_fit = alpha_fit;
    const SpectralField data = scaling_test_data(config);
    std::vector<double> lambdas{1.0, 2.0, 4.0, 8.0};
    if (std::find(lambdas.begin(), lambdas.end(), config.lambda) == lambdas.end()) lambdas.push_back(config.lambda);
    for (double lambda : lambdas) result.rows.push_back(scaling_check(data, lambda, config.s, config.params));
    result.choice = choose_parameters(config.solver.t_end, config.s, config.params, alpha_fit);

    const SpectralField u_lambda = rescale(gaussian(config.grid), config.lambda, config.params);
    result.rescaled_grid = u_lambda.grid;
    DiagnosticsOptions options{config.s, MultiplierSpec(config.s, config.N_list.front(), blend), nullptr};
    result.rescaled_run = evolve(u_lambda, config.params, config.solver, {},
                                 make_augmenter(config.params, u_lambda.grid, options));
    return result;
}

// ---------------------------------------------------------------- single runs

enum class InitialData { gaussian, focusing_gaussian, ground_state, rough };

inline InitialData parse_initial_data(const std::string& name) {
    if (name == "gaussian") return InitialData::gaussian;
    if (name == "focusing-gaussian") return InitialData::focusing_gaussian;
    if (name == "ground-state") return InitialData::ground_state;
    if (name == "rough") return InitialData::rough;
    throw std::invalid_argument("unknown initial data '" + name +
                                "' (expected gaussian, focusing-gaussian, ground-state or rough)");
}

inline const char* to_string(InitialData d) {
    switch (d) {
        case InitialData::gaussian: return "gaussian";
        case InitialData::focusing_gaussian: return "focusing-gaussian";
        case InitialData::ground_state: return "ground-state";
        case InitialData::rough: return "rough";
    }
    return "unknown";
}

}  // namespace imethod
