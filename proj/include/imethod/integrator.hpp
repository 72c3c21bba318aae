#pragma once

// Strang split-step integration of iu_t + Delta u = F(u) on the periodic box.
// Both substeps are exact flows: the linear one is a unimodular Fourier
// multiplier, the nonlinear one a pointwise phase rotation.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "imethod/functionals.hpp"
#include "imethod/spectral.hpp"

namespace imethod {

struct SolverConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    int sample_every = 100;
    double tail_fraction_max = 1e-4;
    double localization_min = 0.99;

    /// Checks ranges and the linear phase bound dt (2 pi M/(2L))^2 <= pi.
    void validate(const BoxGrid& grid) const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ContractViolation("SolverConfig: dt must be positive");
        if (!(t_end >= 0.0)) throw ContractViolation("SolverConfig: t_end must be nonnegative");
        if (sample_every < 1) throw ContractViolation("SolverConfig: sample_every must be >= 1");
        if (!(tail_fraction_max >= 0.0 && tail_fraction_max < 1.0))
            throw ContractViolation("SolverConfig: tail_fraction_max must lie in [0, 1)");
        if (!(localization_min > 0.0 && localization_min <= 1.0))
            throw ContractViolation("SolverConfig: localization_min must lie in (0, 1]");
        const double k = 2.0 * std::numbers::pi * grid.xi_max();
        if (dt * k * k > std::numbers::pi) {
            std::ostringstream msg;
            msg << "SolverConfig: dt = " << dt << " exceeds the linear phase bound pi/(2 pi xi_max)^2 = "
                << std::numbers::pi / (k * k);
            throw ContractViolation(msg.str());
        }
    }

    long step_count() const { return std::lround(t_end / dt); }
};

/// One sampled row of a trajectory.
struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    double hamiltonian = 0.0;
    double lyapunov = 0.0;
    std::optional<double> hamiltonian_i;
    std::optional<double> lyapunov_i;
    std::optional<double> sobolev_norm;
    std::optional<double> distance;
    std::optional<double> commutator;
    double tail_fraction = 0.0;
};

enum class RunStatus { completed, under_resolved, box_too_small, non_finite };

inline const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::completed: return "completed";
        case RunStatus::under_resolved: return "under-resolved";
        case RunStatus::box_too_small: return "box too small";
        case RunStatus::non_finite: return "non-finite sample";
    }
    return "unknown";
}

struct Trajectory {
    SpectralField final_field;
    std::vector<DiagnosticsRecord> records;
    RunStatus status = RunStatus::completed;
    std::string message;
    double final_time = 0.0;

    bool completed() const { return status == RunStatus::completed; }
};

/// Exact free flow: coefficient at xi multiplied by exp(-i 4 pi^2 |xi|^2 dt).
class LinearPropagator {
public:
    LinearPropagator(const BoxGrid& grid, double dt) : grid_(grid), phase_(grid.size()) {
        constexpr double four_pi_sq = 4.0 * std::numbers::pi * std::numbers::pi;
        for_each_frequency(grid, [&](std::size_t i, const std::array<double, 3>& xi) {
            const double k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
            phase_[i] = std::polar(1.0, -four_pi_sq * k2 * dt);
        });
    }

    /// In place on a physical-space field.
    void apply(SpectralField& field) const {
        transform_in_place(field, Direction::forward);
        for (std::size_t i = 0; i < phase_.size(); ++i) field.samples[i] *= phase_[i];
        transform_in_place(field, Direction::inverse);
    }

private:
    BoxGrid grid_;
    std::vector<Complex> phase_;
};

inline SpectralField linear_substep(const SpectralField& field, double dt) {
    SpectralField out = to_physical(field);
    if (dt == 0.0) return out;
    LinearPropagator(field.grid, dt).apply(out);
    return out;
}

/// Exact flow of iu_t = F(u): u exp(-+ i |u|^(p-1) dt) (minus sign for defocusing).
inline void nonlinear_substep_in_place(SpectralField& field, double dt, const EquationParams& params) {
    if (!field.is_physical()) throw ContractViolation("nonlinear_substep: physical-space field required");
    const double rate = -params.sign_factor() * dt;
    const double q = params.power - 1.0;
    for (auto& v : field.samples) {
        const double magnitude = std::abs(v);
        if (magnitude == 0.0) continue;
        v *= std::polar(1.0, rate * abs_pow(magnitude, q));
    }
}

inline SpectralField nonlinear_substep(const SpectralField& field, double dt, const EquationParams& params) {
    SpectralField out = field;
    nonlinear_substep_in_place(out, dt, params);
    return out;
}

/// nonlinear(dt/2) o linear(dt) o nonlinear(dt/2).
inline SpectralField strang_step(const SpectralField& field, double dt, const EquationParams& params) {
    SpectralField out = to_physical(field);
    nonlinear_substep_in_place(out, 0.5 * dt, params);
    LinearPropagator(field.grid, dt).apply(out);
    nonlinear_substep_in_place(out, 0.5 * dt, params);
    return out;
}

using Observer = std::function<void(const SpectralField&, double)>;
/// Fills the optional columns of a record from the current field.
using RecordAugmenter = std::function<void(const SpectralField&, DiagnosticsRecord&)>;

inline bool all_finite(const SpectralField& field) {
    for (const auto& v : field.samples)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

/// Integrates to config.t_end with fixed dt. Every sample_every steps (and at
/// t = 0 and the final step) a record is taken, the guards are checked and the
/// observers are called. A guard failure stops the run and is reported in the
/// returned status; records up to that point are kept.
inline Trajectory evolve(const SpectralField& initial, const EquationParams& params, const SolverConfig& config,
                         const std::vector<Observer>& observers = {}, const RecordAugmenter& augment = {}) {
    config.validate(initial.grid);
    Trajectory traj;
    SpectralField u = to_physical(initial);
    const LinearPropagator linear(u.grid, config.dt);
    const long steps = config.step_count();

    auto sample = [&](double t) -> bool {
        if (!all_finite(u)) {
            traj.status = RunStatus::non_finite;
            traj.message = "non-finite sample at t = " + std::to_string(t);
            return false;
        }
        DiagnosticsRecord rec;
        rec.t = t;
        rec.mass = mass(u);
        rec.hamiltonian = hamiltonian(u, params);
        rec.lyapunov = 2.0 * rec.hamiltonian + rec.mass;
        rec.tail_fraction = tail_fraction(u);
        if (augment) augment(u, rec);
        traj.records.push_back(rec);
        for (const auto& obs : observers) obs(u, t);
        if (rec.tail_fraction > config.tail_fraction_max) {
            traj.status = RunStatus::under_resolved;
            std::ostringstream msg;
            msg << "under-resolved: tail fraction " << rec.tail_fraction << " > " << config.tail_fraction_max
                << " at t = " << t;
            traj.message = msg.str();
            return false;
        }
        const double loc = localization(u);
        if (loc < config.localization_min) {
            traj.status = RunStatus::box_too_small;
            std::ostringstream msg;
            msg << "box too small: central-half mass fraction " << loc << " < " << config.localization_min
                << " at t = " << t;
            traj.message = msg.str();
            return false;
        }
        return true;
    };

    bool ok = sample(0.0);
    double t = 0.0;
    for (long step = 1; ok && step <= steps; ++step) {
        nonlinear_substep_in_place(u, 0.5 * config.dt, params);
        linear.apply(u);
        nonlinear_substep_in_place(u, 0.5 * config.dt, params);
        t = step * config.dt;
        if (step % config.sample_every == 0 || step == steps) ok = sample(t);
    }
    traj.final_time = t;
    traj.final_field = std::move(u);
    return traj;
}

}  // namespace imethod
