#pragma once

// Distance to the ground-state cylinder {e^{i theta} Q(. - x0)} in H^s, the
// modulation parameters realizing it, and the Lyapunov comparison ratio.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "imethod/functionals.hpp"
#include "imethod/ground_state.hpp"
#include "imethod/spectral.hpp"

namespace imethod {

struct PhaseFit {
    double theta = 0.0;
    bool degenerate = false;
};

struct ModulationFit {
    double distance = 0.0;
    double theta = 0.0;  // in [0, 2 pi)
    std::array<double, 3> x0{0.0, 0.0, 0.0};
    bool converged = false;
    long evaluations = 0;
    bool phase_degenerate = false;
};

/// <u, v>_{H^s} = L^-n sum <2 pi xi>^(2s) u_hat conj(v_hat).
inline Complex sobolev_inner(const SpectralField& u, const SpectralField& v, double s) {
    u.check_compatible(v);
    const SpectralField uh = to_frequency(u);
    const SpectralField vh = to_frequency(v);
    const auto w = sobolev_weights(u.grid, s, DerivativeKind::inhomogeneous);
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < uh.size(); ++i) acc += w[i] * uh.samples[i] * std::conj(vh.samples[i]);
    return acc / u.grid.volume();
}

inline double wrap_phase(double theta) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    theta = std::fmod(theta, two_pi);
    if (theta < 0.0) theta += two_pi;
    return theta >= two_pi ? 0.0 : theta;
}

/// Minimizer of ||u - e^{i theta} v||_{H^s} over theta.
inline PhaseFit optimal_phase(const SpectralField& u, const SpectralField& v, double s) {
    const double v_norm = sobolev_norm(v, s);
    if (!(v_norm > 0.0)) throw ContractViolation("optimal_phase: v must be nonzero");
    const Complex c = sobolev_inner(u, v, s);
    const double u_norm = sobolev_norm(u, s);
    if (std::abs(c) <= 1e-14 * u_norm * v_norm || std::abs(c) == 0.0) return {0.0, true};
    return {wrap_phase(std::arg(c)), false};
}

namespace detail {

// Precomputed pieces of the translation objective: c(y) = L^-n sum w u_hat conj(q_hat) e^{2 pi i xi.y}.
class CylinderObjective {
public:
    CylinderObjective(const SpectralField& u, const SpectralField& q, double s)
        : grid_(u.grid), weights_(sobolev_weights(u.grid, s, DerivativeKind::inhomogeneous)) {
        u_hat_ = to_frequency(u);
        q_hat_ = to_frequency(q);
        cross_.resize(grid_.size());
        for (std::size_t i = 0; i < cross_.size(); ++i)
            cross_[i] = weights_[i] * u_hat_.samples[i] * std::conj(q_hat_.samples[i]) / grid_.volume();
        xi_.resize(grid_.size());
        for_each_frequency(grid_, [&](std::size_t i, const std::array<double, 3>& xi) { xi_[i] = xi; });
    }

    /// c(y) at every grid point y = x_j in one inverse transform.
    SpectralField lattice_correlation() const {
        SpectralField corr(grid_, Representation::frequency);
        for (std::size_t i = 0; i < cross_.size(); ++i) corr.samples[i] = cross_[i] * grid_.volume();
        return to_physical(std::move(corr));
    }

    Complex correlation(const std::array<double, 3>& y) const {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        Complex acc{0.0, 0.0};
        for (std::size_t i = 0; i < cross_.size(); ++i) {
            double phase = 0.0;
            for (int d = 0; d < grid_.dim; ++d) phase += xi_[i][d] * y[d];
            acc += cross_[i] * std::polar(1.0, two_pi * phase);
        }
        return acc;
    }

    /// ||u - e^{i theta} q(. - y)||_{H^s}, summed directly (no norm subtraction).
    double distance(double theta, const std::array<double, 3>& y) const {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        const Complex rot = std::polar(1.0, theta);
        double acc = 0.0;
        for (std::size_t i = 0; i < cross_.size(); ++i) {
            double phase = 0.0;
            for (int d = 0; d < grid_.dim; ++d) phase += xi_[i][d] * y[d];
            const Complex shifted = rot * q_hat_.samples[i] * std::polar(1.0, -two_pi * phase);
            acc += weights_[i] * std::norm(u_hat_.samples[i] - shifted);
        }
        return std::sqrt(acc / grid_.volume());
    }

    double u_norm_sq() const { return weighted_coefficient_sum(u_hat_, weights_); }
    double q_norm_sq() const { return weighted_coefficient_sum(q_hat_, weights_); }

private:
    BoxGrid grid_;
    std::vector<double> weights_;
    SpectralField u_hat_, q_hat_;
    std::vector<Complex> cross_;
    std::vector<std::array<double, 3>> xi_;
};

inline double squared_length(const std::array<double, 3>& y, int dim) {
    double acc = 0.0;
    for (int d = 0; d < dim; ++d) acc += y[d] * y[d];
    return acc;
}

}  // namespace detail

/// dist_{H^s}(u, cylinder of the profile): a global pass over lattice shifts
/// followed by coordinate-wise parabolic refinement of the shift.
inline ModulationFit dist_to_cylinder(const SpectralField& u, const GroundStateProfile& profile, double s,
                                      const BoxGrid& grid) {
    if (!(u.grid == grid)) throw ContractViolation("dist_to_cylinder: field is not on the given grid");
    const SpectralField q = embed(profile, grid);
    const detail::CylinderObjective objective(u, q, s);
    ModulationFit fit;

    // Coarse: maximize |c(y)| over the lattice; ties go to the smallest |y|, then lexicographic.
    const SpectralField corr = objective.lattice_correlation();
    fit.evaluations = static_cast<long>(grid.size());
    double best_abs = -1.0;
    std::array<double, 3> best_y{0.0, 0.0, 0.0};
    const double tie = 1e-12;
    for_each_point(grid, [&](std::size_t i, const std::array<double, 3>& x) {
        const double a = std::abs(corr.samples[i]);
        bool take = false;
        if (a > best_abs * (1.0 + tie) + 0.0 || best_abs < 0.0) {
            take = true;
        } else if (a >= best_abs * (1.0 - tie)) {
            const double rx = detail::squared_length(x, grid.dim), rb = detail::squared_length(best_y, grid.dim);
            if (rx < rb || (rx == rb && x < best_y)) take = true;
        }
        if (take) {
            best_abs = std::max(a, best_abs);
            best_y = x;
        }
    });

    auto score = [&](const std::array<double, 3>& y) {
        ++fit.evaluations;
        return std::norm(objective.correlation(y));
    };

    // Refine: parabolic steps on |c(y)|^2 one coordinate at a time.
    const double dx = grid.spacing();
    const double tol = 1e-4 * dx;
    std::array<double, 3> y = best_y;
    double f0 = score(y);
    const double coarse_score = f0;
    double h = 0.5 * dx;
    fit.converged = false;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double largest_move = 0.0;
        for (int d = 0; d < grid.dim; ++d) {
            auto yp = y, ym = y;
            yp[d] += h;
            ym[d] -= h;
            const double fp = score(yp), fm = score(ym);
            std::array<double, 3> cand = y;
            double fc = f0;
            if (fp > fc) cand = yp, fc = fp;
            if (fm > fc) cand = ym, fc = fm;
            const double curvature = fp + fm - 2.0 * f0;
            if (curvature < 0.0) {
                const double step = std::clamp(0.5 * h * (fp - fm) / -curvature, -h, h);
                auto yv = y;
                yv[d] += step;
                const double fv = score(yv);
                if (fv > fc) cand = yv, fc = fv;
            }
            largest_move = std::max(largest_move, std::abs(cand[d] - y[d]));
            y = cand;
            f0 = fc;
        }
        if (largest_move < tol && h <= 2.0 * tol) {
            fit.converged = true;
            break;
        }
        h = std::clamp(2.0 * largest_move, tol, h);
        if (largest_move < tol) h = std::max(tol, 0.25 * h);
    }
    if (f0 < coarse_score) {  // never worse than the coarse pass
        y = best_y;
        fit.converged = false;
    }

    const Complex c = objective.correlation(y);
    fit.phase_degenerate = std::abs(c) <= 1e-14 * std::sqrt(objective.u_norm_sq() * objective.q_norm_sq()) ||
                           std::abs(c) == 0.0;
    fit.theta = fit.phase_degenerate ? 0.0 : wrap_phase(std::arg(c));
    // Report the shift in the box [-L/2, L/2).
    for (int d = 0; d < grid.dim; ++d) y[d] -= grid.length * std::floor(y[d] / grid.length + 0.5);
    fit.x0 = y;
    fit.distance = objective.distance(fit.theta, y);
    return fit;
}

struct WeinsteinRatio {
    double ratio = 0.0;
    double distance = 0.0;   // dist_{H^1}(u, cylinder)
    bool near_edge = false;  // distance above half the trust radius
};

inline constexpr double kWeinsteinTrustRadius = 0.5;

/// (L(u) - L(Q)) / dist_{H^1}(u, cylinder)^2 for 0 < dist < 0.5.
inline WeinsteinRatio weinstein_ratio(const SpectralField& u, const GroundStateProfile& profile, const BoxGrid& grid) {
    const ModulationFit fit = dist_to_cylinder(u, profile, 1.0, grid);
    const SpectralField q = embed(profile, grid);
    const double floor = 1e-9 * sobolev_norm(q, 1.0);
    if (!(fit.distance > floor && fit.distance < kWeinsteinTrustRadius))
        throw std::domain_error("weinstein_ratio: outside small-distance regime (distance " +
                                std::to_string(fit.distance) + ")");
    const double gap = lyapunov(u, profile.params) - lyapunov(q, profile.params);
    return {gap / (fit.distance * fit.distance), fit.distance, fit.distance > 0.5 * kWeinsteinTrustRadius};
}

/// Direction v with Re v orthogonal in L^2 to Q and every d_j Q, and Im v
/// orthogonal to Q, scaled to unit H^1 norm. Along these directions the
/// Lyapunov functional grows quadratically away from Q.
inline SpectralField orthogonal_perturbation(const SpectralField& direction, const SpectralField& q) {
    direction.check_compatible(q);
    const BoxGrid& grid = q.grid;
    const SpectralField qp = to_physical(q);
    std::vector<std::vector<double>> basis_re{}, basis_im{};
    auto real_part = [&](const SpectralField& f) {
        std::vector<double> out(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) out[i] = f.samples[i].real();
        return out;
    };
    basis_re.push_back(real_part(qp));
    basis_im.push_back(real_part(qp));
    for (int d = 0; d < grid.dim; ++d) {
        SpectralField g = to_frequency(qp);
        for_each_frequency(grid, [&](std::size_t i, const std::array<double, 3>& xi) {
            g.samples[i] *= Complex(0.0, 2.0 * std::numbers::pi * xi[d]);
        });
        basis_re.push_back(real_part(to_physical(std::move(g))));
    }
    auto orthogonalize = [](std::vector<double>& x, std::vector<std::vector<double>> basis) {
        // modified Gram-Schmidt on the basis, then project x out
        for (std::size_t k = 0; k < basis.size(); ++k) {
            for (std::size_t j = 0; j < k; ++j) {
                double dot = 0.0;
                for (std::size_t i = 0; i < x.size(); ++i) dot += basis[k][i] * basis[j][i];
                for (std::size_t i = 0; i < x.size(); ++i) basis[k][i] -= dot * basis[j][i];
            }
            double nrm = 0.0;
            for (double v : basis[k]) nrm += v * v;
            nrm = std::sqrt(nrm);
            if (nrm == 0.0) continue;
            for (double& v : basis[k]) v /= nrm;
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) {
                double dot = 0.0;
                for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * b[i];
                for (std::size_t i = 0; i < x.size(); ++i) x[i] -= dot * b[i];
            }
        }
    };
    const SpectralField v = to_physical(direction);
    std::vector<double> re(v.size()), im(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        re[i] = v.samples[i].real();
        im[i] = v.samples[i].imag();
    }
    orthogonalize(re, basis_re);
    orthogonalize(im, basis_im);
    SpectralField out(grid);
    for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] = Complex(re[i], im[i]);
    const double norm = sobolev_norm(out, 1.0);
    if (!(norm > 0.0)) throw std::domain_error("orthogonal_perturbation: direction lies in the excluded span");
    out *= Complex(1.0 / norm, 0.0);
    return out;
}

}  // namespace imethod
