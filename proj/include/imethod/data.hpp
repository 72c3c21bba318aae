#pragma once

// Initial data: seeded band-limited perturbations, rough fields, Gaussians,
// and the scaling u_lambda(x) = lambda^(-2/(p-1)) u(x/lambda).

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "imethod/functionals.hpp"
#include "imethod/integrator.hpp"
#include "imethod/spectral.hpp"

namespace imethod {

struct FrequencyBand {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double r) const { return r >= lo && r <= hi; }
};

namespace detail {

// Complex Gaussian coefficients times amplitude(|xi|) on the band, drawn in
// lattice order from one seeded generator.
template <class Amplitude>
SpectralField seeded_spectrum(std::uint64_t seed, FrequencyBand band, const BoxGrid& grid, Amplitude&& amplitude) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    SpectralField spectrum(grid, Representation::frequency);
    std::size_t count = 0;
    for_each_frequency(grid, [&](std::size_t i, const std::array<double, 3>& xi) {
        const double r = norm3(xi);
        if (!band.contains(r)) return;
        const double re = normal(rng);
        const double im = normal(rng);
        spectrum.samples[i] = amplitude(r) * Complex(re, im);
        ++count;
    });
    if (count == 0) {
        std::ostringstream msg;
        msg << "empty frequency band [" << band.lo << ", " << band.hi << "] on this lattice";
        throw std::invalid_argument(msg.str());
    }
    return spectrum;
}

}  // namespace detail

/// Seeded complex Gaussian coefficients on the band, scaled to ||.||_{H^s} = sigma.
inline SpectralField perturbation(std::uint64_t seed, FrequencyBand band, double s, double sigma, const BoxGrid& grid) {
    if (!(sigma >= 0.0)) throw ContractViolation("perturbation: sigma must be >= 0");
    SpectralField field = to_physical(detail::seeded_spectrum(seed, band, grid, [](double) { return 1.0; }));
    const double norm = sobolev_norm(field, s);
    field *= Complex(sigma / norm, 0.0);
    return field;
}

/// A sech(|x|) background plus a rough, spatially localized component:
/// coefficients ~ |xi|^-decay on the band, multiplied by exp(-|x|^2/width^2)
/// and scaled to H^s norm `roughness`.
struct RoughDataSpec {
    double amplitude = 2.0;
    double roughness = 0.5;
    double decay = 1.5;
    double envelope_width = 1.0;
    FrequencyBand band{4.0, 96.0};

    /// Band from the smallest multiplier cutoff up to 3/4 of the lattice.
    static RoughDataSpec for_sweep(double smallest_N, const BoxGrid& grid) {
        RoughDataSpec spec;
        spec.band = {0.5 * smallest_N, 0.75 * grid.xi_max()};
        return spec;
    }
};

inline SpectralField rough_field(std::uint64_t seed, const RoughDataSpec& spec, double s, const BoxGrid& grid) {
    const double decay = spec.decay;
    SpectralField rough = to_physical(
        detail::seeded_spectrum(seed, spec.band, grid, [decay](double r) { return std::pow(r, -decay); }));
    const double w2 = spec.envelope_width * spec.envelope_width;
    for_each_point(grid, [&](std::size_t i, const std::array<double, 3>& x) {
        rough.samples[i] *= std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / w2);
    });
    rough *= Complex(spec.roughness / sobolev_norm(rough, s), 0.0);
    return rough;
}

inline SpectralField rough_data(std::uint64_t seed, const RoughDataSpec& spec, double s, const BoxGrid& grid) {
    SpectralField u = SpectralField::from_function(grid, [&](const std::array<double, 3>& x) {
        return Complex(spec.amplitude / std::cosh(norm3(x)), 0.0);
    });
    u += rough_field(seed, spec, s, grid);
    return u;
}

/// amplitude exp(-|x|^2 / (2 width^2)).
inline SpectralField gaussian(const BoxGrid& grid, double amplitude = 1.0, double width = 1.0) {
    return SpectralField::from_function(grid, [&](const std::array<double, 3>& x) {
        const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        return Complex(amplitude * std::exp(-0.5 * r2 / (width * width)), 0.0);
    });
}

/// A Gaussian run backwards under the free flow for `focus_time`: it disperses
/// little until it refocuses near t = focus_time.
inline SpectralField focusing_gaussian(const BoxGrid& grid, double amplitude, double width, double focus_time) {
    return linear_substep(gaussian(grid, amplitude, width), -focus_time);
}

/// u_lambda(x) = lambda^(-2/(p-1)) u(x/lambda) on the grid of side lambda L
/// (same point count, so samples map one to one).
inline SpectralField rescale(const SpectralField& field, double lambda, const EquationParams& params,
                             std::optional<double> max_box_length = std::nullopt) {
    if (!(lambda >= 1.0)) throw ContractViolation("rescale: lambda must be >= 1");
    const BoxGrid grid(field.grid.dim, lambda * field.grid.length, field.grid.points);
    if (max_box_length && grid.length > *max_box_length) {
        std::ostringstream msg;
        msg << "rescale: support overflow, rescaled box " << grid.length << " exceeds " << *max_box_length;
        throw std::domain_error(msg.str());
    }
    const SpectralField u = to_physical(field);
    SpectralField out(grid, u.samples);
    out *= Complex(std::pow(lambda, -2.0 / (params.power - 1.0)), 0.0);
    return out;
}

}  // namespace imethod
