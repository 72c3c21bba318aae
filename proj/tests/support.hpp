#pragma once

#include <cmath>
#include <random>

#include "imethod/spectral.hpp"

namespace imethod::testing {

/// Complex Gaussian samples at every grid point.
inline SpectralField random_field(const BoxGrid& grid, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    SpectralField f(grid);
    for (auto& v : f.samples) v = {g(rng), g(rng)};
    return f;
}

/// Random coefficients on |xi| <= max_xi, zero elsewhere, returned in physical space.
inline SpectralField band_limited(const BoxGrid& grid, double max_xi, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    SpectralField spec(grid, Representation::frequency);
    for_each_frequency(grid, [&](std::size_t i, const std::array<double, 3>& xi) {
        if (norm3(xi) <= max_xi) spec.samples[i] = {g(rng), g(rng)};
    });
    return to_physical(spec);
}

inline double max_abs_diff(const SpectralField& a, const SpectralField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.samples[i] - b.samples[i]));
    return m;
}

inline double max_abs(const SpectralField& a) {
    double m = 0.0;
    for (const auto& v : a.samples) m = std::max(m, std::abs(v));
    return m;
}

/// sqrt(2) sech(x): the n = 1, p = 3 ground state.
inline SpectralField sech_soliton(const BoxGrid& grid) {
    return SpectralField::from_function(grid, [](const std::array<double, 3>& x) {
        return Complex{std::sqrt(2.0) / std::cosh(x[0]), 0.0};
    });
}

}  // namespace imethod::testing
