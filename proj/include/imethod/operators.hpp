#pragma once

// Fourier multipliers on the periodic box: the smoothing operator I_N,
// fractional derivatives and smooth low/high frequency projections.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "imethod/spectral.hpp"

namespace imethod {

inline double smoothstep(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

/// Transition profile of m on 1 < r < 2.
enum class Blend {
    /// log m = (s-1) log2 * w(r-1), w(t) = t^2(3-2t). Continuous, monotone.
    smoothstep_log,
    /// Cubic Hermite in log m that also matches the slope of r^(s-1) at r = 2 (C^1).
    hermite_log,
};

inline const char* to_string(Blend b) {
    return b == Blend::smoothstep_log ? "smoothstep-log" : "hermite-log";
}

inline Blend parse_blend(const std::string& name) {
    if (name == "smoothstep-log") return Blend::smoothstep_log;
    if (name == "hermite-log") return Blend::hermite_log;
    throw std::invalid_argument("unknown multiplier blend '" + name + "'");
}

struct MultiplierSpec {
    double s = 0.9;
    double N = 1.0;
    Blend blend = Blend::smoothstep_log;

    MultiplierSpec() = default;
    MultiplierSpec(double s_, double N_, Blend blend_ = Blend::smoothstep_log) : s(s_), N(N_), blend(blend_) {
        validate();
    }

    void validate() const {
        if (!(s > 0.0 && s <= 1.0)) throw ContractViolation("MultiplierSpec: s must lie in (0, 1]");
        if (!(N >= 1.0) || !std::isfinite(N)) throw ContractViolation("MultiplierSpec: N must be >= 1");
    }
};

/// Radial profile m(r) of I_N, in units of r = |xi|/N.
inline double multiplier_profile(double r, double s, Blend blend = Blend::smoothstep_log) {
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return std::pow(r, s - 1.0);
    const double t = r - 1.0;
    double log_m = 0.0;
    switch (blend) {
        case Blend::smoothstep_log:
            log_m = (s - 1.0) * std::numbers::ln2 * smoothstep(t);
            break;
        case Blend::hermite_log:
            // g(0)=0, g'(0)=0, g(1)=ln2, g'(1)=1/2 (slope of log r at r=2)
            log_m = (s - 1.0) * (std::numbers::ln2 * (3.0 * t * t - 2.0 * t * t * t) + 0.5 * (t * t * t - t * t));
            break;
    }
    return std::exp(log_m);
}

inline double multiplier_symbol(double xi_norm, const MultiplierSpec& spec) {
    return multiplier_profile(xi_norm / spec.N, spec.s, spec.blend);
}

/// A radial symbol tabulated on a grid's frequency lattice. Immutable once built.
class SymbolTable {
public:
    SymbolTable() = default;

    template <class Symbol>
    SymbolTable(const BoxGrid& grid, Symbol&& symbol) : grid_(grid), values_(grid.size()) {
        std::size_t bad = grid.size();
        for_each_frequency(grid, [&](std::size_t i, const std::array<double, 3>& xi) {
            const double v = symbol(norm3(xi));
            values_[i] = v;
            if (!std::isfinite(v) && bad == grid.size()) bad = i;
        });
        if (bad != grid.size()) {
            std::ostringstream msg;
            msg << "apply_symbol: non-finite symbol value at xi = (";
            const auto idx = grid.unflatten(bad);
            for (int d = 0; d < grid.dim; ++d) msg << (d ? ", " : "") << grid.frequency(idx[d]);
            msg << ")";
            throw std::domain_error(msg.str());
        }
    }

    const BoxGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    /// True when every coefficient outside {symbol == 1} is at transform round-off.
    bool acts_as_identity_on(const SpectralField& spectrum) const {
        double peak = 0.0;
        for (const auto& c : spectrum.samples) peak = std::max(peak, std::abs(c));
        const double floor = 64.0 * std::numeric_limits<double>::epsilon() * peak;
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (values_[i] != 1.0 && std::abs(spectrum.samples[i]) > floor) return false;
        return true;
    }

    /// Multiplies a frequency-space field in place.
    void multiply(SpectralField& spectrum) const {
        for (std::size_t i = 0; i < values_.size(); ++i) spectrum.samples[i] *= values_[i];
    }

    /// Applies the symbol and returns a physical-space field. Inputs on which the
    /// symbol is the identity are returned unchanged.
    SpectralField apply(const SpectralField& field) const {
        if (!(field.grid == grid_)) throw ContractViolation("SymbolTable: grid mismatch");
        SpectralField spectrum = to_frequency(field);
        if (field.is_physical() && acts_as_identity_on(spectrum)) return field;
        multiply(spectrum);
        transform_in_place(spectrum, Direction::inverse);
        return spectrum;
    }

private:
    BoxGrid grid_;
    std::vector<double> values_;
};

inline SymbolTable multiplier_table(const BoxGrid& grid, const MultiplierSpec& spec) {
    spec.validate();
    return SymbolTable(grid, [&](double r) { return multiplier_symbol(r, spec); });
}

/// Multiplies every coefficient by symbol(|xi|); returns a physical-space field.
inline SpectralField apply_symbol(const SpectralField& field, const std::function<double(double)>& symbol) {
    return SymbolTable(field.grid, symbol).apply(field);
}

/// I_N u with symbol m(xi/N).
inline SpectralField i_operator(const SpectralField& field, const MultiplierSpec& spec) {
    return multiplier_table(field.grid, spec).apply(field);
}

enum class DerivativeKind { homogeneous, inhomogeneous };

/// |nabla|^alpha (symbol (2 pi |xi|)^alpha) or <nabla>^alpha (symbol (1 + (2 pi |xi|)^2)^(alpha/2)).
inline SpectralField fractional_derivative(const SpectralField& field, double alpha, DerivativeKind kind) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (kind == DerivativeKind::inhomogeneous) {
        return apply_symbol(field, [alpha](double r) {
            const double k = two_pi * r;
            return std::pow(1.0 + k * k, 0.5 * alpha);
        });
    }
    if (alpha < 0.0) {
        const SpectralField spectrum = to_frequency(field);
        double total = 0.0;
        for (const auto& c : spectrum.samples) total += std::norm(c);
        const double mean_coefficient = std::abs(spectrum.samples[0]);
        if (mean_coefficient > 1e-12 * std::sqrt(total))
            throw std::domain_error("fractional_derivative: negative-order homogeneous derivative of a field with nonzero mean");
    }
    return apply_symbol(field, [alpha](double r) {
        if (r == 0.0) return alpha == 0.0 ? 1.0 : 0.0;
        return std::pow(two_pi * r, alpha);
    });
}

/// Low-pass symbol: 1 on r <= cutoff/2, 0 on r >= cutoff, smoothstep in between.
inline double low_pass_symbol(double r, double cutoff) {
    const double half = 0.5 * cutoff;
    if (r <= half) return 1.0;
    if (r >= cutoff) return 0.0;
    return 1.0 - smoothstep((r - half) / half);
}

struct FrequencySplit {
    SpectralField low;
    SpectralField high;
};

inline FrequencySplit frequency_split(const SpectralField& field, double cutoff) {
    if (!(cutoff > 0.0)) throw ContractViolation("frequency_split: cutoff must be positive");
    const SpectralField input = to_physical(field);
    const SymbolTable table(field.grid, [cutoff](double r) { return low_pass_symbol(r, cutoff); });
    SpectralField spectrum = to_frequency(input);

    // Exact splits when the support sits entirely on one side of the blend.
    double peak = 0.0;
    for (const auto& c : spectrum.samples) peak = std::max(peak, std::abs(c));
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * peak;
    bool all_low = true, all_high = true;
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        if (std::abs(spectrum.samples[i]) <= floor) continue;
        if (table[i] != 1.0) all_low = false;
        if (table[i] != 0.0) all_high = false;
    }
    if (all_low) return {input, SpectralField(field.grid)};
    if (all_high) return {SpectralField(field.grid), input};

    table.multiply(spectrum);
    transform_in_place(spectrum, Direction::inverse);
    SpectralField high = input - spectrum;
    return {std::move(spectrum), std::move(high)};
}

}  // namespace imethod
