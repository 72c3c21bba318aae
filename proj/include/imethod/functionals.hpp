#pragma once

// Conserved and almost-conserved quantities of iu_t + Delta u = F(u),
// F(u) = +-|u|^(p-1) u, together with the pointwise nonlinearity algebra.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "imethod/operators.hpp"
#include "imethod/spectral.hpp"

namespace imethod {

enum class Sign { focusing, defocusing };

inline const char* to_string(Sign s) { return s == Sign::focusing ? "focusing" : "defocusing"; }

inline Sign parse_sign(const std::string& name) {
    if (name == "focusing") return Sign::focusing;
    if (name == "defocusing") return Sign::defocusing;
    throw std::invalid_argument("sign must be 'focusing' or 'defocusing', got '" + name + "'");
}

struct EquationParams {
    int dim = 1;
    double power = 3.0;
    Sign sign = Sign::defocusing;

    EquationParams() = default;
    EquationParams(int dim_, double power_, Sign sign_) : dim(dim_), power(power_), sign(sign_) { validate(); }

    void validate() const {
        if (dim < 1) throw ContractViolation("EquationParams: dim must be positive");
        if (!(power > 1.0) || !std::isfinite(power)) throw ContractViolation("EquationParams: power must exceed 1");
    }

    /// +1 for defocusing, -1 for focusing.
    double sign_factor() const { return sign == Sign::defocusing ? 1.0 : -1.0; }
    /// s_c = n/2 - 2/(p-1).
    double critical_regularity() const { return 0.5 * dim - 2.0 / (power - 1.0); }
    bool l2_subcritical() const { return critical_regularity() < 0.0; }
    bool h1_subcritical() const { return 1.0 / (power - 1.0) > (dim - 2) / 4.0; }
};

/// |z|^q with 0^q = 0, evaluated as exp(q log|z|).
inline double abs_pow(double magnitude, double q) {
    if (magnitude == 0.0) return 0.0;
    return std::exp(q * std::log(magnitude));
}

inline double mass(const SpectralField& field) {
    if (!field.is_physical()) {
        double acc = 0.0;
        for (const auto& c : field.samples) acc += std::norm(c);
        return acc / field.grid.volume();
    }
    double acc = 0.0;
    for (const auto& v : field.samples) acc += std::norm(v);
    return acc * field.grid.cell_volume();
}

/// (1/2) int |grad u|^2, evaluated spectrally.
inline double kinetic_energy(const SpectralField& field) {
    const SpectralField spectrum = to_frequency(field);
    constexpr double four_pi_sq = 4.0 * std::numbers::pi * std::numbers::pi;
    double acc = 0.0;
    for_each_frequency(field.grid, [&](std::size_t i, const std::array<double, 3>& xi) {
        const double k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        acc += four_pi_sq * k2 * std::norm(spectrum.samples[i]);
    });
    return 0.5 * acc / field.grid.volume();
}

inline double lebesgue_norm(const SpectralField& field, double q) {
    if (!(q >= 1.0)) throw ContractViolation("lebesgue_norm: q must be >= 1");
    if (!field.is_physical()) return lebesgue_norm(to_physical(field), q);
    double acc = 0.0;
    for (const auto& v : field.samples) acc += abs_pow(std::abs(v), q);
    return std::pow(acc * field.grid.cell_volume(), 1.0 / q);
}

/// H(u) = int (1/2)|grad u|^2 +- (1/(p+1)) |u|^(p+1); + defocusing, - focusing.
inline double hamiltonian(const SpectralField& field, const EquationParams& params) {
    const SpectralField u = to_physical(field);
    double potential = 0.0;
    for (const auto& v : u.samples) potential += abs_pow(std::abs(v), params.power + 1.0);
    potential *= u.grid.cell_volume() / (params.power + 1.0);
    return kinetic_energy(u) + params.sign_factor() * potential;
}

/// L(u) = 2 H(u) + int |u|^2, with H carrying the equation's sign.
inline double lyapunov(const SpectralField& field, const EquationParams& params) {
    const SpectralField u = to_physical(field);
    return 2.0 * hamiltonian(u, params) + mass(u);
}

/// Weight (2 pi |xi|)^(2s) or <2 pi xi>^(2s) on the lattice.
inline std::vector<double> sobolev_weights(const BoxGrid& grid, double s, DerivativeKind kind) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> w(grid.size());
    for_each_frequency(grid, [&](std::size_t i, const std::array<double, 3>& xi) {
        const double k = two_pi * norm3(xi);
        if (kind == DerivativeKind::inhomogeneous)
            w[i] = std::pow(1.0 + k * k, s);
        else
            w[i] = (k == 0.0) ? (s == 0.0 ? 1.0 : 0.0) : std::pow(k, 2.0 * s);
    });
    return w;
}

inline double sobolev_norm(const SpectralField& field, double s, DerivativeKind kind = DerivativeKind::inhomogeneous) {
    const SpectralField spectrum = to_frequency(field);
    const auto w = sobolev_weights(field.grid, s, kind);
    return std::sqrt(weighted_coefficient_sum(spectrum, w));
}

/// F(z) = +-|z|^(p-1) z.
inline Complex nonlinearity(Complex z, const EquationParams& params) {
    return params.sign_factor() * abs_pow(std::abs(z), params.power - 1.0) * z;
}

inline SpectralField nonlinearity(const SpectralField& field, const EquationParams& params) {
    SpectralField out = to_physical(field);
    for (auto& v : out.samples) v = nonlinearity(v, params);
    return out;
}

/// w . F'(z) = w F_z(z) + conj(w) F_zbar(z) with
/// F_z = +-((p+1)/2)|z|^(p-1), F_zbar = +-((p-1)/2)|z|^(p-3) z^2. Zero at z = 0.
inline Complex nonlinearity_gradient(Complex z, Complex w, const EquationParams& params) {
    const double r = std::abs(z);
    if (r == 0.0) return {0.0, 0.0};
    const double p = params.power;
    const double rp = abs_pow(r, p - 1.0);
    const Complex unit = z / r;
    const Complex fz = 0.5 * (p + 1.0) * rp;
    const Complex fzbar = 0.5 * (p - 1.0) * rp * unit * unit;
    return params.sign_factor() * (w * fz + std::conj(w) * fzbar);
}

/// || I_N F(u) - F(I_N u) ||_2.
inline double commutator_residual(const SpectralField& field, const SymbolTable& multiplier, const EquationParams& params) {
    const SpectralField u = to_physical(field);
    SpectralField i_of_f = to_frequency(nonlinearity(u, params));
    multiplier.multiply(i_of_f);
    const SpectralField f_of_i = to_frequency(nonlinearity(multiplier.apply(u), params));
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += std::norm(i_of_f.samples[i] - f_of_i.samples[i]);
    return std::sqrt(acc / u.grid.volume());
}

inline double commutator_residual(const SpectralField& field, const MultiplierSpec& spec, const EquationParams& params) {
    return commutator_residual(field, multiplier_table(field.grid, spec), params);
}

/// Gagliardo-Nirenberg exponent theta = 2 - n(p-1)/2 in ||u||_{p+1}^{p+1} <~ ||u||_{H1dot}^{2-theta}.
inline double gn_exponent(const EquationParams& params) {
    if (!params.l2_subcritical())
        throw std::domain_error("gn_exponent: requires the L2-subcritical case s_c < 0");
    return 2.0 - 0.5 * params.dim * (params.power - 1.0);
}

}  // namespace imethod
