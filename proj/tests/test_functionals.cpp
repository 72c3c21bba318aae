#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "imethod/data.hpp"
#include "imethod/functionals.hpp"
#include "support.hpp"

using namespace imethod;
using imethod::testing::band_limited;
using imethod::testing::max_abs;
using imethod::testing::max_abs_diff;
using imethod::testing::random_field;
using imethod::testing::sech_soliton;

namespace {

const EquationParams kCubicFocusing(1, 3.0, Sign::focusing);

SpectralField constant(const BoxGrid& g, Complex c) {
    return SpectralField::from_function(g, [c](const std::array<double, 3>&) { return c; });
}

SpectralField d_dx(const SpectralField& u) {
    auto spec = to_frequency(u);
    for_each_frequency(u.grid, [&](std::size_t i, const std::array<double, 3>& xi) {
        spec[i] *= Complex(0.0, 2.0 * std::numbers::pi * xi[0]);
    });
    return to_physical(spec);
}

}  // namespace

TEST(EquationParams, CriticalRegularityAndFlags) {
    const EquationParams a(1, 5.0, Sign::focusing);
    EXPECT_DOUBLE_EQ(a.critical_regularity(), 0.0);
    EXPECT_FALSE(a.l2_subcritical());
    const EquationParams b(3, 3.0, Sign::defocusing);
    EXPECT_DOUBLE_EQ(b.critical_regularity(), 0.5);
    EXPECT_TRUE(b.h1_subcritical());
    EXPECT_FALSE(EquationParams(3, 5.0, Sign::defocusing).h1_subcritical());
    EXPECT_TRUE(EquationParams(2, 9.0, Sign::defocusing).h1_subcritical());
    EXPECT_THROW(EquationParams(1, 1.0, Sign::focusing), ContractViolation);
    EXPECT_THROW(parse_sign("attractive"), std::invalid_argument);
}

TEST(Mass, ZeroConstantAndSoliton) {
    const BoxGrid g(1, 6.0, 32);
    EXPECT_EQ(mass(SpectralField(g)), 0.0);
    EXPECT_NEAR(mass(constant(g, {0.0, 2.0})), 4.0 * 6.0, 1e-12);
    const BoxGrid big(1, 60.0, 1024);
    EXPECT_NEAR(mass(sech_soliton(big)), 4.0, 1e-10);
}

TEST(Hamiltonian, ZeroConstantAndSoliton) {
    const BoxGrid g(1, 6.0, 32);
    const EquationParams defocusing(1, 3.0, Sign::defocusing);
    EXPECT_EQ(hamiltonian(SpectralField(g), defocusing), 0.0);
    const Complex c(0.3, -0.4);
    EXPECT_NEAR(hamiltonian(constant(g, c), defocusing), 6.0 * std::pow(0.5, 4) / 4.0, 1e-14);
    const EquationParams frac(1, 2.5, Sign::defocusing);
    EXPECT_NEAR(hamiltonian(constant(g, c), frac), 6.0 * std::pow(0.5, 3.5) / 3.5, 1e-14);
    const BoxGrid big(1, 60.0, 1024);
    EXPECT_NEAR(hamiltonian(sech_soliton(big), kCubicFocusing), -2.0 / 3.0, 1e-10);
}

TEST(Lyapunov, DefinitionAndSoliton) {
    const BoxGrid g(2, 6.0, 32);
    EXPECT_EQ(lyapunov(SpectralField(g), kCubicFocusing), 0.0);
    const EquationParams params(2, 2.5, Sign::focusing);
    for (unsigned seed = 1; seed <= 4; ++seed) {
        const auto u = random_field(g, seed);
        const double L = lyapunov(u, params);
        EXPECT_NEAR(L - 2.0 * hamiltonian(u, params) - mass(u), 0.0, 1e-12 * std::abs(L));
    }
    const BoxGrid big(1, 60.0, 1024);
    EXPECT_NEAR(lyapunov(sech_soliton(big), kCubicFocusing), 8.0 / 3.0, 1e-10);
}

TEST(Lebesgue, NormsAgainstClosedForms) {
    const BoxGrid g(2, 3.0, 16);
    const auto u = random_field(g, 5);
    EXPECT_NEAR(lebesgue_norm(u, 2.0), std::sqrt(mass(u)), 1e-12);
    EXPECT_NEAR(lebesgue_norm(constant(g, {1.5, 0.0}), 3.0), 1.5 * std::pow(9.0, 1.0 / 3.0), 1e-12);
    const BoxGrid big(1, 60.0, 1024);
    EXPECT_NEAR(std::pow(lebesgue_norm(sech_soliton(big), 4.0), 4.0), 16.0 / 3.0, 1e-10);
}

TEST(Sobolev, ZeroOrderPlaneWaveAndMonotone) {
    const BoxGrid g(1, 10.0, 64);
    const auto u = random_field(g, 3);
    EXPECT_NEAR(sobolev_norm(u, 0.0), std::sqrt(mass(u)), 1e-12);
    const int k = 3;
    const double a = 0.7;
    const auto wave = SpectralField::from_function(g, [&](const std::array<double, 3>& x) {
        return a * std::exp(Complex(0.0, 2.0 * std::numbers::pi * k * x[0] / g.length));
    });
    const double bracket = std::sqrt(1.0 + std::pow(2.0 * std::numbers::pi * k / g.length, 2));
    EXPECT_NEAR(sobolev_norm(wave, 0.6), a * std::pow(bracket, 0.6) * std::sqrt(g.length), 1e-12);
    double prev = 0.0;
    for (double s : {0.0, 0.2, 0.5, 0.9, 1.0, 1.5}) {
        const double v = sobolev_norm(u, s);
        EXPECT_GE(v, prev);
        prev = v;
    }
}

TEST(Invariance, PhaseRotationAndLatticeShift) {
    const BoxGrid g(2, 6.0, 32);
    const EquationParams params(2, 2.0, Sign::focusing);
    const auto u = band_limited(g, 1.5, 3);
    const auto rotated = std::polar(1.0, 0.7) * u;
    const auto shifted = lattice_shift(u, {5, 9, 0});
    for (const auto& v : {rotated, shifted}) {
        EXPECT_NEAR(mass(v), mass(u), 1e-12 * mass(u));
        EXPECT_NEAR(hamiltonian(v, params), hamiltonian(u, params), 1e-12 * std::abs(hamiltonian(u, params)));
        EXPECT_NEAR(sobolev_norm(v, 0.7), sobolev_norm(u, 0.7), 1e-12 * sobolev_norm(u, 0.7));
    }
}

TEST(Nonlinearity, ZeroAndConstant) {
    const BoxGrid g(1, 4.0, 16);
    const EquationParams defocusing(1, 3.0, Sign::defocusing);
    EXPECT_EQ(max_abs(nonlinearity(SpectralField(g), defocusing)), 0.0);
    const auto f = nonlinearity(constant(g, {2.0, 0.0}), defocusing);
    for (const auto& v : f.samples) EXPECT_EQ(v, Complex(8.0, 0.0));
    EXPECT_EQ(nonlinearity(Complex(0.0, 0.0), EquationParams(1, 1.5, Sign::focusing)), Complex(0.0, 0.0));
}

TEST(Nonlinearity, FractionalPowerMatchesLongDouble) {
    const BoxGrid g(1, 4.0, 128);
    const EquationParams params(1, 2.5, Sign::focusing);
    const auto u = random_field(g, 17);
    const auto f = nonlinearity(u, params);
    for (std::size_t i = 0; i < 100; ++i) {
        const std::complex<long double> z(u[i].real(), u[i].imag());
        const auto oracle = -std::pow(std::abs(z), 1.5L) * z;
        EXPECT_NEAR(f[i].real(), static_cast<double>(oracle.real()), 1e-13 * (1.0 + std::abs(f[i])));
        EXPECT_NEAR(f[i].imag(), static_cast<double>(oracle.imag()), 1e-13 * (1.0 + std::abs(f[i])));
    }
}

TEST(NonlinearityGradient, TrivialCases) {
    const EquationParams params(1, 3.0, Sign::defocusing);
    EXPECT_EQ(nonlinearity_gradient({1.3, 0.2}, {0.0, 0.0}, params), Complex(0.0, 0.0));
    EXPECT_EQ(nonlinearity_gradient({0.0, 0.0}, {1.0, 0.0}, params), Complex(0.0, 0.0));
    const double z = 1.7, w = -0.4;
    const Complex g = nonlinearity_gradient({z, 0.0}, {w, 0.0}, params);
    EXPECT_NEAR(g.real(), 3.0 * z * z * w, 1e-14);
    EXPECT_NEAR(g.imag(), 0.0, 1e-14);
}

TEST(NonlinearityGradient, FiniteDifferences) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (double p : {1.5, 2.0, 2.5, 3.0, 5.0}) {
        for (Sign sign : {Sign::focusing, Sign::defocusing}) {
            const EquationParams params(1, p, sign);
            for (int k = 0; k < 200; ++k) {
                const Complex z(U(rng), U(rng)), w(U(rng), U(rng));
                if (std::abs(z) < 0.2) continue;
                double prev = 0.0;
                for (double h : {1e-3, 1e-4, 1e-5}) {
                    const Complex lin = h * nonlinearity_gradient(z, w, params);
                    const double err = std::abs(nonlinearity(z + h * w, params) - nonlinearity(z, params) - lin);
                    // o(h): remainder shrinks at least ten times faster than h
                    if (prev > 0.0) {
                        EXPECT_LT(err, 0.2 * prev) << "p = " << p << " h = " << h;
                    }
                    prev = err;
                }
            }
        }
    }
}

TEST(NonlinearityGradient, HolderConstantIsFinite) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> U(-10.0, 10.0);
    for (double p : {1.5, 2.0, 3.0}) {
        const EquationParams params(1, p, Sign::defocusing);
        const double th = std::min(p - 1.0, 1.0);
        double worst = 0.0;
        for (int k = 0; k < 100000; ++k) {
            Complex z(U(rng), U(rng)), w(U(rng), U(rng));
            if (std::abs(z) > 10.0) z *= 10.0 / std::abs(z);
            if (std::abs(w) > 10.0) w *= 10.0 / std::abs(w);
            const double dz = std::abs(z - w);
            if (dz == 0.0) continue;
            double diff = 0.0;
            for (Complex dir : {Complex(1.0, 0.0), Complex(0.0, 1.0)})
                diff = std::max(diff, std::abs(nonlinearity_gradient(z, dir, params) -
                                               nonlinearity_gradient(w, dir, params)));
            const double denom =
                std::pow(dz, th) * (std::pow(std::abs(z), p - 1.0 - th) + std::pow(std::abs(w), p - 1.0 - th));
            worst = std::max(worst, diff / denom);
        }
        RecordProperty("holder_constant_p" + std::to_string(p), std::to_string(worst));
        EXPECT_TRUE(std::isfinite(worst));
        EXPECT_LT(worst, 1e3);
    }
}

TEST(Nonlinearity, ExpansionConstantIsFinite) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-10.0, 10.0);
    for (double p : {1.5, 3.0, 5.0}) {
        const EquationParams params(1, p, Sign::focusing);
        double worst = 0.0;
        for (int k = 0; k < 100000; ++k) {
            const Complex z(U(rng), U(rng)), w(U(rng), U(rng));
            const double lhs = std::abs(nonlinearity(z + w, params) - nonlinearity(z, params));
            const double rhs = std::abs(w) * std::pow(std::abs(z), p - 1.0) + std::pow(std::abs(w), p);
            worst = std::max(worst, lhs / rhs);
        }
        RecordProperty("expansion_constant_p" + std::to_string(p), std::to_string(worst));
        EXPECT_LT(worst, 1e3);
    }
}

TEST(Nonlinearity, ChainRule) {
    const BoxGrid g(1, 30.0, 1024);
    for (double p : {3.0, 2.5}) {
        const EquationParams params(1, p, Sign::defocusing);
        const auto u = SpectralField::from_function(g, [](const std::array<double, 3>& x) {
            return std::polar(std::exp(-x[0] * x[0] / 2.0), 0.3 * x[0]);
        });
        const auto lhs = d_dx(nonlinearity(u, params));
        const auto ux = d_dx(u);
        SpectralField rhs(g);
        for (std::size_t i = 0; i < u.size(); ++i) rhs[i] = nonlinearity_gradient(u[i], ux[i], params);
        EXPECT_LT(max_abs_diff(lhs, rhs), 1e-6 * max_abs(rhs)) << "p = " << p;
    }
}

TEST(Commutator, BandLimitedCubicVanishes) {
    const BoxGrid g(1, 20.0, 512);
    const double N = 6.0;
    const auto u = band_limited(g, N / 3.0, 21);
    EXPECT_LE(commutator_residual(u, MultiplierSpec(0.9, N), EquationParams(1, 3.0, Sign::defocusing)), 1e-10);
}

TEST(Commutator, FixedPointOfIEqualsHighPartOfF) {
    const BoxGrid g(1, 20.0, 512);
    const double N = 4.0;
    const MultiplierSpec spec(0.7, N);
    const EquationParams params(1, 2.5, Sign::focusing);
    const auto u = band_limited(g, N, 22);
    const auto F = nonlinearity(u, params);
    const double expected = std::sqrt(mass(F - i_operator(F, spec)));
    EXPECT_NEAR(commutator_residual(u, spec, params), expected, 1e-10 * expected);
}

TEST(Commutator, DecreasesWithNOnRoughData) {
    const BoxGrid g(1, 16.0, 4096);
    const EquationParams params(1, 3.0, Sign::defocusing);
    const auto u = rough_data(7, RoughDataSpec::for_sweep(8.0, g), 0.9, g);
    double prev = std::numeric_limits<double>::infinity();
    for (double N : {8.0, 16.0, 32.0, 64.0}) {
        const double c = commutator_residual(u, MultiplierSpec(0.9, N), params);
        EXPECT_LT(c, prev) << "N = " << N;
        prev = c;
    }
}

TEST(GnExponent, SubstitutionAndRejection) {
    // 1D: ||u||_4^4 <~ ||u||_2^3 ||u'||_2, so theta = 1
    EXPECT_DOUBLE_EQ(gn_exponent(EquationParams(1, 3.0, Sign::focusing)), 1.0);
    EXPECT_DOUBLE_EQ(gn_exponent(EquationParams(1, 2.0, Sign::focusing)), 1.5);
    EXPECT_DOUBLE_EQ(gn_exponent(EquationParams(2, 2.0, Sign::focusing)), 1.0);
    EXPECT_THROW(gn_exponent(EquationParams(1, 5.0, Sign::focusing)), std::domain_error);
}
