#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "imethod/ground_state.hpp"
#include "imethod/orbital.hpp"
#include "support.hpp"

using namespace imethod;
using imethod::testing::max_abs_diff;
using imethod::testing::random_field;

namespace {

const GroundStateProfile& cubic_1d() {
    static const GroundStateProfile profile = shoot(EquationParams(1, 3.0, Sign::focusing));
    return profile;
}

double closed_form(double p, double x) {
    return std::pow(0.5 * (p + 1.0), 1.0 / (p - 1.0)) * std::pow(1.0 / std::cosh(0.5 * (p - 1.0) * x), 2.0 / (p - 1.0));
}

GroundStateProfile sampled(double p, double factor = 1.0) {
    GroundStateProfile prof;
    prof.params = EquationParams(1, p, Sign::focusing);
    prof.step = 1e-3;
    for (int i = 0; i <= 30000; ++i) prof.radial_samples.push_back(factor * closed_form(p, i * prof.step));
    prof.r_max = 30.0;
    prof.q0 = prof.radial_samples.front();
    return prof;
}

}  // namespace

TEST(Shoot, CubicOneDimensionalClosedForm) {
    const auto& q = cubic_1d();
    EXPECT_NEAR(q.q0, std::sqrt(2.0), 1e-6);
    double worst = 0.0;
    for (double r = 0.0; r <= 25.0; r += 0.0137) worst = std::max(worst, std::abs(q.value(r) - closed_form(3.0, r)));
    EXPECT_LE(worst, 1e-6);
    EXPECT_LE(q.residual, 1e-8);
}

TEST(Shoot, QuadraticOneDimensionalClosedForm) {
    const auto q = shoot(EquationParams(1, 2.0, Sign::focusing));
    EXPECT_NEAR(q.q0, 1.5, 1e-6);
    for (double r = 0.0; r <= 20.0; r += 0.31) EXPECT_NEAR(q.value(r), closed_form(2.0, r), 1e-6) << "r = " << r;
}

class ShapeInvariants : public ::testing::TestWithParam<std::pair<int, double>> {};

TEST_P(ShapeInvariants, PositiveDecreasingResolvedTail) {
    const auto [n, p] = GetParam();
    const auto q = shoot(EquationParams(n, p, Sign::focusing));
    EXPECT_LE(q.residual, 1e-8);
    EXPECT_LE(ode_residual(q), 1e-8);
    EXPECT_LE(q.radial_samples.back(), 1e-8 * q.q0);
    for (std::size_t i = 0; i + 1 < q.count(); ++i) {
        ASSERT_GT(q.radial_samples[i], 0.0) << "i = " << i;
        ASSERT_LT(q.radial_samples[i + 1], q.radial_samples[i]) << "i = " << i;
    }
}

INSTANTIATE_TEST_SUITE_P(Cases, ShapeInvariants,
                         ::testing::Values(std::pair{1, 3.0}, std::pair{1, 1.5}, std::pair{2, 2.0},
                                           std::pair{3, 2.0}, std::pair{2, 2.5}));

TEST(Shoot, UniquenessAcrossBrackets) {
    const EquationParams params(3, 2.0, Sign::focusing);
    const long double tol = 1e-10L;
    ShootOptions a, b;
    a.tolerance = b.tolerance = tol;
    a.bracket = std::pair{1.0, 6.0};
    b.bracket = std::pair{3.5, 40.0};
    EXPECT_LE(std::abs(shoot(params, a).q0 - shoot(params, b).q0), 10.0 * static_cast<double>(tol));
}

TEST(Shoot, RejectsBadParameters) {
    EXPECT_THROW(shoot(EquationParams(1, 3.0, Sign::defocusing)), std::invalid_argument);
    EXPECT_THROW(shoot(EquationParams(1, 5.0, Sign::focusing)), std::invalid_argument);
    ShootOptions opts;
    opts.bracket = std::pair{2.0, 3.0};
    try {
        shoot(EquationParams(1, 3.0, Sign::focusing), opts);
        FAIL() << "expected an error";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("no ground state bracket"), std::string::npos);
    }
}

TEST(OdeResidual, DetectsSolutionsAndNonSolutions) {
    EXPECT_LE(ode_residual(sampled(3.0)), 1e-10);
    EXPECT_GE(ode_residual(sampled(3.0, 1.1)), 1e-2);
    EXPECT_EQ(ode_residual(sampled(3.0, 0.0)), 0.0);
}

TEST(Embed, RealSymmetricAndPhase) {
    const auto& q = cubic_1d();
    const BoxGrid g(1, 50.0, 512);
    const auto u = embed(q, g);
    for (std::size_t i = 1; i < u.size(); ++i) {
        EXPECT_EQ(u[i].imag(), 0.0);
        EXPECT_GT(u[i].real(), 0.0);
        EXPECT_NEAR(u[i].real(), u[u.size() - i].real(), 1e-15);  // x_j and x_{M-j} = -x_j
    }
    const auto v = embed(q, g, std::numbers::pi);
    EXPECT_LT(max_abs_diff(v, Complex(-1.0, 0.0) * u), 1e-15);
}

TEST(Embed, MassMatchesRadialQuadrature) {
    const auto q3 = shoot(EquationParams(3, 2.0, Sign::focusing));
    const BoxGrid g3(3, 40.0, 128);
    EXPECT_NEAR(mass(embed(q3, g3)), q3.radial_mass(), 1e-6 * q3.radial_mass());
    const auto& q1 = cubic_1d();
    EXPECT_NEAR(mass(embed(q1, BoxGrid(1, 50.0, 512))), q1.radial_mass(), 1e-6 * q1.radial_mass());
    EXPECT_NEAR(q1.radial_mass(), 4.0, 1e-8);
}

TEST(Embed, RejectsTooSmallBox) {
    EXPECT_THROW(embed(cubic_1d(), BoxGrid(1, 20.0, 256)), ContractViolation);
    EXPECT_THROW(embed(cubic_1d(), BoxGrid(2, 50.0, 64)), ContractViolation);
}

TEST(Embed, FunctionalsIndependentOfResolution) {
    const auto& q = cubic_1d();
    const EquationParams& params = q.params;
    const auto coarse = embed(q, BoxGrid(1, 40.0, 256));
    for (auto [L, M] : {std::pair{40.0, 512}, std::pair{80.0, 1024}}) {
        const auto fine = embed(q, BoxGrid(1, L, M));
        EXPECT_NEAR(mass(fine), mass(coarse), 1e-6);
        EXPECT_NEAR(hamiltonian(fine, params), hamiltonian(coarse, params), 1e-6);
    }
    EXPECT_NEAR(hamiltonian(coarse, params), -2.0 / 3.0, 1e-8);
}

TEST(Embed, WeinsteinMinimality) {
    const auto& q = cubic_1d();
    const BoxGrid g(1, 50.0, 512);
    const auto Q = embed(q, g);
    const double LQ = lyapunov(Q, q.params);
    for (unsigned seed = 1; seed <= 20; ++seed) {
        const auto v = orthogonal_perturbation(random_field(g, seed), Q);
        for (double delta : {1e-3, 3e-4, 1e-4}) EXPECT_GE(lyapunov(Q + Complex(delta, 0.0) * v, q.params), LQ - 1e-8);
    }
}

TEST(ProfileFile, RoundTrip) {
    const auto q = shoot(EquationParams(2, 2.0, Sign::focusing));
    const auto path = (std::filesystem::temp_directory_path() / "imethod_profile_test.txt").string();
    save_profile(q, path);
    const auto r = load_profile(path);
    std::filesystem::remove(path);
    EXPECT_EQ(r.params.dim, 2);
    EXPECT_EQ(r.params.power, 2.0);
    EXPECT_EQ(r.q0, q.q0);
    EXPECT_EQ(r.r_max, q.r_max);
    EXPECT_EQ(r.tail_scale, q.tail_scale);
    EXPECT_EQ(r.radial_samples, q.radial_samples);
    EXPECT_EQ(r.value(q.r_max + 1.0), q.value(q.r_max + 1.0));
}

TEST(ProfileFile, RejectsForeignFiles) {
    const auto path = (std::filesystem::temp_directory_path() / "imethod_not_a_profile.txt").string();
    std::ofstream(path) << "hello\n";
    EXPECT_THROW(load_profile(path), std::runtime_error);
    std::filesystem::remove(path);
    EXPECT_THROW(load_profile("/nonexistent/profile.txt"), std::runtime_error);
}
