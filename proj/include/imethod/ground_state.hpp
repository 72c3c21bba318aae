#pragma once

// Ground state Q: the positive radial decaying solution of
//     Q'' + ((n-1)/r) Q' - Q + Q^p = 0,   Q'(0) = 0,
// found by bisection on Q(0). Beyond the matching radius the profile is the
// decaying solution of the linearized equation, K(r) = r^(1-n/2) K_{n/2-1}(r),
// with the leading nonlinear correction: Q ~ c K - (c K)^p / (p^2 - 1).

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta4.hpp>

#include "imethod/functionals.hpp"
#include "imethod/spectral.hpp"

namespace imethod {

namespace detail {

// r^(1-n/2) K_{n/2-1}(r): exact decaying solution of Q'' + ((n-1)/r)Q' - Q = 0.
inline double decaying_mode(int n, double r) {
    if (n == 1) return std::exp(-r);
    return std::pow(r, 1.0 - 0.5 * n) * boost::math::cyl_bessel_k(0.5 * n - 1.0, r);
}

inline double tail_value(double scale, int n, double p, double r) {
    const double lin = scale * decaying_mode(n, r);
    return lin - std::pow(lin, p) / (p * p - 1.0);
}

}  // namespace detail

struct GroundStateProfile {
    EquationParams params;
    double r_max = 0.0;
    double step = 1e-3;
    std::vector<double> radial_samples;  // Q(i * step), i = 0 .. count-1
    double q0 = 0.0;
    double residual = 0.0;
    double match_radius = 0.0;
    /// c in the tail c K - (c K)^p/(p^2 - 1) used beyond r_max; 0 means Q = 0 there.
    double tail_scale = 0.0;

    std::size_t count() const { return radial_samples.size(); }

    double sample(long i) const {
        const long idx = i < 0 ? -i : i;  // Q is even in r
        if (idx >= static_cast<long>(radial_samples.size())) return 0.0;
        return radial_samples[static_cast<std::size_t>(idx)];
    }

    /// Cubic Lagrange interpolation of the samples; the asymptotic tail beyond r_max.
    double value(double r) const {
        r = std::abs(r);
        if (radial_samples.empty()) return 0.0;
        if (r > r_max) return tail_scale > 0.0 ? detail::tail_value(tail_scale, params.dim, params.power, r) : 0.0;
        const double pos = r / step;
        long i = static_cast<long>(std::floor(pos));
        long j0 = std::min(i - 1, static_cast<long>(radial_samples.size()) - 4);
        const double t = pos - static_cast<double>(j0);
        std::array<double, 4> f{sample(j0), sample(j0 + 1), sample(j0 + 2), sample(j0 + 3)};
        const double l0 = -(t - 1) * (t - 2) * (t - 3) / 6.0;
        const double l1 = t * (t - 2) * (t - 3) / 2.0;
        const double l2 = -t * (t - 1) * (t - 3) / 2.0;
        const double l3 = t * (t - 1) * (t - 2) / 6.0;
        return l0 * f[0] + l1 * f[1] + l2 * f[2] + l3 * f[3];
    }

    /// int |Q|^2 over R^n, by Simpson's rule in r with the sphere's surface measure.
    double radial_mass() const {
        const int n = params.dim;
        const double surface = n == 1 ? 2.0 : (n == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi);
        auto integrand = [&](std::size_t i) {
            const double r = static_cast<double>(i) * step;
            return radial_samples[i] * radial_samples[i] * std::pow(r, n - 1);
        };
        const std::size_t intervals = radial_samples.size() - 1;
        const std::size_t even = intervals - intervals % 2;
        double acc = 0.0;
        for (std::size_t i = 0; i + 2 <= even; i += 2)
            acc += step / 3.0 * (integrand(i) + 4.0 * integrand(i + 1) + integrand(i + 2));
        if (even != intervals) acc += 0.5 * step * (integrand(even) + integrand(even + 1));
        return surface * acc;
    }
};

namespace detail {

// 8th-order central stencils for the first and second derivative.
inline constexpr std::array<double, 9> kFirstDerivative{1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0.0,
                                                         4.0 / 5,   -1.0 / 5,   4.0 / 105, -1.0 / 280};
inline constexpr std::array<double, 9> kSecondDerivative{-1.0 / 560, 8.0 / 315, -1.0 / 5,  8.0 / 5, -205.0 / 72,
                                                          8.0 / 5,    -1.0 / 5,  8.0 / 315, -1.0 / 560};

}  // namespace detail

/// sup |Q'' + ((n-1)/r) Q' - Q + |Q|^(p-1) Q| over the mesh, with derivatives from
/// 8th-order stencils on a stride of ~0.01 and even reflection through r = 0
/// (Q'(0) = 0; the r = 0 term becomes n Q''(0)).
inline double ode_residual(const GroundStateProfile& profile) {
    const long stride = std::max(1L, std::lround(0.01 / profile.step));
    const double H = stride * profile.step;
    const long n_samples = static_cast<long>(profile.count());
    const int n = profile.params.dim;
    const double p = profile.params.power;
    double worst = 0.0;
    for (long i = 0; i + 4 * stride < n_samples; i += stride) {
        double d1 = 0.0, d2 = 0.0;
        for (int k = -4; k <= 4; ++k) {
            const double q = profile.sample(i + k * stride);
            d1 += detail::kFirstDerivative[k + 4] * q;
            d2 += detail::kSecondDerivative[k + 4] * q;
        }
        d1 /= H;
        d2 /= H * H;
        const double r = static_cast<double>(i) * profile.step;
        const double q = profile.sample(i);
        const double radial = (r == 0.0) ? (n - 1) * d2 : (n - 1) / r * d1;
        const double res = d2 + radial - q + abs_pow(std::abs(q), p - 1.0) * q;
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

struct ShootOptions {
    /// Bisection stops once the bracket on Q(0) is narrower than this.
    long double tolerance = 1e-18L;
    double step = 1e-3;
    /// Truncation radius; 0 selects the first mesh point where Q <= 1e-9 Q(0).
    double r_max = 0.0;
    /// Initial bracket (under, over); searched in [1e-3, a_max] when absent.
    std::optional<std::pair<double, double>> bracket;
    double a_max = 1e4;
};

namespace detail {

enum class ShotKind { over, under, undecided };

struct Shot {
    ShotKind kind = ShotKind::undecided;
    std::vector<long double> samples;  // Q(i h) up to the classification point
};

using RadialState = std::array<long double, 2>;

// Integrates from r = 0 with Q(0) = a on the uniform mesh until Q changes sign
// (over) or Q' >= 0 while Q > 0 (under).
inline Shot fire(long double a, int n, long double p, long double h, long double r_limit, bool keep) {
    Shot shot;
    auto f = [](long double q, long double pw) { return q - (q == 0 ? 0.0L : std::pow(std::abs(q), pw - 1) * q); };
    // Near the origin Q = sum a_k r^(2k), with Q^p = sum b_k r^(2k) from the
    // power-of-series recursion and 2(k+1)(2k+n) a_(k+1) = a_k - b_k.
    constexpr int terms = 40;
    std::array<long double, terms> a_k{}, b_k{};
    a_k[0] = a;
    b_k[0] = std::pow(a, p);
    for (int k = 0; k + 1 < terms; ++k) {
        a_k[k + 1] = (a_k[k] - b_k[k]) / (2.0L * (k + 1) * (2 * k + n));
        const int m = k + 1;
        long double acc = 0.0L;
        for (int j = 1; j <= m; ++j) acc += ((p + 1) * j - m) * a_k[j] * b_k[m - j];
        b_k[m] = acc / (m * a);
    }
    auto series = [&](long double r) {
        const long double x = r * r;
        long double q = 0.0L, dq = 0.0L;
        for (int k = terms - 1; k >= 0; --k) {
            q = q * x + a_k[k];
            if (k > 0) dq = dq * x + 2.0L * k * a_k[k];
        }
        return RadialState{q, dq * r};
    };
    const long series_steps = std::max(1L, std::lround(static_cast<double>(0.25L / h)));
    RadialState state{};
    long start = 0;
    for (long i = 0; i <= series_steps; ++i) {
        state = series(i * h);
        start = i;
        if (keep) shot.samples.push_back(state[0]);
        if (i == 0) continue;
        if (state[0] < 0) {
            shot.kind = ShotKind::over;
            return shot;
        }
        if (state[1] >= 0) {
            shot.kind = ShotKind::under;
            return shot;
        }
    }
    auto rhs = [n, p, &f](const RadialState& y, RadialState& dy, long double r) {
        dy[0] = y[1];
        dy[1] = -(n - 1) / r * y[1] + f(y[0], p);
    };
    boost::numeric::odeint::runge_kutta4<RadialState, long double> stepper;
    const long steps = std::lround(static_cast<double>(r_limit / h));
    for (long i = start; i < steps; ++i) {
        stepper.do_step(rhs, state, i * h, h);
        if (keep) shot.samples.push_back(state[0]);
        if (state[0] < 0) {
            shot.kind = ShotKind::over;
            return shot;
        }
        if (state[1] >= 0) {
            shot.kind = ShotKind::under;
            return shot;
        }
    }
    return shot;
}

// Solves tail_value(c, r) = q for c by fixed-point iteration (the correction is tiny).
inline double tail_scale(double q, int n, double p, double r) {
    const double mode = decaying_mode(n, r);
    double c = q / mode;
    for (int it = 0; it < 50; ++it) {
        const double next = (q + std::pow(c * mode, p) / (p * p - 1.0)) / mode;
        if (next == c) break;
        c = next;
    }
    return c;
}

}  // namespace detail

inline GroundStateProfile shoot(const EquationParams& params, const ShootOptions& options = {}) {
    params.validate();
    if (params.sign != Sign::focusing) throw std::invalid_argument("shoot: the ground state requires the focusing sign");
    if (!params.l2_subcritical()) throw std::invalid_argument("shoot: the ground state requires s_c < 0");
    if (params.dim > 3) throw std::invalid_argument("shoot: dimensions above 3 are not supported");
    const int n = params.dim;
    const long double p = params.power;
    const long double h = options.step;
    constexpr long double r_limit = 80.0L;
    using detail::ShotKind;

    auto kind_of = [&](long double a) { return detail::fire(a, n, p, h, r_limit, false).kind; };

    long double lo = 0, hi = 0;
    if (options.bracket) {
        lo = options.bracket->first;
        hi = options.bracket->second;
        if (kind_of(lo) != ShotKind::under || kind_of(hi) != ShotKind::over)
            throw std::runtime_error("no ground state bracket: supplied bracket does not straddle Q(0)");
    } else {
        lo = 1e-3L;
        hi = 2.0L;
        if (kind_of(lo) != ShotKind::under) throw std::runtime_error("no ground state bracket");
        while (kind_of(hi) != ShotKind::over) {
            lo = hi;
            hi *= 2;
            if (hi > options.a_max) throw std::runtime_error("no ground state bracket");
        }
    }
    while (hi - lo > options.tolerance) {
        const long double mid = 0.5L * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const ShotKind k = kind_of(mid);
        if (k == ShotKind::over)
            hi = mid;
        else if (k == ShotKind::under)
            lo = mid;
        else {
            lo = hi = mid;
            break;
        }
    }

    const long double a = 0.5L * (lo + hi);
    const auto mid_shot = detail::fire(a, n, p, h, r_limit, true);
    const auto lo_shot = detail::fire(lo, n, p, h, r_limit, true);
    const auto hi_shot = detail::fire(hi, n, p, h, r_limit, true);
    const std::size_t reliable =
        std::min({mid_shot.samples.size(), lo_shot.samples.size(), hi_shot.samples.size()});

    // Match where the nonlinear term is negligible, or earlier if the unstable
    // mode (seen as the spread between the bracket ends) becomes visible.
    std::size_t match = 0;
    for (std::size_t i = 1; i + 8 < reliable; ++i) {
        const long double q = mid_shot.samples[i];
        if (q <= 0) break;
        match = i;
        const long double spread = std::abs(hi_shot.samples[i] - lo_shot.samples[i]);
        if (std::pow(q, p) <= 1e-12L || spread > 1e-7L * q) break;
    }
    if (match < 2) throw std::runtime_error("shoot: trajectory too short to match a decaying tail");

    GroundStateProfile profile;
    profile.params = params;
    profile.step = options.step;
    profile.q0 = static_cast<double>(a);
    profile.match_radius = static_cast<double>(match) * options.step;
    const double tail_scale = profile.tail_scale = detail::tail_scale(static_cast<double>(mid_shot.samples[match]), n,
                                                 params.power, profile.match_radius);

    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(30.0 / options.step));
    for (std::size_t i = 0; i <= match; ++i) samples.push_back(static_cast<double>(mid_shot.samples[i]));
    const double auto_floor = 1e-9 * profile.q0;
    const std::size_t fixed_count =
        options.r_max > 0.0 ? static_cast<std::size_t>(std::lround(options.r_max / options.step)) + 1 : 0;
    for (std::size_t i = match + 1;; ++i) {
        if (fixed_count != 0 && samples.size() >= fixed_count) break;
        if (fixed_count == 0 && samples.back() <= auto_floor) break;
        samples.push_back(detail::tail_value(tail_scale, n, params.power, static_cast<double>(i) * options.step));
    }
    if (fixed_count != 0 && samples.size() > fixed_count) samples.resize(fixed_count);
    profile.radial_samples = std::move(samples);
    profile.r_max = static_cast<double>(profile.count() - 1) * options.step;

    if (profile.radial_samples.back() > 1e-8 * profile.q0)
        throw std::runtime_error("shoot: r_max too small, Q(r_max) exceeds 1e-8 Q(0)");
    profile.residual = ode_residual(profile);
    return profile;
}

inline GroundStateProfile shoot(const EquationParams& params, long double tolerance) {
    ShootOptions options;
    options.tolerance = tolerance;
    return shoot(params, options);
}

/// e^{i theta} Q(|x - x0|) on the grid, with periodic minimal-image distance.
/// The box must hold Q down to 1e-8 Q(0) at distance L/2.
inline SpectralField embed(const GroundStateProfile& profile, const BoxGrid& grid, double theta = 0.0,
                           std::array<double, 3> x0 = {0.0, 0.0, 0.0}) {
    if (profile.params.dim != grid.dim) throw ContractViolation("embed: profile and grid dimensions differ");
    if (profile.value(0.5 * grid.length) > 1e-8 * profile.q0) throw ContractViolation("embed: profile too wide for box");
    const Complex phase = std::polar(1.0, theta);
    const double L = grid.length;
    return SpectralField::from_function(grid, [&](const std::array<double, 3>& x) {
        double r2 = 0.0;
        for (int d = 0; d < grid.dim; ++d) {
            double dx = x[d] - x0[d];
            dx -= L * std::floor(dx / L + 0.5);
            r2 += dx * dx;
        }
        return phase * profile.value(std::sqrt(r2));
    });
}

inline constexpr const char* kProfileFormatTag = "# imethod ground-state profile";
inline constexpr int kProfileFormatVersion = 1;

inline void save_profile(const GroundStateProfile& profile, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write profile file '" + path + "'");
    out << std::setprecision(17);
    out << kProfileFormatTag << '\n';
    out << "version = " << kProfileFormatVersion << '\n';
    out << "n = " << profile.params.dim << '\n';
    out << "p = " << profile.params.power << '\n';
    out << "q0 = " << profile.q0 << '\n';
    out << "r_max = " << profile.r_max << '\n';
    out << "residual = " << profile.residual << '\n';
    out << "step = " << profile.step << '\n';
    out << "match_radius = " << profile.match_radius << '\n';
    out << "tail_scale = " << profile.tail_scale << '\n';
    out << "samples = " << profile.count() << '\n';
    out << "---\n";
    for (std::size_t i = 0; i < profile.count(); ++i)
        out << static_cast<double>(i) * profile.step << ' ' << profile.radial_samples[i] << '\n';
}

inline GroundStateProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read profile file '" + path + "'");
    std::string line;
    std::getline(in, line);
    if (line != kProfileFormatTag) throw std::runtime_error("'" + path + "' is not a ground-state profile file");
    GroundStateProfile profile;
    profile.params.sign = Sign::focusing;
    std::size_t count = 0;
    int version = -1;
    while (std::getline(in, line) && line != "---") {
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("malformed profile header line: " + line);
        auto trim = [](std::string v) {
            v.erase(0, v.find_first_not_of(" \t"));
            v.erase(v.find_last_not_of(" \t") + 1);
            return v;
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "version") version = std::stoi(val);
        else if (key == "n") profile.params.dim = std::stoi(val);
        else if (key == "p") profile.params.power = std::stod(val);
        else if (key == "q0") profile.q0 = std::stod(val);
        else if (key == "r_max") profile.r_max = std::stod(val);
        else if (key == "residual") profile.residual = std::stod(val);
        else if (key == "step") profile.step = std::stod(val);
        else if (key == "match_radius") profile.match_radius = std::stod(val);
        else if (key == "tail_scale") profile.tail_scale = std::stod(val);
        else if (key == "samples") count = std::stoul(val);
        else throw std::runtime_error("unknown profile header key '" + key + "'");
    }
    if (version != kProfileFormatVersion)
        throw std::runtime_error("unsupported profile format version " + std::to_string(version));
    profile.radial_samples.reserve(count);
    double r = 0.0, q = 0.0;
    while (in >> r >> q) profile.radial_samples.push_back(q);
    if (profile.radial_samples.size() != count) throw std::runtime_error("profile file truncated: '" + path + "'");
    profile.params.validate();
    return profile;
}

}  // namespace imethod
