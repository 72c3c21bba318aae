#pragma once

// Periodic-box discretization and the discrete Fourier transform used by every
// multiplier in the library.
//
// Conventions:
//   * grid points x_j = -L/2 + j*L/M per axis, row-major storage, last axis fastest
//   * frequencies xi_k = k/L with k in [-M/2, M/2)
//   * forward:  u_hat(xi) = dx^n * sum_j u(x_j) exp(-2 pi i x_j . xi)
//   * inverse:  u(x_j)    = L^-n * sum_k u_hat(xi_k) exp(+2 pi i x_j . xi_k)
// so the coefficients are Riemann sums of the continuous transform and
// mass = dx^n sum |u|^2 = L^-n sum |u_hat|^2.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <fftw3.h>

namespace imethod {

using Complex = std::complex<double>;

/// Violated operation precondition (wrong representation tag, bad grid, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct BoxGrid {
    int dim = 1;
    double length = 1.0;
    int points = 8;

    BoxGrid() = default;
    BoxGrid(int dim_, double length_, int points_) : dim(dim_), length(length_), points(points_) {
        validate();
    }

    void validate() const {
        if (dim < 1 || dim > 3) throw ContractViolation("BoxGrid: dim must be 1, 2 or 3");
        if (!(length > 0.0) || !std::isfinite(length))
            throw ContractViolation("BoxGrid: box_length must be positive");
        if (points < 8 || points % 2 != 0)
            throw ContractViolation("BoxGrid: points per axis must be even and >= 8");
    }

    std::size_t size() const {
        std::size_t total = 1;
        for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(points);
        return total;
    }

    double spacing() const { return length / points; }
    double cell_volume() const { return std::pow(spacing(), dim); }
    double volume() const { return std::pow(length, dim); }
    /// Largest per-axis frequency magnitude M/(2L).
    double xi_max() const { return points / (2.0 * length); }

    double coordinate(int index) const { return -0.5 * length + index * spacing(); }
    int signed_mode(int index) const { return index < points / 2 ? index : index - points; }
    double frequency(int index) const { return signed_mode(index) / length; }

    /// Multi-index of a flat offset, unused axes set to zero.
    std::array<int, 3> unflatten(std::size_t flat) const {
        std::array<int, 3> idx{0, 0, 0};
        for (int d = dim - 1; d >= 0; --d) {
            idx[d] = static_cast<int>(flat % points);
            flat /= points;
        }
        return idx;
    }

    bool operator==(const BoxGrid& o) const {
        return dim == o.dim && length == o.length && points == o.points;
    }
};

/// Calls fn(flat_index, xi_vector) for every lattice frequency.
template <class Fn>
void for_each_frequency(const BoxGrid& grid, Fn&& fn) {
    const std::size_t total = grid.size();
    for (std::size_t flat = 0; flat < total; ++flat) {
        const auto idx = grid.unflatten(flat);
        std::array<double, 3> xi{0.0, 0.0, 0.0};
        for (int d = 0; d < grid.dim; ++d) xi[d] = grid.frequency(idx[d]);
        fn(flat, xi);
    }
}

/// Calls fn(flat_index, x_vector) for every grid point.
template <class Fn>
void for_each_point(const BoxGrid& grid, Fn&& fn) {
    const std::size_t total = grid.size();
    for (std::size_t flat = 0; flat < total; ++flat) {
        const auto idx = grid.unflatten(flat);
        std::array<double, 3> x{0.0, 0.0, 0.0};
        for (int d = 0; d < grid.dim; ++d) x[d] = grid.coordinate(idx[d]);
        fn(flat, x);
    }
}

inline double norm3(const std::array<double, 3>& v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

/// |xi| at every lattice point, in storage order.
inline std::vector<double> radial_frequencies(const BoxGrid& grid) {
    std::vector<double> out(grid.size());
    for_each_frequency(grid, [&](std::size_t i, const std::array<double, 3>& xi) { out[i] = norm3(xi); });
    return out;
}

enum class Representation { physical, frequency };
enum class Direction { forward, inverse };

inline const char* to_string(Representation r) {
    return r == Representation::physical ? "physical" : "frequency";
}

struct SpectralField {
    BoxGrid grid;
    std::vector<Complex> samples;
    Representation representation = Representation::physical;

    SpectralField() = default;
    explicit SpectralField(const BoxGrid& g, Representation rep = Representation::physical)
        : grid(g), samples(g.size(), Complex{0.0, 0.0}), representation(rep) {}
    SpectralField(const BoxGrid& g, std::vector<Complex> data, Representation rep = Representation::physical)
        : grid(g), samples(std::move(data)), representation(rep) {
        if (samples.size() != grid.size())
            throw ContractViolation("SpectralField: sample count does not match grid");
    }

    std::size_t size() const { return samples.size(); }
    bool is_physical() const { return representation == Representation::physical; }
    Complex& operator[](std::size_t i) { return samples[i]; }
    const Complex& operator[](std::size_t i) const { return samples[i]; }

    /// Samples f(x) on the grid.
    template <class Fn>
    static SpectralField from_function(const BoxGrid& g, Fn&& f) {
        SpectralField out(g);
        for_each_point(g, [&](std::size_t i, const std::array<double, 3>& x) { out.samples[i] = f(x); });
        return out;
    }

    SpectralField& operator+=(const SpectralField& o) {
        check_compatible(o);
        for (std::size_t i = 0; i < samples.size(); ++i) samples[i] += o.samples[i];
        return *this;
    }
    SpectralField& operator-=(const SpectralField& o) {
        check_compatible(o);
        for (std::size_t i = 0; i < samples.size(); ++i) samples[i] -= o.samples[i];
        return *this;
    }
    SpectralField& operator*=(Complex c) {
        for (auto& v : samples) v *= c;
        return *this;
    }

    void check_compatible(const SpectralField& o) const {
        if (!(grid == o.grid) || representation != o.representation)
            throw ContractViolation("SpectralField: incompatible grids or representations");
    }
};

inline SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
inline SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
inline SpectralField operator*(Complex c, SpectralField a) { return a *= c; }

namespace detail {

// FFTW's planner is not thread-safe; executing an existing plan on new arrays is.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int dim, int points, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        const auto key = std::make_tuple(dim, points, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::array<int, 3> dims{points, points, points};
        std::size_t total = 1;
        for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(points);
        fftw_complex* buffer = fftw_alloc_complex(total);
        fftw_plan plan = fftw_plan_dft(dim, dims.data(), buffer, buffer, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buffer);
        if (plan == nullptr) throw std::runtime_error("FFTW planning failed");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    PlanCache() = default;
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

// (-1)^(k_1 + ... + k_n): the phase from placing the origin at the box center.
inline double centering_sign(const BoxGrid& grid, std::size_t flat) {
    int parity = 0;
    for (int d = grid.dim - 1; d >= 0; --d) {
        parity += static_cast<int>(flat % grid.points);
        flat /= grid.points;
    }
    return (parity % 2 == 0) ? 1.0 : -1.0;
}

inline void execute(const BoxGrid& grid, std::vector<Complex>& data, int sign) {
    fftw_plan plan = PlanCache::instance().get(grid.dim, grid.points, sign);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace detail

/// In-place transform; flips the representation tag.
inline void transform_in_place(SpectralField& field, Direction direction) {
    const BoxGrid& grid = field.grid;
    if (direction == Direction::forward) {
        if (!field.is_physical())
            throw ContractViolation("transform: forward transform requires a physical-space field");
        detail::execute(grid, field.samples, FFTW_FORWARD);
        const double scale = grid.cell_volume();
        for (std::size_t i = 0; i < field.size(); ++i)
            field.samples[i] *= scale * detail::centering_sign(grid, i);
        field.representation = Representation::frequency;
    } else {
        if (field.is_physical())
            throw ContractViolation("transform: inverse transform requires a frequency-space field");
        for (std::size_t i = 0; i < field.size(); ++i) field.samples[i] *= detail::centering_sign(grid, i);
        detail::execute(grid, field.samples, FFTW_BACKWARD);
        const double scale = 1.0 / grid.volume();
        for (auto& v : field.samples) v *= scale;
        field.representation = Representation::physical;
    }
}

inline SpectralField transform(SpectralField field, Direction direction) {
    transform_in_place(field, direction);
    return field;
}

inline SpectralField to_frequency(SpectralField field) {
    if (field.is_physical()) transform_in_place(field, Direction::forward);
    return field;
}

inline SpectralField to_physical(SpectralField field) {
    if (!field.is_physical()) transform_in_place(field, Direction::inverse);
    return field;
}

/// Weighted coefficient sum L^-n sum w(xi)|u_hat|^2; weight given per lattice point.
inline double weighted_coefficient_sum(const SpectralField& spectrum, std::span<const double> weight) {
    double acc = 0.0;
    for (std::size_t i = 0; i < spectrum.size(); ++i) acc += weight[i] * std::norm(spectrum.samples[i]);
    return acc / spectrum.grid.volume();
}

/// Fraction of L^2 mass carried by |xi| >= (2/3) xi_max.
inline double tail_fraction(const SpectralField& field) {
    const SpectralField spectrum = to_frequency(field);
    const double threshold = (2.0 / 3.0) * field.grid.xi_max();
    double tail = 0.0, total = 0.0;
    for_each_frequency(field.grid, [&](std::size_t i, const std::array<double, 3>& xi) {
        const double w = std::norm(spectrum.samples[i]);
        total += w;
        if (norm3(xi) >= threshold) tail += w;
    });
    return total > 0.0 ? tail / total : 0.0;
}

/// Fraction of mass inside the central half of the box (|x_d| < L/4 on every axis).
inline double localization(const SpectralField& field) {
    if (!field.is_physical()) return localization(to_physical(field));
    const double quarter = 0.25 * field.grid.length;
    double inside = 0.0, total = 0.0;
    for_each_point(field.grid, [&](std::size_t i, const std::array<double, 3>& x) {
        const double w = std::norm(field.samples[i]);
        total += w;
        bool central = true;
        for (int d = 0; d < field.grid.dim; ++d) central = central && std::abs(x[d]) < quarter;
        if (central) inside += w;
    });
    return total > 0.0 ? inside / total : 1.0;
}

/// Shift by an integer number of grid cells per axis: out(x) = in(x - shift*dx).
inline SpectralField lattice_shift(const SpectralField& field, std::array<int, 3> shift) {
    if (!field.is_physical()) throw ContractViolation("lattice_shift: physical-space field required");
    SpectralField out(field.grid, field.representation);
    const BoxGrid& g = field.grid;
    const int M = g.points;
    for (std::size_t flat = 0; flat < field.size(); ++flat) {
        auto idx = g.unflatten(flat);
        std::size_t target = 0;
        for (int d = 0; d < g.dim; ++d) target = target * M + static_cast<std::size_t>(((idx[d] + shift[d]) % M + M) % M);
        out.samples[target] = field.samples[flat];
    }
    return out;
}

}  // namespace imethod
