#pragma once

// Sphere-depth objective: smoothed ball-mass loss over directions, its gradient, and
// brute-force direction-grid oracles for the sphere and halfspace depths.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "spheredepth/error.hpp"
#include "spheredepth/parallel.hpp"
#include "spheredepth/rng.hpp"
#include "spheredepth/sample_set.hpp"

namespace spheredepth {

/// sig_s(t) = 1 / (1 + exp(-t / s)), evaluated without overflow for large |t / s|.
inline double sigmoid(double t, double s) {
    detail::require(s > 0.0, "sigmoid scale s must be > 0");
    const double x = t / s;
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// d/dt sig_s(t) = (1/s) sig_1(t/s) (1 - sig_1(t/s)).
inline double sigmoid_derivative(double t, double s) {
    detail::require(s > 0.0, "sigmoid scale s must be > 0");
    const double e = std::exp(-std::abs(t / s));
    const double denom = 1.0 + e;
    return e / (denom * denom) / s;
}

namespace detail {

inline void check_direction(const SampleSet& x, const Direction& u) {
    require_dim(static_cast<std::size_t>(x.dim()), static_cast<std::size_t>(u.dim()));
}

// Margins r^2 - ||x_i - z - r u||^2, expanded with ||u|| = 1 as 2r<u, x_i - z> - ||x_i - z||^2.
// A sample at z then has margin exactly 0, and a nonnegative margin forces <u, x_i - z> >= 0.
inline double ball_margin(const Vector& diff, const Vector& u, double r) {
    return 2.0 * r * diff.dot(u) - diff.squaredNorm();
}

inline Eigen::VectorXd ball_margins(const Direction& u, const Vector& z, const SampleSet& x, double r) {
    const Matrix diff = x.matrix().rowwise() - z.transpose();
    return 2.0 * r * (diff * u.vec()).array() - diff.rowwise().squaredNorm().array();
}

}  // namespace detail

/// L(u) = (1/n) sum_i sig_s(r^2 - ||x_i - z - r u||^2).
inline double sphere_loss(const Direction& u, const Vector& z, const SampleSet& x, const DepthParams& p) {
    p.require_smooth();
    detail::check_point(x, z);
    detail::check_direction(x, u);
    const Eigen::VectorXd margins = detail::ball_margins(u, z, x, p.r);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < margins.size(); ++i) sum += sigmoid(margins[i], p.s);
    return sum / static_cast<double>(x.size());
}

/// Ambient gradient of sphere_loss with respect to u (no tangent projection):
/// (1/n) sum_i sig_s'(r^2 - ||w_i||^2) 2 r w_i, with w_i = x_i - z - r u.
inline Vector sphere_loss_gradient(const Direction& u, const Vector& z, const SampleSet& x, const DepthParams& p) {
    p.require_smooth();
    detail::check_point(x, z);
    detail::check_direction(x, u);
    Vector grad = Vector::Zero(x.dim());
    Vector diff(x.dim());
    const Matrix& data = x.matrix();
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        diff.noalias() = data.row(i).transpose() - z;
        const double weight = sigmoid_derivative(detail::ball_margin(diff, u.vec(), p.r), p.s);
        grad.noalias() += weight * (diff - p.r * u.vec());
    }
    return grad * (2.0 * p.r / static_cast<double>(x.size()));
}

/// Loss value and ambient gradient in one pass over the data.
inline std::pair<double, Vector> sphere_loss_and_gradient(const Direction& u, const Vector& z, const SampleSet& x,
                                                          const DepthParams& p) {
    p.require_smooth();
    detail::check_point(x, z);
    detail::check_direction(x, u);
    Vector grad = Vector::Zero(x.dim());
    double sum = 0.0;
    Vector diff(x.dim());
    const Matrix& data = x.matrix();
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        diff.noalias() = data.row(i).transpose() - z;
        const double t = detail::ball_margin(diff, u.vec(), p.r) / p.s;
        // one exponential serves both the sigmoid and its derivative
        const double e = std::exp(-std::abs(t));
        const double inv = 1.0 / (1.0 + e);
        sum += t >= 0.0 ? inv : e * inv;
        grad.noalias() += (e * inv * inv) * (diff - p.r * u.vec());
    }
    grad /= p.s;
    const double n = static_cast<double>(x.size());
    return {sum / n, grad * (2.0 * p.r / n)};
}

enum class GridKind { Equiangular, Fibonacci, RandomUniform, Explicit };

/// Finite set of unit directions used to discretize the infimum over the sphere.
class DirectionGrid {
public:
    /// Equiangular (d = 2, half-step offset so no direction is axis aligned), Fibonacci sphere
    /// (d = 3), seeded normalized Gaussians (d > 3). For d = 1 the sphere is {-1, +1}.
    static DirectionGrid make(Eigen::Index d, std::size_t count, std::uint64_t seed = 0) {
        detail::require(d >= 1, "grid dimension must be >= 1");
        detail::require(count >= 1, "grid must contain at least one direction");
        std::vector<Direction> dirs;
        GridKind kind = GridKind::RandomUniform;
        if (d == 1) {
            kind = GridKind::Explicit;
            dirs.emplace_back(Vector::Constant(1, 1.0));
            dirs.emplace_back(Vector::Constant(1, -1.0));
        } else if (d == 2) {
            kind = GridKind::Equiangular;
            dirs.reserve(count);
            for (std::size_t k = 0; k < count; ++k) {
                const double angle = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(count);
                Vector v(2);
                v << std::cos(angle), std::sin(angle);
                dirs.emplace_back(std::move(v));
            }
        } else if (d == 3) {
            kind = GridKind::Fibonacci;
            dirs.reserve(count);
            const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
            for (std::size_t k = 0; k < count; ++k) {
                const double h = 1.0 - (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(count);
                const double rad = std::sqrt(std::max(0.0, 1.0 - h * h));
                const double phi = golden * static_cast<double>(k);
                Vector v(3);
                v << rad * std::cos(phi), rad * std::sin(phi), h;
                dirs.emplace_back(std::move(v));
            }
        } else {
            Rng rng(seed);
            dirs.reserve(count);
            for (std::size_t k = 0; k < count; ++k) dirs.push_back(random_direction(rng, d));
        }
        return DirectionGrid(std::move(dirs), kind, seed);
    }

    static DirectionGrid from_directions(std::vector<Direction> dirs) {
        detail::require(!dirs.empty(), "grid must contain at least one direction");
        const Eigen::Index d = dirs.front().dim();
        for (const auto& u : dirs) detail::require_dim(static_cast<std::size_t>(d), static_cast<std::size_t>(u.dim()));
        return DirectionGrid(std::move(dirs), GridKind::Explicit, 0);
    }

    /// Grid {Q u} for a d x d orthogonal Q.
    DirectionGrid transformed(const Eigen::MatrixXd& q) const {
        std::vector<Direction> out;
        out.reserve(dirs_.size());
        for (const auto& u : dirs_) out.emplace_back(q * u.vec());
        return DirectionGrid(std::move(out), GridKind::Explicit, seed_);
    }

    std::size_t size() const noexcept { return dirs_.size(); }
    Eigen::Index dim() const noexcept { return dirs_.front().dim(); }
    const Direction& operator[](std::size_t i) const { return dirs_[i]; }
    const std::vector<Direction>& directions() const noexcept { return dirs_; }
    GridKind kind() const noexcept { return kind_; }
    std::uint64_t seed() const noexcept { return seed_; }

private:
    DirectionGrid(std::vector<Direction> dirs, GridKind kind, std::uint64_t seed)
        : dirs_(std::move(dirs)), kind_(kind), seed_(seed) {}

    std::vector<Direction> dirs_;
    GridKind kind_;
    std::uint64_t seed_;
};

struct OracleResult {
    double value;
    Direction argmin;
};

namespace detail {

// Index-ordered argmin: the first minimizing direction wins, whatever order values were filled in.
inline OracleResult grid_argmin(const DirectionGrid& grid, const std::vector<double>& values) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < values.size(); ++k)
        if (values[k] < values[best]) best = k;
    return {values[best], grid[best]};
}

}  // namespace detail

/// Minimum of the sphere-depth objective over the grid. With s = 0 the sigmoid is replaced by the
/// ball indicator 1{r^2 - ||x_i - z - r u||^2 >= 0}, so the value is a multiple of 1/n.
inline OracleResult grid_oracle_sphere_depth(const Vector& z, const SampleSet& x, const DepthParams& p,
                                             const DirectionGrid& grid, unsigned threads = 1) {
    p.validate();
    detail::check_point(x, z);
    detail::require_dim(static_cast<std::size_t>(x.dim()), static_cast<std::size_t>(grid.dim()));
    const double n = static_cast<double>(x.size());
    std::vector<double> values(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t k) {
        const Eigen::VectorXd margins = detail::ball_margins(grid[k], z, x, p.r);
        double sum = 0.0;
        if (p.s == 0.0) {
            for (Eigen::Index i = 0; i < margins.size(); ++i) sum += margins[i] >= 0.0 ? 1.0 : 0.0;
        } else {
            for (Eigen::Index i = 0; i < margins.size(); ++i) sum += sigmoid(margins[i], p.s);
        }
        values[k] = sum / n;
    });
    return detail::grid_argmin(grid, values);
}

/// Count fraction of samples in the closed halfspace {x : <u, x - z> >= 0}.
inline double halfspace_mass(const Vector& u, const Vector& z, const SampleSet& x) {
    const Eigen::VectorXd proj = (x.matrix().rowwise() - z.transpose()) * u;
    return static_cast<double>((proj.array() >= 0.0).count()) / static_cast<double>(x.size());
}

/// Tukey halfspace depth minimized over the grid (non-strict inequality, so a sample equal to z
/// counts on every side).
inline OracleResult grid_oracle_halfspace_depth(const Vector& z, const SampleSet& x, const DirectionGrid& grid,
                                                unsigned threads = 1) {
    detail::check_point(x, z);
    detail::require_dim(static_cast<std::size_t>(x.dim()), static_cast<std::size_t>(grid.dim()));
    std::vector<double> values(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t k) { values[k] = halfspace_mass(grid[k].vec(), z, x); });
    return detail::grid_argmin(grid, values);
}

}  // namespace spheredepth
