#pragma once

// Riemannian gradient descent on the unit sphere for the smoothed sphere depth.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

#include "spheredepth/depth_core.hpp"
#include "spheredepth/error.hpp"
#include "spheredepth/parallel.hpp"
#include "spheredepth/rng.hpp"
#include "spheredepth/sample_set.hpp"

namespace spheredepth {

enum class InitMode {
    PaperMean,       ///< normalized sample mean
    MeanMinusZ,      ///< normalized (mean - z); isometry equivariant
    FixedDirection,  ///< OptimizerConfig::fixed_direction
    SeededRandom,    ///< uniform on the sphere from OptimizerConfig::seed
};

inline std::string_view to_string(InitMode m) {
    switch (m) {
        case InitMode::PaperMean: return "paper-mean";
        case InitMode::MeanMinusZ: return "mean-minus-z";
        case InitMode::FixedDirection: return "fixed-direction";
        case InitMode::SeededRandom: return "seeded-random";
    }
    return "unknown";
}

inline InitMode parse_init_mode(std::string_view s) {
    if (s == "paper-mean") return InitMode::PaperMean;
    if (s == "mean-minus-z") return InitMode::MeanMinusZ;
    if (s == "fixed-direction") return InitMode::FixedDirection;
    if (s == "seeded-random") return InitMode::SeededRandom;
    throw InvalidParameter("unknown init mode: " + std::string(s));
}

struct OptimizerConfig {
    double tol = 1e-6;
    double alpha0 = std::numbers::pi;
    int max_iter = 1000;
    InitMode init = InitMode::PaperMean;
    /// Reject a step that increases the loss (and halve alpha). When false, the step is kept
    /// as in the printed algorithm and the best iterate seen is reported.
    bool revert_on_increase = true;
    std::optional<Direction> fixed_direction;
    std::uint64_t seed = 0;
    /// Stop once the step angle drops below this; the iterate can no longer move meaningfully.
    double min_alpha = 1e-10;
    bool record_trace = false;

    void validate() const {
        detail::require(tol > 0.0, "tol must be > 0");
        detail::require(alpha0 > 0.0 && alpha0 <= std::numbers::pi, "alpha0 must lie in (0, pi]");
        detail::require(max_iter >= 1, "max_iter must be >= 1");
        detail::require(min_alpha >= 0.0, "min_alpha must be >= 0");
        detail::require(init != InitMode::FixedDirection || fixed_direction.has_value(),
                        "init=fixed-direction requires fixed_direction");
    }
};

struct DepthResult {
    double value = 0.0;
    Direction direction{Vector::Unit(1, 0)};
    int iterations = 0;
    bool converged = false;
    InitMode init_used = InitMode::PaperMean;
    /// Initialization fell back to the first canonical basis vector (degenerate mean).
    bool init_fallback = false;
    /// Per-iteration reported loss and the step angle after that iteration (record_trace only).
    std::vector<double> loss_trace;
    std::vector<double> alpha_trace;
    std::vector<bool> increase_events;
};

/// pi_{T_u}(g) = g - <g, u> u.
inline Vector tangent_project(const Direction& u, const Vector& g) {
    detail::require_dim(static_cast<std::size_t>(u.dim()), static_cast<std::size_t>(g.size()));
    return g - g.dot(u.vec()) * u.vec();
}

/// Geodesic step cos(alpha) u + sin(alpha) v, for unit v orthogonal to u.
inline Direction exp_map(const Direction& u, const Direction& v, double alpha) {
    detail::require_dim(static_cast<std::size_t>(u.dim()), static_cast<std::size_t>(v.dim()));
    if (std::abs(u.vec().dot(v.vec())) > 1e-8) throw InvalidParameter("exp_map: v must be orthogonal to u");
    detail::require(alpha >= 0.0 && alpha <= std::numbers::pi, "exp_map: alpha must lie in [0, pi]");
    Vector w = std::cos(alpha) * u.vec() + std::sin(alpha) * v.vec();
    w /= w.norm();
    return Direction(std::move(w));
}

namespace detail {

inline Direction canonical_direction(Eigen::Index d) { return Direction(Vector::Unit(d, 0)); }

inline std::pair<Direction, bool> normalized_or_fallback(const Vector& v) {
    const double norm = v.norm();
    if (!(norm > 1e-14) || !std::isfinite(norm)) return {canonical_direction(v.size()), true};
    return {Direction(v / norm), false};
}

}  // namespace detail

/// Starting direction for the given init mode; the flag reports a fallback to e_1.
inline std::pair<Direction, bool> initial_direction(const Vector& z, const SampleSet& x, const OptimizerConfig& cfg) {
    switch (cfg.init) {
        case InitMode::PaperMean: return detail::normalized_or_fallback(x.mean());
        case InitMode::MeanMinusZ: return detail::normalized_or_fallback(x.mean() - z);
        case InitMode::FixedDirection:
            detail::require_dim(static_cast<std::size_t>(x.dim()), static_cast<std::size_t>(cfg.fixed_direction->dim()));
            return {*cfg.fixed_direction, false};
        case InitMode::SeededRandom: {
            Rng rng(cfg.seed);
            return {random_direction(rng, x.dim()), false};
        }
    }
    throw InvalidParameter("unknown init mode");
}

/// Descent from a given starting direction.
inline DepthResult riemannian_descent(const Vector& z, const SampleSet& x, const DepthParams& p,
                                      const OptimizerConfig& cfg, const Direction& start) {
    p.require_smooth();
    cfg.validate();
    detail::check_point(x, z);
    detail::check_direction(x, start);

    DepthResult out;
    out.init_used = cfg.init;

    Direction u = start;
    auto [d, grad] = sphere_loss_and_gradient(u, z, x, p);
    Direction best_u = u;
    double best_d = d;
    double alpha = cfg.alpha0;
    bool moved = true;
    std::optional<Direction> descent;

    int it = 0;
    for (; it < cfg.max_iter; ++it) {
        if (moved) {
            Vector tangent = tangent_project(u, grad);
            // second pass: a near-radial gradient leaves a tangent dominated by cancellation error
            tangent = tangent_project(u, tangent);
            const double norm = tangent.norm();
            if (norm < 1e-14) {
                out.converged = true;
                break;
            }
            descent.emplace(-tangent / norm);
        }
        const Direction candidate = exp_map(u, *descent, alpha);
        auto [d_new, grad_new] = sphere_loss_and_gradient(candidate, z, x, p);
        if (d_new < best_d) {
            best_d = d_new;
            best_u = candidate;
        }

        bool increased = false;
        bool stop = false;
        if (d_new > d) {
            increased = true;
            alpha /= 2.0;
            if (cfg.revert_on_increase) {
                moved = false;
            } else {
                u = candidate;
                grad = std::move(grad_new);
                moved = true;
            }
        } else {
            const bool small = (d - d_new) < cfg.tol;
            u = candidate;
            grad = std::move(grad_new);
            moved = true;
            // The printed rule leaves d untouched on the final small step; the reported value
            // comes from best_d either way.
            if (!small || cfg.revert_on_increase) d = d_new;
            stop = small;
        }

        if (cfg.record_trace) {
            out.loss_trace.push_back(cfg.revert_on_increase ? d : d_new);
            out.alpha_trace.push_back(alpha);
            out.increase_events.push_back(increased);
        }
        if (stop || alpha < cfg.min_alpha) {
            out.converged = true;
            ++it;
            break;
        }
    }

    out.iterations = it;
    if (cfg.revert_on_increase) {
        out.value = d;
        out.direction = u;
    } else {
        out.value = best_d;
        out.direction = best_u;
    }
    return out;
}

/// Descent using the initialization selected in cfg.
inline DepthResult riemannian_descent(const Vector& z, const SampleSet& x, const DepthParams& p,
                                      const OptimizerConfig& cfg) {
    cfg.validate();
    detail::check_point(x, z);
    auto [start, fallback] = initial_direction(z, x, cfg);
    DepthResult out = riemannian_descent(z, x, p, cfg, start);
    out.init_fallback = fallback;
    return out;
}

/// Smoothed sphere depth SD_s^r(z | X) by Riemannian gradient descent.
inline DepthResult sphere_depth(const Vector& z, const SampleSet& x, const DepthParams& p,
                                const OptimizerConfig& cfg = {}) {
    return riemannian_descent(z, x, p, cfg);
}

/// sphere_depth for every row of `points`; result i depends only on row i.
inline std::vector<DepthResult> batch_depth(const Matrix& points, const SampleSet& x, const DepthParams& p,
                                            const OptimizerConfig& cfg = {}, unsigned threads = 1) {
    detail::require_dim(static_cast<std::size_t>(x.dim()), static_cast<std::size_t>(points.cols()));
    std::vector<std::optional<DepthResult>> slots(static_cast<std::size_t>(points.rows()));
    parallel_for(slots.size(), threads, [&](std::size_t i) {
        try {
            slots[i] = sphere_depth(points.row(static_cast<Eigen::Index>(i)).transpose(), x, p, cfg);
        } catch (const BatchError&) {
            throw;
        } catch (const std::exception& e) {
            throw BatchError(i, e.what());
        }
    });
    std::vector<DepthResult> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

inline std::vector<DepthResult> batch_depth(const std::vector<Vector>& points, const SampleSet& x,
                                            const DepthParams& p, const OptimizerConfig& cfg = {},
                                            unsigned threads = 1) {
    Matrix m(static_cast<Eigen::Index>(points.size()), x.dim());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != x.dim()) throw BatchError(i, DimensionMismatch(x.dim(), points[i].size()).what());
        m.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
    }
    return batch_depth(m, x, p, cfg, threads);
}

}  // namespace spheredepth
