#pragma once

// Comparison depths: Tukey halfspace depth (Nelder-Mead), Mahalanobis depth and
// Gaussian-kernel spatial depth.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Cholesky>

#include "spheredepth/depth_core.hpp"
#include "spheredepth/error.hpp"
#include "spheredepth/nelder_mead.hpp"
#include "spheredepth/rng.hpp"
#include "spheredepth/sample_set.hpp"
#include "spheredepth/sphere_optim.hpp"

namespace spheredepth {

struct HalfspaceConfig {
    int restarts = 10;
    std::uint64_t seed = 0;
    double simplex_tolerance = 1e-6;
    int max_evals = 2000;

    void validate() const {
        detail::require(restarts >= 1, "restarts must be >= 1");
        detail::require(simplex_tolerance > 0.0, "simplex_tolerance must be > 0");
        detail::require(max_evals >= 1, "max_evals must be >= 1");
    }
};

/// Halfspace depth min_u (1/n) #{<u, x_i - z> >= 0} by Nelder-Mead on R^d (u normalized inside
/// the objective). Starts: the direction from the sample mean to z, then seeded random directions.
/// The objective is piecewise constant, so the result is an upper approximation of the infimum.
inline DepthResult halfspace_depth(const Vector& z, const SampleSet& x, const HalfspaceConfig& cfg = {}) {
    cfg.validate();
    detail::check_point(x, z);
    const Matrix centered = x.matrix().rowwise() - z.transpose();
    const double n = static_cast<double>(x.size());
    auto objective = [&](const Vector& v) {
        const double norm = v.norm();
        if (!(norm > 0.0)) return 1.0;
        const Eigen::VectorXd proj = centered * (v / norm);
        return static_cast<double>((proj.array() >= 0.0).count()) / n;
    };

    NelderMeadOptions opt;
    opt.simplex_tolerance = cfg.simplex_tolerance;
    opt.max_evals = cfg.max_evals;

    Rng rng(cfg.seed);
    DepthResult out;
    out.value = 2.0;
    out.converged = true;
    for (int k = 0; k < cfg.restarts; ++k) {
        Vector start = k == 0 ? detail::normalized_or_fallback(z - x.mean()).first.vec()
                              : random_direction(rng, x.dim()).vec();
        const NelderMeadResult res = nelder_mead(objective, start, opt);
        out.iterations += res.evaluations;
        out.converged = out.converged && res.converged;
        if (res.value < out.value) {
            out.value = res.value;
            out.direction = detail::normalized_or_fallback(res.x).first;
        }
    }
    return out;
}

/// Fitted location/scatter for the Mahalanobis depth.
struct MahalanobisModel {
    Vector mean;
    Eigen::MatrixXd covariance_inverse;
    double regularization = 0.0;
};

/// Column means and the inverse of (unbiased covariance + regularization * I).
inline MahalanobisModel fit_mahalanobis(const SampleSet& x, double regularization = 0.0) {
    detail::require(x.size() >= 2, "fit_mahalanobis requires at least 2 samples");
    detail::require(regularization >= 0.0, "regularization must be >= 0");
    MahalanobisModel model;
    model.mean = x.mean();
    model.regularization = regularization;
    const Matrix centered = x.matrix().rowwise() - model.mean.transpose();
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(x.size() - 1);
    cov.diagonal().array() += regularization;

    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success || llt.rcond() < 1e-14) {
        throw SingularMatrix(regularization > 0.0
                                 ? "covariance is not positive definite even after regularization"
                                 : "covariance is singular; set a positive regularization");
    }
    model.covariance_inverse = llt.solve(Eigen::MatrixXd::Identity(x.dim(), x.dim()));
    model.covariance_inverse = 0.5 * (model.covariance_inverse + model.covariance_inverse.transpose()).eval();
    return model;
}

/// 1 / (1 + (z - mu)^T Sigma^{-1} (z - mu)).
inline double mahalanobis_depth(const Vector& z, const MahalanobisModel& model) {
    detail::require_dim(static_cast<std::size_t>(model.mean.size()), static_cast<std::size_t>(z.size()));
    const Vector diff = z - model.mean;
    const double q = diff.dot(model.covariance_inverse * diff);
    return 1.0 / (1.0 + std::max(0.0, q));
}

struct KernelConfig {
    double bandwidth_h = 1.0;

    void validate() const { detail::require(bandwidth_h > 0.0, "kernel bandwidth h must be > 0"); }
};

/// Spatial depth in the feature space of k(x, y) = exp(-||x - y||^2 / h^2):
///   1 - || mean_i (phi(z) - phi(x_i)) / ||phi(z) - phi(x_i)|| ||,
/// expanded through Gram entries. The sample Gram matrix is computed once at construction.
/// Samples coinciding with z are left out of the average.
class KernelSpatialDepth {
public:
    KernelSpatialDepth(SampleSet x, KernelConfig cfg) : x_(std::move(x)), cfg_(cfg) {
        cfg_.validate();
        const Eigen::Index n = x_.size();
        gram_.resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            gram_(i, i) = 1.0;
            for (Eigen::Index j = 0; j < i; ++j) gram_(i, j) = gram_(j, i) = kernel(x_.row(i), x_.row(j));
        }
    }

    double depth(const Vector& z) const {
        detail::check_point(x_, z);
        const Eigen::Index n = x_.size();
        std::vector<Eigen::Index> kept;
        std::vector<double> kz;
        std::vector<double> inv_norm;
        kept.reserve(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            const double dist2 = (x_.row(i).transpose() - z).squaredNorm();
            if (dist2 == 0.0) continue;
            const double h2 = cfg_.bandwidth_h * cfg_.bandwidth_h;
            // ||phi(z) - phi(x_i)||^2 = 2 - 2 k(z, x_i), via expm1 for accuracy near z
            const double norm2 = -2.0 * std::expm1(-dist2 / h2);
            if (!(norm2 > 0.0)) continue;
            kept.push_back(i);
            kz.push_back(std::exp(-dist2 / h2));
            inv_norm.push_back(1.0 / std::sqrt(norm2));
        }
        if (kept.empty()) return 1.0;

        const std::size_t m = kept.size();
        double total = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            total += 1.0;  // unit vector with itself
            for (std::size_t b = 0; b < a; ++b) {
                const double inner = 1.0 - kz[a] - kz[b] + gram_(kept[a], kept[b]);
                total += 2.0 * inner * inv_norm[a] * inv_norm[b];
            }
        }
        const double norm = std::sqrt(std::max(0.0, total)) / static_cast<double>(m);
        return std::clamp(1.0 - norm, 0.0, 1.0);
    }

    const SampleSet& samples() const noexcept { return x_; }

private:
    double kernel(const auto& a, const auto& b) const {
        return std::exp(-(a - b).squaredNorm() / (cfg_.bandwidth_h * cfg_.bandwidth_h));
    }

    SampleSet x_;
    KernelConfig cfg_;
    Eigen::MatrixXd gram_;
};

inline double kernelized_spatial_depth(const Vector& z, const SampleSet& x, const KernelConfig& k) {
    return KernelSpatialDepth(x, k).depth(z);
}

}  // namespace spheredepth
