#pragma once

// Seeded synthetic distributions, their exact densities, and standardization.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <boost/random/chi_squared_distribution.hpp>

#include "spheredepth/error.hpp"
#include "spheredepth/rng.hpp"
#include "spheredepth/sample_set.hpp"

namespace spheredepth {

struct GaussianComponent {
    Vector mean;
    Eigen::MatrixXd covariance;
    double weight = 1.0;
};

/// Gaussian mixture; weights are normalized on validation. Draws whose norm exceeds
/// truncation_norm (when set) are rejected and redrawn.
struct MixtureSpec {
    std::vector<GaussianComponent> components;
    std::optional<double> truncation_norm;

    Eigen::Index dim() const { return components.front().mean.size(); }
};

namespace detail {

inline Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& cov, const char* what) {
    if (cov.rows() != cov.cols()) throw InvalidParameter(std::string(what) + " must be square");
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw InvalidParameter(std::string(what) + " must be symmetric");
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw InvalidParameter(std::string(what) + " must be positive definite");
    return llt.matrixL();
}

struct PreparedComponent {
    Vector mean;
    Eigen::MatrixXd chol;
    double weight;
    double log_norm;  // log of the Gaussian normalizing constant
};

inline std::vector<PreparedComponent> prepare(const MixtureSpec& spec) {
    require(!spec.components.empty(), "mixture needs at least one component");
    require(!spec.truncation_norm || *spec.truncation_norm > 0.0, "truncation_norm must be > 0");
    const Eigen::Index d = spec.dim();
    double total = 0.0;
    for (const auto& c : spec.components) {
        require_dim(static_cast<std::size_t>(d), static_cast<std::size_t>(c.mean.size()));
        require_dim(static_cast<std::size_t>(d), static_cast<std::size_t>(c.covariance.rows()));
        require(c.weight > 0.0, "mixture weights must be > 0");
        total += c.weight;
    }
    std::vector<PreparedComponent> out;
    for (const auto& c : spec.components) {
        PreparedComponent p{c.mean, cholesky_factor(c.covariance, "mixture covariance"), c.weight / total, 0.0};
        const double log_det = 2.0 * p.chol.diagonal().array().log().sum();
        p.log_norm = -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + log_det);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace detail

/// Equal-weight mixture of N(-offset * 1, I_d) and N(+offset * 1, I_d).
inline MixtureSpec bi_gaussian_spec(Eigen::Index d, double offset = 3.5) {
    MixtureSpec spec;
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
    spec.components.push_back({Vector::Constant(d, -offset), eye, 0.5});
    spec.components.push_back({Vector::Constant(d, offset), eye, 0.5});
    return spec;
}

inline MixtureSpec standard_gaussian_spec(Eigen::Index d, std::optional<double> truncation = std::nullopt) {
    MixtureSpec spec;
    spec.components.push_back({Vector::Zero(d), Eigen::MatrixXd::Identity(d, d), 1.0});
    spec.truncation_norm = truncation;
    return spec;
}

inline SampleSet gen_mixture(const MixtureSpec& spec, std::size_t n, std::uint64_t seed) {
    detail::require(n >= 1, "sample size must be >= 1");
    const auto comps = detail::prepare(spec);
    const Eigen::Index d = spec.dim();
    Rng rng(seed);
    Matrix out(static_cast<Eigen::Index>(n), d);
    for (std::size_t i = 0; i < n; ++i) {
        for (;;) {
            const double u = uniform01(rng);
            std::size_t k = 0;
            double cum = comps[0].weight;
            while (k + 1 < comps.size() && u >= cum) cum += comps[++k].weight;
            const Vector x = comps[k].mean + comps[k].chol * standard_normal_vector(rng, d);
            if (spec.truncation_norm && x.norm() > *spec.truncation_norm) continue;
            out.row(static_cast<Eigen::Index>(i)) = x.transpose();
            break;
        }
    }
    return SampleSet(std::move(out));
}

/// Exact mixture density sum_k w_k N(x; mu_k, Sigma_k) at each row of `points`.
/// Ignores truncation (the truncated mass is negligible for the shipped specs).
inline std::vector<double> mixture_density(const Matrix& points, const MixtureSpec& spec) {
    const auto comps = detail::prepare(spec);
    detail::require_dim(static_cast<std::size_t>(spec.dim()), static_cast<std::size_t>(points.cols()));
    std::vector<double> out(static_cast<std::size_t>(points.rows()), 0.0);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        double sum = 0.0;
        for (const auto& c : comps) {
            const Vector diff = points.row(i).transpose() - c.mean;
            const Vector y = c.chol.triangularView<Eigen::Lower>().solve(diff);
            sum += c.weight * std::exp(c.log_norm - 0.5 * y.squaredNorm());
        }
        out[static_cast<std::size_t>(i)] = sum;
    }
    return out;
}

/// Multivariate Student t with `df` degrees of freedom, rejection-truncated at truncation_norm.
struct StudentSpec {
    double df = 2.0;
    Vector mean;
    Eigen::MatrixXd scale;
    std::optional<double> truncation_norm = 10000.0;

    Eigen::Index dim() const { return mean.size(); }
};

inline SampleSet gen_student_t(const StudentSpec& spec, std::size_t n, std::uint64_t seed) {
    detail::require(n >= 1, "sample size must be >= 1");
    detail::require(spec.df > 0.0, "degrees of freedom must be > 0");
    detail::require(!spec.truncation_norm || *spec.truncation_norm > 0.0, "truncation_norm must be > 0");
    detail::require_dim(static_cast<std::size_t>(spec.dim()), static_cast<std::size_t>(spec.scale.rows()));
    const Eigen::MatrixXd chol = detail::cholesky_factor(spec.scale, "scale matrix");
    const Eigen::Index d = spec.dim();
    Rng rng(seed);
    boost::random::chi_squared_distribution<double> chi2(spec.df);
    Matrix out(static_cast<Eigen::Index>(n), d);
    for (std::size_t i = 0; i < n; ++i) {
        for (;;) {
            const Vector g = chol * standard_normal_vector(rng, d);
            const double w = chi2(rng);
            if (!(w > 0.0)) continue;
            const Vector x = spec.mean + g / std::sqrt(w / spec.df);
            if (!x.allFinite()) continue;
            if (spec.truncation_norm && x.norm() > *spec.truncation_norm) continue;
            out.row(static_cast<Eigen::Index>(i)) = x.transpose();
            break;
        }
    }
    return SampleSet(std::move(out));
}

struct StandardizationStats {
    Vector per_dimension_mean;
    double pooled_std = 1.0;  ///< sqrt of the mean of the unbiased per-dimension variances
};

/// Pooled standard deviation without transforming the data.
inline StandardizationStats standardization_stats(const SampleSet& x) {
    detail::require(x.size() >= 2, "standardization requires at least 2 samples");
    StandardizationStats st;
    st.per_dimension_mean = x.mean();
    const Matrix centered = x.matrix().rowwise() - st.per_dimension_mean.transpose();
    const Vector var = centered.colwise().squaredNorm().transpose() / static_cast<double>(x.size() - 1);
    st.pooled_std = std::sqrt(var.mean());
    if (!(st.pooled_std > 0.0)) throw InvalidParameter("cannot standardize constant data");
    return st;
}

/// Centers the columns and divides by the pooled standard deviation.
inline std::pair<SampleSet, StandardizationStats> standardize(const SampleSet& x) {
    StandardizationStats st = standardization_stats(x);
    Matrix out = (x.matrix().rowwise() - st.per_dimension_mean.transpose()) / st.pooled_std;
    return {SampleSet(std::move(out)), std::move(st)};
}

}  // namespace spheredepth
