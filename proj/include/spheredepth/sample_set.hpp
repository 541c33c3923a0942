#pragma once

#include <cmath>
#include <memory>
#include <utility>

#include <Eigen/Dense>

#include "spheredepth/error.hpp"

namespace spheredepth {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Immutable n x d matrix of observations (one row per sample).
///
/// Copies share the underlying storage, so passing a SampleSet by value is cheap.
class SampleSet {
public:
    explicit SampleSet(Matrix data) {
        if (data.rows() < 1 || data.cols() < 1)
            throw InvalidParameter("SampleSet requires n >= 1 and d >= 1");
        if (!data.allFinite()) throw InvalidParameter("SampleSet entries must be finite");
        data_ = std::make_shared<const Matrix>(std::move(data));
    }

    Eigen::Index size() const noexcept { return data_->rows(); }
    Eigen::Index dim() const noexcept { return data_->cols(); }

    const Matrix& matrix() const noexcept { return *data_; }
    auto row(Eigen::Index i) const { return data_->row(i); }

    Vector mean() const { return data_->colwise().mean().transpose(); }

private:
    std::shared_ptr<const Matrix> data_;
};

namespace detail {

inline void check_point(const SampleSet& x, const Vector& z) {
    require_dim(static_cast<std::size_t>(x.dim()), static_cast<std::size_t>(z.size()));
    if (!z.allFinite()) throw InvalidParameter("query point entries must be finite");
}

}  // namespace detail

/// Unit vector in R^d. Construction renormalizes unless the input is already unit within 1e-12.
class Direction {
public:
    explicit Direction(Vector u) : u_(std::move(u)) {
        const double norm = u_.norm();
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw InvalidParameter("direction must be a finite nonzero vector");
        if (std::abs(norm - 1.0) > 1e-12) u_ /= norm;
    }

    const Vector& vec() const noexcept { return u_; }
    Eigen::Index dim() const noexcept { return u_.size(); }
    double operator[](Eigen::Index i) const { return u_[i]; }

private:
    Vector u_;
};

/// Radius r > 0 and smoothing scale s >= 0 of the sphere depth.
struct DepthParams {
    double r = 1.0;
    double s = 1.0;

    DepthParams() = default;
    DepthParams(double radius, double scale) : r(radius), s(scale) { validate(); }

    void validate() const {
        detail::require(std::isfinite(r) && r > 0.0, "radius r must be > 0");
        detail::require(std::isfinite(s) && s >= 0.0, "smoothing scale s must be >= 0");
    }
    void require_smooth() const {
        validate();
        detail::require(s > 0.0, "smoothing scale s must be > 0 on gradient paths (use the grid oracle for s = 0)");
    }
};

}  // namespace spheredepth
