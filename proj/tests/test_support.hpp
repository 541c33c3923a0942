#pragma once

// Test-only oracles and fixtures. Nothing here calls the library routine it is used to check.

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/QR>

#include "spheredepth/spheredepth.hpp"

namespace spheredepth::testing {

inline Matrix random_matrix(Rng& rng, Eigen::Index n, Eigen::Index d, double scale = 1.0) {
    Matrix m(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = scale * standard_normal(rng);
    return m;
}

inline Vector random_vector(Rng& rng, Eigen::Index d, double scale = 1.0) {
    return scale * standard_normal_vector(rng, d);
}

/// Haar-ish random orthogonal matrix from the QR of a Gaussian matrix.
inline Eigen::MatrixXd random_orthogonal(Rng& rng, Eigen::Index d) {
    Eigen::MatrixXd g(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) g(i, j) = standard_normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    return q;
}

inline SampleSet four_point_cross() {
    Matrix m(4, 2);
    m << 1, 0, -1, 0, 0, 1, 0, -1;
    return SampleSet(m);
}

/// Naive textbook sigmoid, no overflow guard (fine for moderate arguments).
inline double naive_sigmoid(double t, double s) { return 1.0 / (1.0 + std::exp(-t / s)); }

/// Per-sample re-summation of the sphere objective with explicit loops.
inline double naive_sphere_loss(const Vector& u, const Vector& z, const Matrix& x, double r, double s) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double dist2 = 0.0;
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const double c = x(i, j) - z[j] - r * u[j];
            dist2 += c * c;
        }
        total += naive_sigmoid(r * r - dist2, s);
    }
    return total / static_cast<double>(x.rows());
}

/// Central finite difference of the loss as a function of the raw ambient vector u (no renormalization).
inline Vector finite_difference_gradient(const Vector& u, const Vector& z, const Matrix& x, double r, double s,
                                         double step = 1e-6) {
    Vector g(u.size());
    for (Eigen::Index j = 0; j < u.size(); ++j) {
        Vector up = u, dn = u;
        up[j] += step;
        dn[j] -= step;
        g[j] = (naive_sphere_loss(up, z, x, r, s) - naive_sphere_loss(dn, z, x, r, s)) / (2.0 * step);
    }
    return g;
}

/// Exhaustive indicator count over explicit angles (d = 2): min over k of the ball mass.
inline double exhaustive_ball_depth_2d(const Vector& z, const Matrix& x, double r, std::size_t count) {
    double best = 2.0;
    for (std::size_t k = 0; k < count; ++k) {
        const double a = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(count);
        const double cx = z[0] + r * std::cos(a), cy = z[1] + r * std::sin(a);
        int inside = 0;
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const double dx = x(i, 0) - cx, dy = x(i, 1) - cy;
            if (r * r - (dx * dx + dy * dy) >= 0.0) ++inside;
        }
        best = std::min(best, static_cast<double>(inside) / static_cast<double>(x.rows()));
    }
    return best;
}

inline double exhaustive_halfspace_depth_2d(const Vector& z, const Matrix& x, std::size_t count) {
    double best = 2.0;
    for (std::size_t k = 0; k < count; ++k) {
        const double a = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(count);
        int side = 0;
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            if (std::cos(a) * (x(i, 0) - z[0]) + std::sin(a) * (x(i, 1) - z[1]) >= 0.0) ++side;
        best = std::min(best, static_cast<double>(side) / static_cast<double>(x.rows()));
    }
    return best;
}

// ---- pair-enumeration oracles for the rank statistics ----

struct PairCounts {
    std::uint64_t satisfied = 0;
    std::uint64_t ties = 0;
};

inline PairCounts enumerate_quality(const std::vector<double>& f, const std::vector<double>& g) {
    PairCounts c;
    for (double a : f)
        for (double b : g) {
            if (a <= b) ++c.satisfied;
            if (a == b) ++c.ties;
        }
    return c;
}

inline double enumerate_auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double wins = 0.0;
    std::uint64_t pos = 0, neg = 0;
    for (int l : labels) (l == 1 ? pos : neg) += 1;
    for (std::size_t i = 0; i < scores.size(); ++i)
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[i] != 1 || labels[j] != 0) continue;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    return wins / (static_cast<double>(pos) * static_cast<double>(neg));
}

/// tau-b from explicit concordant/discordant/tie classification of every pair.
inline double enumerate_kendall(const std::vector<double>& a, const std::vector<double>& b) {
    std::uint64_t n0 = 0, tie_a = 0, tie_b = 0, tie_ab = 0;
    std::int64_t conc_minus_disc = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            ++n0;
            const bool ta = a[i] == a[j], tb = b[i] == b[j];
            if (ta) ++tie_a;
            if (tb) ++tie_b;
            if (ta && tb) ++tie_ab;
            if (ta || tb) continue;
            conc_minus_disc += ((a[i] < a[j]) == (b[i] < b[j])) ? 1 : -1;
        }
    // integer counts are exact in double, so this matches any exact tau-b evaluation bit for bit
    const double numer = static_cast<double>(conc_minus_disc);
    const double denom = std::sqrt(static_cast<double>(n0 - tie_a) * static_cast<double>(n0 - tie_b));
    return std::clamp(numer / denom, -1.0, 1.0);
}

/// Average ranks from pair counts: 1 + #{j : v_j < v_i} + #{j != i : v_j = v_i} / 2.
inline std::vector<double> enumerate_ranks(const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double below = 0.0, equal = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (v[j] < v[i]) below += 1.0;
            else if (j != i && v[j] == v[i]) equal += 1.0;
        }
        r[i] = 1.0 + below + 0.5 * equal;
    }
    return r;
}

/// Textbook sum-of-products Pearson correlation.
inline double textbook_pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sa += a[i];
        sb += b[i];
        sab += a[i] * b[i];
        saa += a[i] * a[i];
        sbb += b[i] * b[i];
    }
    return (n * sab - sa * sb) / std::sqrt((n * saa - sa * sa) * (n * sbb - sb * sb));
}

/// Random small list with deliberate ties (values drawn from a coarse lattice).
inline std::vector<double> random_tied_list(Rng& rng, std::size_t len, int levels) {
    std::vector<double> v(len);
    for (auto& x : v) x = std::floor(uniform01(rng) * levels);
    return v;
}

}  // namespace spheredepth::testing
