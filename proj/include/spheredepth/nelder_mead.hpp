#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

#include "spheredepth/sample_set.hpp"

namespace spheredepth {

struct NelderMeadOptions {
    double initial_step = 0.5;
    double simplex_tolerance = 1e-6;  ///< stop when the simplex diameter falls below this
    int max_evals = 2000;
};

struct NelderMeadResult {
    Vector x;
    double value;
    int evaluations;
    bool converged;
};

/// Derivative-free simplex minimization (standard reflection/expansion/contraction/shrink
/// coefficients 1, 2, 1/2, 1/2).
template <class Objective>
NelderMeadResult nelder_mead(Objective&& f, const Vector& start, const NelderMeadOptions& opt = {}) {
    const Eigen::Index d = start.size();
    const std::size_t m = static_cast<std::size_t>(d) + 1;
    std::vector<Vector> pts(m, start);
    std::vector<double> vals(m);
    int evals = 0;
    auto eval = [&](const Vector& p) {
        ++evals;
        return f(p);
    };

    for (Eigen::Index j = 0; j < d; ++j) pts[static_cast<std::size_t>(j) + 1][j] += opt.initial_step;
    for (std::size_t i = 0; i < m; ++i) vals[i] = eval(pts[i]);

    std::vector<std::size_t> order(m);
    auto diameter = [&] {
        double best = 0.0;
        for (std::size_t i = 1; i < m; ++i) best = std::max(best, (pts[i] - pts[0]).lpNorm<Eigen::Infinity>());
        return best;
    };

    bool converged = false;
    while (evals < opt.max_evals) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        {
            std::vector<Vector> p2(m);
            std::vector<double> v2(m);
            for (std::size_t i = 0; i < m; ++i) {
                p2[i] = pts[order[i]];
                v2[i] = vals[order[i]];
            }
            pts.swap(p2);
            vals.swap(v2);
        }
        if (diameter() < opt.simplex_tolerance) {
            converged = true;
            break;
        }

        Vector centroid = Vector::Zero(d);
        for (std::size_t i = 0; i + 1 < m; ++i) centroid += pts[i];
        centroid /= static_cast<double>(m - 1);
        const Vector& worst = pts[m - 1];

        const Vector reflected = centroid + (centroid - worst);
        const double fr = eval(reflected);
        if (fr < vals[0]) {
            const Vector expanded = centroid + 2.0 * (centroid - worst);
            const double fe = eval(expanded);
            if (fe < fr) {
                pts[m - 1] = expanded;
                vals[m - 1] = fe;
            } else {
                pts[m - 1] = reflected;
                vals[m - 1] = fr;
            }
            continue;
        }
        if (fr < vals[m - 2]) {
            pts[m - 1] = reflected;
            vals[m - 1] = fr;
            continue;
        }
        const bool outside = fr < vals[m - 1];
        const Vector contracted = outside ? Vector(centroid + 0.5 * (reflected - centroid))
                                          : Vector(centroid + 0.5 * (worst - centroid));
        const double fc = eval(contracted);
        if (fc < (outside ? fr : vals[m - 1])) {
            pts[m - 1] = contracted;
            vals[m - 1] = fc;
            continue;
        }
        for (std::size_t i = 1; i < m; ++i) {
            pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
            vals[i] = eval(pts[i]);
        }
    }

    const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    return {pts[best], vals[best], evals, converged};
}

}  // namespace spheredepth
