#pragma once

// Quality index and depth-based homogeneity test, rank correlations, AUROC.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "spheredepth/error.hpp"
#include "spheredepth/sample_set.hpp"

namespace spheredepth {

struct QualityIndexResult {
    double q = 0.0;
    std::size_t n = 0;
    std::size_t m = 0;
    double z_stat = 0.0;
    double p_value = 1.0;
    std::uint64_t tie_pairs = 0;
};

/// Two-sided standard normal tail P(|N(0,1)| >= |z|).
inline double two_sided_normal_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

/// (q - 1/2) / sqrt((1/12)(1/n + 1/m)).
inline double quality_z_stat(double q, std::size_t n, std::size_t m) {
    const double sd = std::sqrt((1.0 / 12.0) * (1.0 / static_cast<double>(n) + 1.0 / static_cast<double>(m)));
    return (q - 0.5) / sd;
}

/// Fraction of pairs (i, j) with depths_f[i] <= depths_g[j]; equal pairs count and are reported.
inline QualityIndexResult quality_index(std::span<const double> depths_f, std::span<const double> depths_g) {
    detail::require(!depths_f.empty() && !depths_g.empty(), "quality_index requires nonempty depth lists");
    std::vector<double> sorted_g(depths_g.begin(), depths_g.end());
    std::sort(sorted_g.begin(), sorted_g.end());
    std::uint64_t satisfied = 0;
    std::uint64_t ties = 0;
    for (double f : depths_f) {
        const auto [lo, hi] = std::equal_range(sorted_g.begin(), sorted_g.end(), f);
        satisfied += static_cast<std::uint64_t>(sorted_g.end() - lo);
        ties += static_cast<std::uint64_t>(hi - lo);
    }
    QualityIndexResult out;
    out.n = depths_f.size();
    out.m = depths_g.size();
    out.q = static_cast<double>(satisfied) / (static_cast<double>(out.n) * static_cast<double>(out.m));
    out.tie_pairs = ties;
    out.z_stat = quality_z_stat(out.q, out.n, out.m);
    out.p_value = two_sided_normal_p(out.z_stat);
    return out;
}

struct HomogeneityTestResult {
    QualityIndexResult quality;
    bool reject = false;
};

/// Quality-index test of F = G. `depth_fn(points)` must return depths of the rows of `points`
/// under the empirical distribution of x.
template <class DepthFn>
HomogeneityTestResult homogeneity_test(const SampleSet& x, const SampleSet& y, DepthFn&& depth_fn, double level) {
    detail::require(level > 0.0 && level < 1.0, "test level must lie in (0, 1)");
    detail::require_dim(static_cast<std::size_t>(x.dim()), static_cast<std::size_t>(y.dim()));
    const std::vector<double> df = depth_fn(x);
    const std::vector<double> dg = depth_fn(y);
    HomogeneityTestResult out;
    out.quality = quality_index(df, dg);
    out.reject = out.quality.p_value < level;
    return out;
}

/// 1-based ranks with ties assigned their average rank.
inline std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

inline double pearson(std::span<const double> a, std::span<const double> b) {
    detail::require(a.size() == b.size(), "pearson: length mismatch");
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) throw InvalidParameter("correlation undefined for constant input");
    return sab / std::sqrt(saa * sbb);
}

namespace detail {

inline void check_rank_inputs(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), "rank correlation: length mismatch");
    require(a.size() >= 2, "rank correlation requires at least 2 observations");
}

}  // namespace detail

/// Pearson correlation of average ranks.
inline double spearman(std::span<const double> a, std::span<const double> b) {
    detail::check_rank_inputs(a, b);
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    return std::clamp(pearson(ra, rb), -1.0, 1.0);
}

namespace detail {

// Number of adjacent swaps needed to sort v (merge sort), i.e. its inversion count.
inline std::uint64_t count_inversions(std::vector<double>& v) {
    std::vector<double> buf(v.size());
    std::uint64_t swaps = 0;
    for (std::size_t width = 1; width < v.size(); width *= 2) {
        for (std::size_t lo = 0; lo < v.size(); lo += 2 * width) {
            const std::size_t mid = std::min(lo + width, v.size());
            const std::size_t hi = std::min(lo + 2 * width, v.size());
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (v[j] < v[i]) {
                    swaps += mid - i;
                    buf[k++] = v[j++];
                } else {
                    buf[k++] = v[i++];
                }
            }
            while (i < mid) buf[k++] = v[i++];
            while (j < hi) buf[k++] = v[j++];
        }
        v.swap(buf);
    }
    return swaps;
}

// Sum over tie groups of t(t-1)/2 for already sorted data.
template <class Eq>
std::uint64_t tied_pairs(std::size_t count, Eq&& equal_to_prev) {
    std::uint64_t total = 0;
    std::uint64_t run = 1;
    for (std::size_t i = 1; i < count; ++i) {
        if (equal_to_prev(i)) {
            ++run;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    return total + run * (run - 1) / 2;
}

}  // namespace detail

/// Kendall tau-b, O(n log n) (Knight's algorithm).
inline double kendall_tau(std::span<const double> a, std::span<const double> b) {
    detail::check_rank_inputs(a, b);
    const std::size_t n = a.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
        return a[i] != a[j] ? a[i] < a[j] : b[i] < b[j];
    });

    const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    const std::uint64_t ties_a = detail::tied_pairs(n, [&](std::size_t i) { return a[idx[i]] == a[idx[i - 1]]; });
    const std::uint64_t ties_ab = detail::tied_pairs(
        n, [&](std::size_t i) { return a[idx[i]] == a[idx[i - 1]] && b[idx[i]] == b[idx[i - 1]]; });

    std::vector<double> bs(n);
    for (std::size_t i = 0; i < n; ++i) bs[i] = b[idx[i]];
    const std::uint64_t swaps = detail::count_inversions(bs);
    const std::uint64_t ties_b = detail::tied_pairs(n, [&](std::size_t i) { return bs[i] == bs[i - 1]; });

    if (ties_a == n0 || ties_b == n0) throw InvalidParameter("correlation undefined for constant input");
    // concordant - discordant
    const double numer = static_cast<double>(n0) - static_cast<double>(ties_a) - static_cast<double>(ties_b) +
                         static_cast<double>(ties_ab) - 2.0 * static_cast<double>(swaps);
    const double denom = std::sqrt(static_cast<double>(n0 - ties_a) * static_cast<double>(n0 - ties_b));
    return std::clamp(numer / denom, -1.0, 1.0);
}

struct RankCorrelationResult {
    double spearman = 0.0;
    double kendall_tau = 0.0;
};

inline RankCorrelationResult rank_correlations(std::span<const double> a, std::span<const double> b) {
    return {spearman(a, b), kendall_tau(a, b)};
}

struct RocResult {
    double auroc = 0.5;
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

/// Tie-averaged Mann-Whitney AUROC: P(score_pos > score_neg) + 0.5 P(score_pos = score_neg).
inline RocResult auroc(std::span<const double> scores, std::span<const int> labels) {
    detail::require(scores.size() == labels.size(), "auroc: scores and labels differ in length");
    RocResult out;
    for (int l : labels) {
        detail::require(l == 0 || l == 1, "auroc: labels must be 0 or 1");
        (l == 1 ? out.positives : out.negatives) += 1;
    }
    detail::require(out.positives > 0 && out.negatives > 0, "auroc requires both positive and negative labels");
    const auto ranks = average_ranks(scores);
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < ranks.size(); ++i)
        if (labels[i] == 1) rank_sum += ranks[i];
    const double p = static_cast<double>(out.positives);
    out.auroc = (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(out.negatives));
    return out;
}

}  // namespace spheredepth
