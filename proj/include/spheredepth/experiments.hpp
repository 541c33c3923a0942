#pragma once

// Experiment runners behind the CLI subcommands. Each returns an ExperimentReport whose
// parameters block is enough to replay the run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "spheredepth/baseline_depths.hpp"
#include "spheredepth/data_lab.hpp"
#include "spheredepth/depth_core.hpp"
#include "spheredepth/io.hpp"
#include "spheredepth/parallel.hpp"
#include "spheredepth/sphere_optim.hpp"
#include "spheredepth/stats_tests.hpp"

namespace spheredepth {

enum class Method { Sphere, Halfspace, Mahalanobis, KSpatial, OracleGrid };

inline std::string_view to_string(Method m) {
    switch (m) {
        case Method::Sphere: return "sphere";
        case Method::Halfspace: return "halfspace";
        case Method::Mahalanobis: return "mahalanobis";
        case Method::KSpatial: return "kspatial";
        case Method::OracleGrid: return "oracle-grid";
    }
    return "unknown";
}

inline Method parse_method(std::string_view s) {
    if (s == "sphere") return Method::Sphere;
    if (s == "halfspace") return Method::Halfspace;
    if (s == "mahalanobis") return Method::Mahalanobis;
    if (s == "kspatial") return Method::KSpatial;
    if (s == "oracle-grid") return Method::OracleGrid;
    throw InvalidParameter("unknown method: " + std::string(s));
}

struct MethodOptions {
    DepthParams params{1.0, 1.0};
    OptimizerConfig optim;
    HalfspaceConfig halfspace;
    KernelConfig kernel;
    double regularization = 0.0;
    std::size_t grid_size = 4096;
    std::uint64_t grid_seed = 0;
    unsigned threads = 1;
};

inline nlohmann::ordered_json to_json(const MethodOptions& o) {
    nlohmann::ordered_json j;
    j["r"] = o.params.r;
    j["s"] = o.params.s;
    j["optimizer"] = {{"tol", o.optim.tol},
                      {"alpha0", o.optim.alpha0},
                      {"max_iter", o.optim.max_iter},
                      {"init", std::string(to_string(o.optim.init))},
                      {"revert_on_increase", o.optim.revert_on_increase},
                      {"seed", o.optim.seed}};
    j["halfspace"] = {{"restarts", o.halfspace.restarts},
                      {"seed", o.halfspace.seed},
                      {"simplex_tolerance", o.halfspace.simplex_tolerance},
                      {"max_evals", o.halfspace.max_evals}};
    j["kernel_h"] = o.kernel.bandwidth_h;
    j["kspatial_note"] = "Gaussian-kernel spatial depth used as the localized spatial depth stand-in";
    j["regularization"] = o.regularization;
    j["grid_size"] = o.grid_size;
    j["grid_seed"] = o.grid_seed;
    return j;
}

/// Depth of every row of `points` with respect to the reference sample.
inline std::vector<double> score_depths(Method method, const SampleSet& reference, const Matrix& points,
                                        const MethodOptions& opt) {
    detail::require_dim(static_cast<std::size_t>(reference.dim()), static_cast<std::size_t>(points.cols()));
    const std::size_t count = static_cast<std::size_t>(points.rows());
    std::vector<double> out(count);
    auto point = [&](std::size_t i) -> Vector { return points.row(static_cast<Eigen::Index>(i)).transpose(); };
    switch (method) {
        case Method::Sphere: {
            if (opt.params.s == 0.0)
                throw InvalidParameter("the sphere solver needs s > 0; use method oracle-grid for s = 0");
            const auto res = batch_depth(points, reference, opt.params, opt.optim, opt.threads);
            for (std::size_t i = 0; i < count; ++i) out[i] = res[i].value;
            break;
        }
        case Method::Halfspace:
            parallel_for(count, opt.threads, [&](std::size_t i) { out[i] = halfspace_depth(point(i), reference, opt.halfspace).value; });
            break;
        case Method::Mahalanobis: {
            const auto model = fit_mahalanobis(reference, opt.regularization);
            for (std::size_t i = 0; i < count; ++i) out[i] = mahalanobis_depth(point(i), model);
            break;
        }
        case Method::KSpatial: {
            const KernelSpatialDepth ksd(reference, opt.kernel);
            parallel_for(count, opt.threads, [&](std::size_t i) { out[i] = ksd.depth(point(i)); });
            break;
        }
        case Method::OracleGrid: {
            const auto grid = DirectionGrid::make(reference.dim(), opt.grid_size, opt.grid_seed);
            parallel_for(count, opt.threads,
                         [&](std::size_t i) { out[i] = grid_oracle_sphere_depth(point(i), reference, opt.params, grid).value; });
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// depth

struct DepthRun {
    Method method = Method::Sphere;
    MethodOptions options;
    std::size_t oracle_check = 0;  ///< grid size for the oracle comparison; 0 disables it
    std::uint64_t seed = 0;
};

/// Scores `queries` (or the sample itself when absent) and optionally compares with the grid oracle.
inline ExperimentReport run_depth(const SampleSet& data, const std::optional<Matrix>& queries, const DepthRun& run,
                                  nlohmann::ordered_json data_description = {}) {
    const Matrix& points = queries ? *queries : data.matrix();
    ExperimentReport rep;
    rep.command = "depth";
    rep.parameters["data"] = std::move(data_description);
    rep.parameters["n"] = data.size();
    rep.parameters["d"] = data.dim();
    rep.parameters["self_score"] = !queries.has_value();
    rep.parameters["method"] = std::string(to_string(run.method));
    rep.parameters["options"] = to_json(run.options);
    rep.parameters["oracle_check"] = run.oracle_check;
    rep.provenance = default_provenance(run.seed);

    const auto depths = score_depths(run.method, data, points, run.options);
    rep.metrics["depths"] = depths;
    if (run.oracle_check > 0) {
        MethodOptions oracle_opt = run.options;
        oracle_opt.grid_size = run.oracle_check;
        const auto oracle = score_depths(Method::OracleGrid, data, points, oracle_opt);
        double gap = 0.0;
        for (std::size_t i = 0; i < depths.size(); ++i) gap = std::max(gap, std::abs(depths[i] - oracle[i]));
        rep.metrics["oracle_depths"] = oracle;
        rep.metrics["max_abs_gap"] = gap;
    }
    return rep;
}

// ---------------------------------------------------------------------------------------------
// contour

struct ContourGrid {
    double x_min = -1.0, x_max = 1.0;
    double y_min = -1.0, y_max = 1.0;
    std::size_t nx = 50, ny = 50;

    std::vector<double> xs() const { return axis(x_min, x_max, nx); }
    std::vector<double> ys() const { return axis(y_min, y_max, ny); }

private:
    static std::vector<double> axis(double lo, double hi, std::size_t count) {
        detail::require(count >= 1, "contour resolution must be >= 1");
        std::vector<double> v(count);
        for (std::size_t i = 0; i < count; ++i)
            v[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
        return v;
    }
};

struct ContourResult {
    std::vector<double> xs;
    std::vector<double> ys;
    Matrix values;  ///< values(j, i) = depth at (xs[i], ys[j])

    /// Row-major grid: header "y\x,x_0,...,x_{nx-1}", then one line per y value.
    std::string to_csv() const {
        std::string out = "y\\x";
        for (double x : xs) out += "," + format_real(x);
        out += '\n';
        for (std::size_t j = 0; j < ys.size(); ++j) {
            out += format_real(ys[j]);
            for (std::size_t i = 0; i < xs.size(); ++i)
                out += "," + format_real(values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
            out += '\n';
        }
        return out;
    }
};

inline ContourResult run_contour(const SampleSet& data, const ContourGrid& grid, Method method,
                                 const MethodOptions& opt) {
    if (data.dim() != 2) throw InvalidParameter("contour requires 2-dimensional data");
    ContourResult res{grid.xs(), grid.ys(), Matrix()};
    Matrix pts(static_cast<Eigen::Index>(res.xs.size() * res.ys.size()), 2);
    Eigen::Index k = 0;
    for (double y : res.ys)
        for (double x : res.xs) pts.row(k++) << x, y;
    const auto depths = score_depths(method, data, pts, opt);
    res.values.resize(static_cast<Eigen::Index>(res.ys.size()), static_cast<Eigen::Index>(res.xs.size()));
    for (Eigen::Index j = 0; j < res.values.rows(); ++j)
        for (Eigen::Index i = 0; i < res.values.cols(); ++i)
            res.values(j, i) = depths[static_cast<std::size_t>(j * res.values.cols() + i)];
    return res;
}

inline ExperimentReport contour_report(const ContourResult& res, const ContourGrid& grid, Method method,
                                       const MethodOptions& opt, std::uint64_t seed,
                                       nlohmann::ordered_json data_description = {}) {
    ExperimentReport rep;
    rep.command = "contour";
    rep.parameters["data"] = std::move(data_description);
    rep.parameters["method"] = std::string(to_string(method));
    rep.parameters["options"] = to_json(opt);
    rep.parameters["grid"] = {{"x_min", grid.x_min}, {"x_max", grid.x_max}, {"nx", grid.nx},
                              {"y_min", grid.y_min}, {"y_max", grid.y_max}, {"ny", grid.ny}};
    rep.metrics["xs"] = res.xs;
    rep.metrics["ys"] = res.ys;
    std::vector<std::vector<double>> rows;
    for (Eigen::Index j = 0; j < res.values.rows(); ++j) {
        rows.emplace_back(res.values.cols());
        for (Eigen::Index i = 0; i < res.values.cols(); ++i) rows.back()[static_cast<std::size_t>(i)] = res.values(j, i);
    }
    rep.metrics["values"] = rows;
    rep.provenance = default_provenance(seed);
    return rep;
}

// ---------------------------------------------------------------------------------------------
// rankbench

struct RankbenchOptions {
    std::vector<Eigen::Index> dims{2};
    std::size_t n = 200;
    std::size_t runs = 20;
    std::uint64_t seed = 0;
    double mode_offset = 3.5;
    MethodOptions options;  ///< params (r, s) and kernel h are read from here
};

namespace detail {

inline nlohmann::ordered_json summarize(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return {{"mean", mean}, {"std", sd}, {"runs", v}};
}

}  // namespace detail

/// Self-scores bi-Gaussian samples with the sphere depth and the kernel spatial depth and
/// correlates each ranking with the true density.
inline ExperimentReport run_rankbench(const RankbenchOptions& opt) {
    detail::require(opt.runs >= 1 && opt.n >= 2, "rankbench needs runs >= 1 and n >= 2");
    ExperimentReport rep;
    rep.command = "rankbench";
    rep.parameters["dims"] = opt.dims;
    rep.parameters["n"] = opt.n;
    rep.parameters["runs"] = opt.runs;
    rep.parameters["seed"] = opt.seed;
    rep.parameters["mode_offset"] = opt.mode_offset;
    rep.parameters["options"] = to_json(opt.options);
    rep.provenance = default_provenance(opt.seed);

    nlohmann::ordered_json per_dim = nlohmann::ordered_json::object();
    for (const Eigen::Index d : opt.dims) {
        detail::require(d >= 1, "dimensions must be >= 1");
        const MixtureSpec spec = bi_gaussian_spec(d, opt.mode_offset);
        std::vector<double> sp_sd, sp_ksd, sp_true, kt_sd, kt_ksd, kt_true;
        for (std::size_t run = 0; run < opt.runs; ++run) {
            const SampleSet x = gen_mixture(spec, opt.n, derive_seed(opt.seed, static_cast<std::uint64_t>(d), run));
            const auto density = mixture_density(x.matrix(), spec);
            const auto sd = score_depths(Method::Sphere, x, x.matrix(), opt.options);
            const auto ksd = score_depths(Method::KSpatial, x, x.matrix(), opt.options);
            sp_sd.push_back(spearman(sd, density));
            sp_ksd.push_back(spearman(ksd, density));
            sp_true.push_back(spearman(density, density));
            kt_sd.push_back(kendall_tau(sd, density));
            kt_ksd.push_back(kendall_tau(ksd, density));
            kt_true.push_back(kendall_tau(density, density));
        }
        nlohmann::ordered_json entry;
        entry["sphere"] = {{"spearman", detail::summarize(sp_sd)}, {"kendall_tau", detail::summarize(kt_sd)}};
        entry["kspatial"] = {{"spearman", detail::summarize(sp_ksd)}, {"kendall_tau", detail::summarize(kt_ksd)}};
        entry["true-density"] = {{"spearman", detail::summarize(sp_true)}, {"kendall_tau", detail::summarize(kt_true)}};
        per_dim[std::to_string(d)] = std::move(entry);
    }
    rep.metrics["by_dimension"] = std::move(per_dim);
    return rep;
}

// ---------------------------------------------------------------------------------------------
// htest

enum class HtestSetting {
    NullGaussian,  ///< both samples from the same truncated standard Gaussian
    Student,       ///< t(2, I) against t(3, I + 0.6 antidiag), both truncated at norm 10000
};

inline std::string_view to_string(HtestSetting s) {
    return s == HtestSetting::NullGaussian ? "null-gaussian" : "student";
}

inline HtestSetting parse_htest_setting(std::string_view s) {
    if (s == "null-gaussian") return HtestSetting::NullGaussian;
    if (s == "student") return HtestSetting::Student;
    throw InvalidParameter("unknown htest setting: " + std::string(s));
}

struct HtestOptions {
    HtestSetting setting = HtestSetting::NullGaussian;
    Eigen::Index dim = 2;
    std::vector<std::size_t> sizes{200};  ///< n = m per entry
    std::size_t reps = 100;
    double level = 0.05;
    double truncation_norm = 10000.0;
    std::vector<Method> methods{Method::Sphere, Method::Mahalanobis};
    std::uint64_t seed = 0;
    MethodOptions options;
};

/// Draws of the two sources for one replication.
inline std::pair<SampleSet, SampleSet> htest_draw(const HtestOptions& opt, std::size_t n, std::size_t m,
                                                  std::uint64_t seed) {
    const std::uint64_t sx = derive_seed(seed, 0), sy = derive_seed(seed, 1);
    if (opt.setting == HtestSetting::NullGaussian) {
        const auto spec = standard_gaussian_spec(opt.dim, opt.truncation_norm);
        return {gen_mixture(spec, n, sx), gen_mixture(spec, m, sy)};
    }
    detail::require(opt.dim == 2, "the student setting is two-dimensional");
    const StudentSpec f{2.0, Vector::Zero(2), Eigen::MatrixXd::Identity(2, 2), opt.truncation_norm};
    Eigen::MatrixXd scale(2, 2);
    scale << 1.0, 0.6, 0.6, 1.0;
    const StudentSpec g{3.0, Vector::Zero(2), scale, opt.truncation_norm};
    return {gen_student_t(f, n, sx), gen_student_t(g, m, sy)};
}

struct HtestCell {
    std::vector<double> z_fg, z_gf;
    std::size_t reject_fg = 0, reject_gf = 0;
    std::uint64_t tie_pairs = 0;
};

/// Monte-Carlo size/power of the quality-index test, both orderings Q(F,G) and Q(G,F).
inline ExperimentReport run_htest(const HtestOptions& opt) {
    detail::require(opt.reps >= 1, "repetitions must be >= 1");
    detail::require(!opt.sizes.empty(), "htest needs at least one sample size");
    ExperimentReport rep;
    rep.command = "htest";
    rep.parameters["setting"] = std::string(to_string(opt.setting));
    rep.parameters["dim"] = opt.dim;
    rep.parameters["sizes"] = opt.sizes;
    rep.parameters["reps"] = opt.reps;
    rep.parameters["level"] = opt.level;
    rep.parameters["truncation_norm"] = opt.truncation_norm;
    std::vector<std::string> names;
    for (Method m : opt.methods) names.emplace_back(to_string(m));
    rep.parameters["methods"] = names;
    rep.parameters["seed"] = opt.seed;
    rep.parameters["options"] = to_json(opt.options);
    rep.provenance = default_provenance(opt.seed);

    nlohmann::ordered_json by_size = nlohmann::ordered_json::object();
    for (const std::size_t n : opt.sizes) {
        std::vector<HtestCell> cells(opt.methods.size());
        for (std::size_t r = 0; r < opt.reps; ++r) {
            const auto [x, y] = htest_draw(opt, n, n, derive_seed(opt.seed, n, r));
            for (std::size_t k = 0; k < opt.methods.size(); ++k) {
                const Method method = opt.methods[k];
                auto fit_x = [&](const SampleSet& pts) { return score_depths(method, x, pts.matrix(), opt.options); };
                auto fit_y = [&](const SampleSet& pts) { return score_depths(method, y, pts.matrix(), opt.options); };
                const auto fg = homogeneity_test(x, y, fit_x, opt.level);
                const auto gf = homogeneity_test(y, x, fit_y, opt.level);
                cells[k].z_fg.push_back(fg.quality.z_stat);
                cells[k].z_gf.push_back(gf.quality.z_stat);
                cells[k].reject_fg += fg.reject;
                cells[k].reject_gf += gf.reject;
                cells[k].tie_pairs += fg.quality.tie_pairs + gf.quality.tie_pairs;
            }
        }
        nlohmann::ordered_json entry;
        const double reps = static_cast<double>(opt.reps);
        for (std::size_t k = 0; k < opt.methods.size(); ++k) {
            auto ordering = [&](std::size_t rejects, const std::vector<double>& z) {
                const double rate = static_cast<double>(rejects) / reps;
                return nlohmann::ordered_json{{"rejection_rate", rate},
                                              {"mc_standard_error", std::sqrt(rate * (1.0 - rate) / reps)},
                                              {"z_stats", z}};
            };
            entry[names[k]] = {{"Q(F,G)", ordering(cells[k].reject_fg, cells[k].z_fg)},
                               {"Q(G,F)", ordering(cells[k].reject_gf, cells[k].z_gf)},
                               {"tie_pairs", cells[k].tie_pairs}};
        }
        by_size[std::to_string(n)] = std::move(entry);
    }
    rep.metrics["by_size"] = std::move(by_size);
    return rep;
}

// ---------------------------------------------------------------------------------------------
// anomaly

struct AnomalyOptions {
    std::vector<Method> methods{Method::Sphere};
    std::optional<double> r;  ///< defaults to the pooled standard deviation
    std::optional<double> s;  ///< defaults to pooled standard deviation times d
    bool standardize = false;
    MethodOptions options;
    std::uint64_t seed = 0;
};

/// Scores each row by 1 - depth against the full dataset and reports AUROC per method.
inline ExperimentReport run_anomaly(const LabeledDataset& data, const AnomalyOptions& opt) {
    SampleSet x = data.samples;
    if (opt.standardize) x = standardize(x).first;
    const double pooled = standardization_stats(x).pooled_std;
    const double d = static_cast<double>(x.dim());
    MethodOptions mo = opt.options;
    mo.params = DepthParams(opt.r.value_or(pooled), opt.s.value_or(pooled * d));

    ExperimentReport rep;
    rep.command = "anomaly";
    rep.parameters["dataset"] = data.name;
    rep.parameters["n"] = x.size();
    rep.parameters["d"] = x.dim();
    rep.parameters["standardize"] = opt.standardize;
    rep.parameters["pooled_std"] = pooled;
    rep.parameters["pooled_std_note"] = "sqrt of the mean per-dimension unbiased variance, computed on the ingested features";
    rep.parameters["r_source"] = opt.r ? "override" : "pooled_std";
    rep.parameters["s_source"] = opt.s ? "override" : "pooled_std * d";
    std::vector<std::string> names;
    for (Method m : opt.methods) names.emplace_back(to_string(m));
    rep.parameters["methods"] = names;
    rep.parameters["options"] = to_json(mo);
    rep.provenance = default_provenance(opt.seed);

    nlohmann::ordered_json per_method = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < opt.methods.size(); ++k) {
        const auto depths = score_depths(opt.methods[k], x, x.matrix(), mo);
        std::vector<double> scores(depths.size());
        for (std::size_t i = 0; i < depths.size(); ++i) scores[i] = 1.0 - depths[i];
        const RocResult roc = auroc(scores, data.labels);
        per_method[names[k]] = {{"auroc", roc.auroc},
                                {"positives", roc.positives},
                                {"negatives", roc.negatives},
                                {"scores", scores}};
    }
    rep.metrics["by_method"] = std::move(per_method);
    return rep;
}

// ---------------------------------------------------------------------------------------------
// speedbench

struct SpeedbenchOptions {
    std::vector<std::size_t> sizes{1000, 10000, 100000};
    Eigen::Index dim = 3;
    double query_coordinate = 10.0;
    std::vector<Method> methods{Method::Sphere, Method::Halfspace};
    std::size_t repeats = 3;
    std::uint64_t seed = 0;
    MethodOptions options;
};

/// Median-of-`repeats` wall time of one depth evaluation of z = (10, ..., 10) against a standard
/// Gaussian sample, per method and sample size.
inline ExperimentReport run_speedbench(const SpeedbenchOptions& opt) {
    detail::require(!opt.sizes.empty(), "speedbench needs at least one size");
    detail::require(std::is_sorted(opt.sizes.begin(), opt.sizes.end()), "speedbench sizes must be non-decreasing");
    detail::require(opt.repeats >= 1, "repeats must be >= 1");
    ExperimentReport rep;
    rep.command = "speedbench";
    rep.parameters["sizes"] = opt.sizes;
    rep.parameters["dim"] = opt.dim;
    rep.parameters["query_coordinate"] = opt.query_coordinate;
    std::vector<std::string> names;
    for (Method m : opt.methods) names.emplace_back(to_string(m));
    rep.parameters["methods"] = names;
    rep.parameters["repeats"] = opt.repeats;
    rep.parameters["seed"] = opt.seed;
    rep.parameters["options"] = to_json(opt.options);
    rep.provenance = default_provenance(opt.seed);

    const Vector z = Vector::Constant(opt.dim, opt.query_coordinate);
    Matrix zq = z.transpose();
    nlohmann::ordered_json times = nlohmann::ordered_json::object();
    nlohmann::ordered_json values = nlohmann::ordered_json::object();
    std::vector<std::vector<double>> medians(opt.methods.size());
    for (std::size_t k = 0; k < opt.methods.size(); ++k) {
        nlohmann::ordered_json t = nlohmann::ordered_json::object(), v = nlohmann::ordered_json::object();
        for (const std::size_t n : opt.sizes) {
            const SampleSet x = gen_mixture(standard_gaussian_spec(opt.dim), n, derive_seed(opt.seed, n));
            std::vector<double> samples;
            double depth = 0.0;
            for (std::size_t rpt = 0; rpt < opt.repeats; ++rpt) {
                const auto t0 = std::chrono::steady_clock::now();
                depth = score_depths(opt.methods[k], x, zq, opt.options).front();
                samples.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
            }
            std::sort(samples.begin(), samples.end());
            const double median = samples[samples.size() / 2];
            medians[k].push_back(median);
            t[std::to_string(n)] = median;
            v[std::to_string(n)] = depth;
        }
        times[names[k]] = std::move(t);
        values[names[k]] = std::move(v);
    }
    rep.metrics["median_seconds"] = std::move(times);
    rep.metrics["depth"] = std::move(values);

    // ratio of every method's time to the first method's, per n
    nlohmann::ordered_json ratios = nlohmann::ordered_json::object();
    for (std::size_t k = 1; k < opt.methods.size(); ++k) {
        nlohmann::ordered_json r = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < opt.sizes.size(); ++i)
            r[std::to_string(opt.sizes[i])] = medians[k][i] / std::max(medians[0][i], 1e-12);
        ratios[names[k] + "/" + names[0]] = std::move(r);
    }
    rep.metrics["time_ratios"] = std::move(ratios);
    return rep;
}

}  // namespace spheredepth
