#include <cmath>

#include <gtest/gtest.h>

#include "spheredepth/experiments.hpp"
#include "test_support.hpp"

namespace sd = spheredepth;

TEST(ScoreDepths, MethodsAndErrors) {
    const sd::SampleSet one((sd::Vector(2) << 1.0, -1.0).finished().transpose());
    sd::MethodOptions opt;
    EXPECT_NEAR(sd::score_depths(sd::Method::Sphere, one, one.matrix(), opt).front(), 0.5, 1e-12);

    opt.params = sd::DepthParams(0.4, 0.0);
    const auto cross = sd::testing::four_point_cross();
    const sd::Matrix origin = sd::Matrix::Zero(1, 2);
    EXPECT_EQ(sd::score_depths(sd::Method::OracleGrid, cross, origin, opt).front(), 0.0);
    try {
        sd::score_depths(sd::Method::Sphere, cross, origin, opt);
        FAIL() << "expected an error for s = 0";
    } catch (const sd::InvalidParameter& e) {
        EXPECT_NE(std::string(e.what()).find("oracle-grid"), std::string::npos);
    }
    EXPECT_EQ(sd::parse_method("kspatial"), sd::Method::KSpatial);
    EXPECT_EQ(sd::to_string(sd::Method::OracleGrid), "oracle-grid");
    EXPECT_THROW(sd::parse_method("lof"), sd::InvalidParameter);
}

TEST(RunDepth, OracleCheckGap) {
    const auto x = sd::gen_mixture(sd::standard_gaussian_spec(2), 300, 4);
    sd::Rng rng(4);
    const sd::Matrix queries = sd::testing::random_matrix(rng, 5, 2);
    sd::DepthRun run;
    run.oracle_check = 4096;
    const auto rep = sd::run_depth(x, queries, run);
    EXPECT_LE(rep.metrics["max_abs_gap"].get<double>(), 5e-3);
    EXPECT_EQ(rep.metrics["depths"].size(), 5u);
    EXPECT_EQ(rep.metrics["oracle_depths"].size(), 5u);
    EXPECT_FALSE(rep.parameters["self_score"].get<bool>());
    EXPECT_EQ(rep.to_json().dump(), sd::run_depth(x, queries, run).to_json().dump());
}

TEST(RunContour, SmallGridAndDimensionCheck) {
    const auto x = sd::gen_mixture(sd::standard_gaussian_spec(2), 100, 1);
    sd::ContourGrid grid{-1, 1, -1, 1, 2, 2};
    const auto res = sd::run_contour(x, grid, sd::Method::Sphere, {});
    EXPECT_EQ(res.values.size(), 4);
    EXPECT_TRUE((res.values.array() >= 0.0).all() && (res.values.array() <= 1.0).all());
    const auto x3 = sd::gen_mixture(sd::standard_gaussian_spec(3), 10, 1);
    EXPECT_THROW(sd::run_contour(x3, grid, sd::Method::Sphere, {}), sd::InvalidParameter);
}

TEST(RunContour, ModesDeeperThanSaddleAndDeterministic) {
    const auto x = sd::gen_mixture(sd::bi_gaussian_spec(2), 400, 10);
    // grid with nodes exactly at (-3.5, -3.5), (0, 0) and (3.5, 3.5)
    sd::ContourGrid grid{-7, 7, -7, 7, 5, 5};
    const auto res = sd::run_contour(x, grid, sd::Method::Sphere, {});
    ASSERT_EQ(res.xs[1], -3.5);
    ASSERT_EQ(res.xs[2], 0.0);
    ASSERT_EQ(res.xs[3], 3.5);
    const double saddle = res.values(2, 2);
    EXPECT_GT(res.values(1, 1), saddle);
    EXPECT_GT(res.values(3, 3), saddle);
    const auto again = sd::run_contour(x, grid, sd::Method::Sphere, {});
    EXPECT_EQ(res.to_csv(), again.to_csv());
    EXPECT_EQ(res.to_csv().substr(0, 4), "y\\x,");
}

TEST(RunRankbench, TrueDensityAndDeterminism) {
    sd::RankbenchOptions opt;
    opt.dims = {2};
    opt.n = 60;
    opt.runs = 2;
    opt.seed = 5;
    const auto rep = sd::run_rankbench(opt);
    const auto& entry = rep.metrics["by_dimension"]["2"];
    for (const auto& v : entry["true-density"]["spearman"]["runs"]) EXPECT_EQ(v.get<double>(), 1.0);
    EXPECT_GE(entry["sphere"]["spearman"]["mean"].get<double>(), -1.0);
    EXPECT_EQ(rep.dump(), sd::run_rankbench(opt).dump());
}

TEST(RunRankbench, SphereRankingVersusOracleDepth) {
    // one run: the solver ranking and the 4096-direction oracle ranking agree closely
    const auto spec = sd::bi_gaussian_spec(2);
    const auto x = sd::gen_mixture(spec, 200, sd::derive_seed(0, 2, 0));
    sd::MethodOptions opt;
    const auto solver = sd::score_depths(sd::Method::Sphere, x, x.matrix(), opt);
    const auto oracle = sd::score_depths(sd::Method::OracleGrid, x, x.matrix(), opt);
    const auto density = sd::mixture_density(x.matrix(), spec);
    EXPECT_GE(sd::spearman(solver, oracle), 0.99);
    EXPECT_NEAR(sd::spearman(solver, density), sd::spearman(oracle, density), 0.02);
}

TEST(RunHtest, ZStatsReproducible) {
    sd::HtestOptions opt;
    opt.sizes = {30};
    opt.reps = 3;
    opt.seed = 9;
    const auto a = sd::run_htest(opt);
    const auto b = sd::run_htest(opt);
    EXPECT_EQ(a.dump(), b.dump());
    const auto& cell = a.metrics["by_size"]["30"]["sphere"];
    EXPECT_EQ(cell["Q(F,G)"]["z_stats"].size(), 3u);
    const double rate = cell["Q(F,G)"]["rejection_rate"].get<double>();
    EXPECT_NEAR(cell["Q(F,G)"]["mc_standard_error"].get<double>(), std::sqrt(rate * (1 - rate) / 3.0), 1e-15);
}

TEST(RunHtest, DrawsRespectSetting) {
    sd::HtestOptions opt;
    opt.setting = sd::HtestSetting::Student;
    const auto [x, y] = sd::htest_draw(opt, 50, 40, 1);
    EXPECT_EQ(x.size(), 50);
    EXPECT_EQ(y.size(), 40);
    opt.dim = 3;
    EXPECT_THROW(sd::htest_draw(opt, 5, 5, 1), sd::InvalidParameter);
    EXPECT_EQ(sd::parse_htest_setting("null-gaussian"), sd::HtestSetting::NullGaussian);
}

TEST(RunAnomaly, SeparableSetScoresPerfectly) {
    sd::Rng rng(21);
    const Eigen::Index n_in = 95;
    sd::Matrix m(100, 2);
    m.topRows(n_in) = sd::testing::random_matrix(rng, n_in, 2, 0.5);
    for (int k = 0; k < 5; ++k) {
        const double a = 2.0 * std::numbers::pi * k / 5.0;
        m.row(n_in + k) << 30.0 * std::cos(a), 30.0 * std::sin(a);
    }
    std::vector<int> labels(100, 0);
    for (int k = 0; k < 5; ++k) labels[static_cast<std::size_t>(n_in + k)] = 1;
    const sd::LabeledDataset ds{sd::SampleSet(m), labels, "separable"};
    sd::AnomalyOptions opt;
    opt.methods = {sd::Method::Sphere, sd::Method::Mahalanobis};
    const auto rep = sd::run_anomaly(ds, opt);
    const auto& sphere = rep.metrics["by_method"]["sphere"];
    const auto scores = sphere["scores"].get<std::vector<double>>();
    EXPECT_EQ(sd::testing::enumerate_auroc(scores, labels), 1.0);
    EXPECT_EQ(sphere["auroc"].get<double>(), 1.0);
    const double pooled = rep.parameters["pooled_std"].get<double>();
    EXPECT_EQ(rep.parameters["options"]["r"].get<double>(), pooled);
    EXPECT_EQ(rep.parameters["options"]["s"].get<double>(), pooled * 2.0);

    std::vector<int> one_class(100, 0);
    EXPECT_THROW(sd::run_anomaly({sd::SampleSet(m), one_class, "bad"}, opt), sd::InvalidParameter);
}

TEST(RunSpeedbench, Schema) {
    sd::SpeedbenchOptions opt;
    opt.sizes = {1000, 2000};
    opt.repeats = 1;
    opt.options.halfspace.restarts = 2;
    const auto rep = sd::run_speedbench(opt);
    EXPECT_TRUE(rep.metrics["median_seconds"]["sphere"].contains("1000"));
    EXPECT_TRUE(rep.metrics["median_seconds"]["halfspace"].contains("2000"));
    EXPECT_TRUE(rep.metrics["time_ratios"].contains("halfspace/sphere"));
    EXPECT_LT(rep.metrics["depth"]["sphere"]["1000"].get<double>(), 1e-6);
    EXPECT_EQ(rep.metrics["depth"]["halfspace"]["1000"].get<double>(), 0.0);
    opt.sizes = {2000, 1000};
    EXPECT_THROW(sd::run_speedbench(opt), sd::InvalidParameter);
}
