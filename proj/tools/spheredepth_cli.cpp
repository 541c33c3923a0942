// spheredepth command-line front end: depth, contour, rankbench, htest, anomaly, speedbench.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spheredepth/spheredepth.hpp"

namespace sd = spheredepth;

namespace {

struct GlobalFlags {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string output;
    std::string format = "json";
};

struct DataSource {
    std::string path;
    std::string delimiter = ",";
    std::string generator = "gauss";
    std::size_t n = 500;
    long dim = 2;

    sd::SampleSet load(std::uint64_t seed) const {
        if (!path.empty()) return sd::load_numeric_csv(path, delimiter.at(0));
        if (generator == "gauss") return sd::gen_mixture(sd::standard_gaussian_spec(dim), n, seed);
        if (generator == "bigauss") return sd::gen_mixture(sd::bi_gaussian_spec(dim), n, seed);
        if (generator == "cross") {
            sd::Matrix m(4, 2);
            m << 1, 0, -1, 0, 0, 1, 0, -1;
            return sd::SampleSet(m);
        }
        throw sd::InvalidParameter("unknown generator: " + generator);
    }

    nlohmann::ordered_json describe() const {
        if (!path.empty()) return {{"path", path}, {"delimiter", delimiter}};
        if (generator == "cross") return {{"generator", generator}};
        return {{"generator", generator}, {"n", n}, {"dim", dim}};
    }

    void add_options(CLI::App* app) {
        app->add_option("--data", path, "CSV file of numeric features (one sample per row)");
        app->add_option("--delimiter", delimiter, "CSV delimiter")->capture_default_str();
        app->add_option("--generator", generator, "synthetic data when --data is absent: gauss, bigauss, cross")
            ->capture_default_str();
        app->add_option("--n", n, "synthetic sample size")->capture_default_str();
        app->add_option("--dim", dim, "synthetic dimension")->capture_default_str();
    }
};

struct MethodFlags {
    std::string method = "sphere";
    double r = 1.0;
    double s = 1.0;
    double tol = 1e-6;
    double alpha0 = std::numbers::pi;
    int max_iter = 1000;
    std::string init = "paper-mean";
    bool literal = false;
    int restarts = 10;
    double h = 1.0;
    double regularization = 0.0;
    std::size_t grid_size = 4096;

    void add_options(CLI::App* app, bool with_method = true) {
        if (with_method)
            app->add_option("--method", method, "sphere, halfspace, mahalanobis, kspatial, oracle-grid")
                ->capture_default_str();
        app->add_option("--r", r, "sphere radius")->capture_default_str();
        app->add_option("--s", s, "sigmoid smoothing scale")->capture_default_str();
        app->add_option("--tol", tol, "solver stopping threshold")->capture_default_str();
        app->add_option("--alpha0", alpha0, "initial step angle")->capture_default_str();
        app->add_option("--max-iter", max_iter, "solver iteration cap")->capture_default_str();
        app->add_option("--init", init, "paper-mean, mean-minus-z, seeded-random")->capture_default_str();
        app->add_flag("--literal", literal, "keep loss-increasing steps (printed update rule)");
        app->add_option("--restarts", restarts, "Nelder-Mead restarts for halfspace depth")->capture_default_str();
        app->add_option("--bandwidth", h, "Gaussian kernel bandwidth h for kspatial")->capture_default_str();
        app->add_option("--regularization", regularization, "covariance ridge for mahalanobis")->capture_default_str();
        app->add_option("--grid-size", grid_size, "directions for oracle-grid")->capture_default_str();
    }

    sd::MethodOptions build(const GlobalFlags& g) const {
        sd::MethodOptions o;
        o.params = sd::DepthParams(r, s);
        o.optim.tol = tol;
        o.optim.alpha0 = alpha0;
        o.optim.max_iter = max_iter;
        o.optim.init = sd::parse_init_mode(init);
        o.optim.revert_on_increase = !literal;
        o.optim.seed = g.seed;
        o.halfspace.restarts = restarts;
        o.halfspace.seed = g.seed;
        o.kernel.bandwidth_h = h;
        o.regularization = regularization;
        o.grid_size = grid_size;
        o.grid_seed = g.seed;
        o.threads = g.threads;
        return o;
    }
};

std::vector<sd::Method> parse_methods(const std::vector<std::string>& names) {
    std::vector<sd::Method> out;
    for (const auto& n : names) out.push_back(sd::parse_method(n));
    return out;
}

void emit(const GlobalFlags& g, const std::string& content) {
    if (g.output.empty()) {
        std::cout << content;
    } else {
        sd::write_atomic(g.output, content);
    }
}

void emit_report(const GlobalFlags& g, const sd::ExperimentReport& rep, const std::string& csv) {
    if (g.format == "csv") {
        emit(g, csv);
    } else {
        emit(g, rep.dump());
    }
}

std::string depth_csv(const sd::ExperimentReport& rep) {
    std::ostringstream out;
    const auto& depths = rep.metrics.at("depths");
    const bool oracle = rep.metrics.contains("oracle_depths");
    out << "index,depth" << (oracle ? ",oracle_depth" : "") << '\n';
    for (std::size_t i = 0; i < depths.size(); ++i) {
        out << i << ',' << sd::format_real(depths[i].get<double>());
        if (oracle) out << ',' << sd::format_real(rep.metrics["oracle_depths"][i].get<double>());
        out << '\n';
    }
    return out.str();
}

std::string anomaly_csv(const sd::ExperimentReport& rep, const std::vector<int>& labels) {
    std::ostringstream out;
    const auto& by = rep.metrics.at("by_method");
    out << "index,label";
    for (const auto& [name, _] : by.items()) out << ",score_" << name;
    out << '\n';
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out << i << ',' << labels[i];
        for (const auto& [name, entry] : by.items()) out << ',' << sd::format_real(entry["scores"][i].get<double>());
        out << '\n';
    }
    return out.str();
}

std::string flatten_csv(const nlohmann::ordered_json& j, const std::string& prefix = "") {
    std::string out;
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) out += flatten_csv(v, prefix.empty() ? k : prefix + "." + k);
    } else if (j.is_number() || j.is_boolean() || j.is_string()) {
        out += prefix + "," + (j.is_number_float() ? sd::format_real(j.get<double>()) : j.dump()) + "\n";
    }
    return out;
}

sd::Matrix parse_queries(const std::vector<std::string>& queries, long dim) {
    sd::Matrix m(static_cast<Eigen::Index>(queries.size()), dim);
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const sd::SampleSet row = sd::parse_numeric_csv(queries[i]);
        if (row.dim() != dim) throw sd::DimensionMismatch(static_cast<std::size_t>(dim), static_cast<std::size_t>(row.dim()));
        m.row(static_cast<Eigen::Index>(i)) = row.row(0);
    }
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sphere depth computation and experiments"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalFlags g;
    app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--output", g.output, "output file (default stdout)");
    auto* format_opt = app.add_option("--format", g.format, "json or csv (contour defaults to csv)");
    format_opt->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    // depth
    auto* depth = app.add_subcommand("depth", "depth of query points (or every sample) w.r.t. a sample");
    DataSource depth_data;
    depth_data.add_options(depth);
    MethodFlags depth_method;
    depth_method.add_options(depth);
    std::vector<std::string> queries;
    std::string queries_file;
    std::size_t oracle_check = 0;
    depth->add_option("--query", queries, "query point as comma-separated coordinates (repeatable)");
    depth->add_option("--queries", queries_file, "CSV of query points");
    depth->add_option("--oracle-check", oracle_check, "also report the grid oracle with this many directions");

    // contour
    auto* contour = app.add_subcommand("contour", "depth field over a 2-D grid (CSV by default)");
    DataSource contour_data;
    contour_data.add_options(contour);
    MethodFlags contour_method;
    contour_method.add_options(contour);
    sd::ContourGrid grid;
    contour->add_option("--xmin", grid.x_min)->capture_default_str();
    contour->add_option("--xmax", grid.x_max)->capture_default_str();
    contour->add_option("--ymin", grid.y_min)->capture_default_str();
    contour->add_option("--ymax", grid.y_max)->capture_default_str();
    contour->add_option("--nx", grid.nx)->capture_default_str();
    contour->add_option("--ny", grid.ny)->capture_default_str();

    // rankbench
    auto* rankbench = app.add_subcommand("rankbench", "rank correlation with the true bi-Gaussian density");
    sd::RankbenchOptions rb;
    MethodFlags rb_method;
    rb_method.add_options(rankbench, false);
    std::vector<long> rb_dims{2};
    rankbench->add_option("--dims", rb_dims, "dimensions")->delimiter(',')->capture_default_str();
    rankbench->add_option("--n", rb.n)->capture_default_str();
    rankbench->add_option("--runs", rb.runs)->capture_default_str();

    // htest
    auto* htest = app.add_subcommand("htest", "Monte-Carlo size/power of the quality-index homogeneity test");
    sd::HtestOptions ht;
    MethodFlags ht_method;
    ht_method.add_options(htest, false);
    std::string ht_setting = "null-gaussian";
    std::vector<std::string> ht_methods{"sphere", "mahalanobis"};
    long ht_dim = 2;
    htest->add_option("--setting", ht_setting, "null-gaussian or student")->capture_default_str();
    htest->add_option("--sizes", ht.sizes, "n = m values")->delimiter(',')->capture_default_str();
    htest->add_option("--reps", ht.reps)->capture_default_str();
    htest->add_option("--level", ht.level)->capture_default_str();
    htest->add_option("--methods", ht_methods)->delimiter(',')->capture_default_str();
    htest->add_option("--dim", ht_dim)->capture_default_str();

    // anomaly
    auto* anomaly = app.add_subcommand("anomaly", "AUROC of 1 - depth on a labeled CSV");
    MethodFlags an_method;
    an_method.add_options(anomaly, false);
    std::string an_csv;
    std::string an_label = "-1";
    std::string an_delim = ",";
    std::vector<std::string> an_methods{"sphere"};
    bool an_standardize = false;
    anomaly->add_option("--csv", an_csv, "labeled CSV (features + 0/1 label)")->required();
    anomaly->add_option("--label", an_label, "label column name or index (negative counts from the end)")
        ->capture_default_str();
    anomaly->add_option("--delimiter", an_delim)->capture_default_str();
    anomaly->add_option("--methods", an_methods)->delimiter(',')->capture_default_str();
    anomaly->add_flag("--standardize", an_standardize, "center and scale by the pooled std first");
    auto* r_override = anomaly->get_option("--r");
    auto* s_override = anomaly->get_option("--s");

    // speedbench
    auto* speed = app.add_subcommand("speedbench", "wall time of sphere vs halfspace depth");
    sd::SpeedbenchOptions sp;
    MethodFlags sp_method;
    sp_method.add_options(speed, false);
    std::vector<std::string> sp_methods{"sphere", "halfspace"};
    long sp_dim = 3;
    speed->add_option("--sizes", sp.sizes)->delimiter(',')->capture_default_str();
    speed->add_option("--dim", sp_dim)->capture_default_str();
    speed->add_option("--methods", sp_methods)->delimiter(',')->capture_default_str();
    speed->add_option("--repeats", sp.repeats)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*depth) {
            const auto data = depth_data.load(g.seed);
            std::optional<sd::Matrix> q;
            if (!queries_file.empty()) q = sd::load_numeric_csv(queries_file, depth_data.delimiter.at(0)).matrix();
            else if (!queries.empty()) q = parse_queries(queries, data.dim());
            sd::DepthRun run{sd::parse_method(depth_method.method), depth_method.build(g), oracle_check, g.seed};
            const auto rep = sd::run_depth(data, q, run, depth_data.describe());
            emit_report(g, rep, depth_csv(rep));
        } else if (*contour) {
            const auto data = contour_data.load(g.seed);
            const auto method = sd::parse_method(contour_method.method);
            const auto opt = contour_method.build(g);
            const auto res = sd::run_contour(data, grid, method, opt);
            if (format_opt->count() > 0 && g.format == "json") emit(g, sd::contour_report(res, grid, method, opt, g.seed, contour_data.describe()).dump());
            else emit(g, res.to_csv());
        } else if (*rankbench) {
            rb.dims.assign(rb_dims.begin(), rb_dims.end());
            rb.seed = g.seed;
            rb.options = rb_method.build(g);
            const auto rep = sd::run_rankbench(rb);
            emit_report(g, rep, flatten_csv(rep.metrics));
        } else if (*htest) {
            ht.setting = sd::parse_htest_setting(ht_setting);
            ht.dim = ht_dim;
            ht.methods = parse_methods(ht_methods);
            ht.seed = g.seed;
            ht.options = ht_method.build(g);
            const auto rep = sd::run_htest(ht);
            emit_report(g, rep, flatten_csv(rep.metrics));
        } else if (*anomaly) {
            sd::ColumnRef label;
            try {
                std::size_t pos = 0;
                const long idx = std::stol(an_label, &pos);
                label = pos == an_label.size() ? sd::ColumnRef(idx) : sd::ColumnRef(an_label);
            } catch (const std::exception&) {
                label = an_label;
            }
            const auto data = sd::load_labeled_csv(an_csv, label, an_delim.at(0));
            sd::AnomalyOptions ao;
            ao.methods = parse_methods(an_methods);
            if (r_override->count() > 0) ao.r = an_method.r;
            if (s_override->count() > 0) ao.s = an_method.s;
            ao.standardize = an_standardize;
            ao.seed = g.seed;
            MethodFlags base = an_method;
            base.r = 1.0;
            base.s = 1.0;
            ao.options = base.build(g);
            const auto rep = sd::run_anomaly(data, ao);
            emit_report(g, rep, anomaly_csv(rep, data.labels));
        } else if (*speed) {
            sp.dim = sp_dim;
            sp.methods = parse_methods(sp_methods);
            sp.seed = g.seed;
            sp.options = sp_method.build(g);
            const auto rep = sd::run_speedbench(sp);
            emit_report(g, rep, flatten_csv(rep.metrics));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
