// l0em command-line tool: fit, path, cv, graph and sim-table.

#include "l0em/graph.hpp"
#include "l0em/io.hpp"
#include "l0em/metrics.hpp"
#include "l0em/parallel.hpp"
#include "l0em/selection.hpp"
#include "l0em/simulate.hpp"
#include "l0em/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace l0em;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

enum Exit { ok = 0, input_error = 1, not_converged = 2, too_many_failures = 3 };

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    int threads = default_threads();
    std::string output;
    std::uint64_t seed = 1;
};

struct SolverFlags {
    double p = 0.0;
    double tol = 1e-6;
    double threshold = 1e-3;
    int max_iter = 1000;
    bool nonneg = false;

    SolverOptions options() const {
        SolverOptions o;
        o.p = p;
        o.tol = tol;
        o.threshold = threshold;
        o.max_iter = max_iter;
        o.nonneg = nonneg;
        return o;
    }
};

struct DataFlags {
    std::string design;
    std::string response;
    std::string response_col;
    bool standardize = false;
};

struct Dataset {
    Matrix x;
    Vector y;
    std::vector<std::string> names;
};

// Column centering and unit-norm scaling, kept so coefficients can be mapped back.
struct Scaling {
    bool active = false;
    Vector x_mean, x_scale;
    double y_mean = 0.0;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& s) {
    cmd->add_option("--p", s.p, "Penalty exponent in [0, 2] (0 = L0)")->check(CLI::Range(0.0, 2.0));
    cmd->add_option("--tol", s.tol, "Iteration tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--threshold", s.threshold, "Final hard threshold")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", s.max_iter, "Maximum EM iterations")->check(CLI::PositiveNumber);
    cmd->add_flag("--nonneg", s.nonneg, "Clamp negative coefficients to zero");
}

void add_common_flags(CLI::App* cmd, Common& c) {
    cmd->add_option("--threads", c.threads, "Worker threads (default: L0EM_THREADS or 1)")->check(CLI::PositiveNumber);
    cmd->add_option("-o,--output", c.output, "Output file (default: stdout)");
    cmd->add_option("--seed", c.seed, "Random seed");
}

void add_data_flags(CLI::App* cmd, DataFlags& d) {
    cmd->add_option("--design", d.design, "Design matrix CSV (header row)")->required();
    cmd->add_option("--response", d.response, "Response CSV (single column)");
    cmd->add_option("--response-col", d.response_col, "Response column inside the design CSV");
    cmd->add_flag("--standardize", d.standardize, "Center y, center and unit-scale columns, report original scale");
}

Dataset load_data(const DataFlags& d) {
    if (d.response.empty() == d.response_col.empty())
        throw InputError("give exactly one of --response or --response-col");
    const CsvTable table = read_csv(d.design);
    Dataset ds;
    if (!d.response_col.empty()) {
        const Index c = table.column(d.response_col);
        ds.y = table.values.col(c);
        ds.x.resize(table.values.rows(), table.values.cols() - 1);
        for (Index j = 0, k = 0; j < table.values.cols(); ++j) {
            if (j == c) continue;
            ds.x.col(k++) = table.values.col(j);
            ds.names.push_back(table.header[static_cast<std::size_t>(j)]);
        }
    } else {
        const CsvTable resp = read_csv(d.response);
        if (resp.values.cols() != 1) throw InputError("response CSV must have exactly one column");
        ds.x = table.values;
        ds.y = resp.values.col(0);
        ds.names = table.header;
    }
    if (ds.x.rows() != ds.y.size()) {
        throw InputError("response has " + std::to_string(ds.y.size()) + " rows but the design has " +
                         std::to_string(ds.x.rows()));
    }
    if (ds.x.cols() < 1 || ds.x.rows() < 1) throw InputError("design matrix is empty");
    return ds;
}

Scaling standardize(Dataset& ds) {
    Scaling s;
    s.active = true;
    s.y_mean = ds.y.mean();
    ds.y.array() -= s.y_mean;
    s.x_mean = ds.x.colwise().mean().transpose();
    ds.x.rowwise() -= s.x_mean.transpose();
    s.x_scale = ds.x.colwise().norm().transpose();
    for (Index j = 0; j < ds.x.cols(); ++j) {
        if (s.x_scale[j] == 0.0) throw InputError("column '" + ds.names[static_cast<std::size_t>(j)] + "' is constant");
        ds.x.col(j) /= s.x_scale[j];
    }
    return s;
}

json coefficients_json(const Vector& theta, const std::vector<std::string>& names) {
    json c = json::object();
    for (Index j = 0; j < theta.size(); ++j)
        if (theta[j] != 0.0) c[names[static_cast<std::size_t>(j)]] = theta[j];
    return c;
}

json original_scale(const Scaling& s, const Vector& theta, const std::vector<std::string>& names) {
    const Vector b = theta.cwiseQuotient(s.x_scale);
    return json{{"intercept", s.y_mean - s.x_mean.dot(b)}, {"coefficients", coefficients_json(b, names)}};
}

json fit_json(const FitResult& fit, const DesignMatrix& X, const Vector& y, const Dataset& ds,
              const Scaling& scaling) {
    json j = to_json(fit);
    j["coefficients"] = coefficients_json(fit.theta, ds.names);
    j["stationarity_residual_max"] = stationarity_residual(X, y, fit.theta, fit.lambda).lpNorm<Eigen::Infinity>();
    j["stationarity_bound"] = stationarity_bound(X, y, fit.theta);
    if (scaling.active) j["original_scale"] = original_scale(scaling, fit.theta, ds.names);
    return j;
}

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

json envelope(const json& config, std::uint64_t seed, const json& results, const json& failures) {
    return json{{"config", config},   {"seed", seed},       {"results", results},
                {"failures", failures}, {"version", kVersion}, {"timestamp", timestamp()}};
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
}

json solver_config(const SolverFlags& s) { return to_json(s.options()); }

json data_config(const DataFlags& d) {
    return json{{"design", d.design},
                {"response", d.response},
                {"response_col", d.response_col},
                {"standardize", d.standardize}};
}

// ---- fit -------------------------------------------------------------------

struct FitCmd {
    Common common;
    DataFlags data;
    SolverFlags solver;
    std::optional<double> lambda;
    std::string ic;
};

int run_fit(const FitCmd& c) {
    if (c.lambda.has_value() == !c.ic.empty()) throw InputError("give exactly one of --lambda or --ic");
    Dataset ds = load_data(c.data);
    Scaling scaling;
    if (c.data.standardize) scaling = standardize(ds);
    const DesignMatrix X(ds.x);
    const double lambda = c.lambda ? *c.lambda : lambda_ic(parse_criterion(c.ic), X.rows(), X.cols());
    const FitResult fit = fit_lpem(X, ds.y, lambda, c.solver.options());

    json config{{"command", "fit"}, {"data", data_config(c.data)}, {"solver", solver_config(c.solver)},
                {"lambda", c.lambda ? json(*c.lambda) : json(nullptr)}, {"ic", c.ic}, {"threads", c.common.threads}};
    emit(c.common.output, envelope(config, c.common.seed, fit_json(fit, X, ds.y, ds, scaling), json::array()).dump(2) + "\n");
    return fit.converged ? Exit::ok : Exit::not_converged;
}

// ---- path ------------------------------------------------------------------

struct PathCmd {
    Common common;
    DataFlags data;
    SolverFlags solver;
    int grid_count = 100;
    double lambda_min = 1e-4;
    bool warm_start = false;
};

int run_path(const PathCmd& c) {
    Dataset ds = load_data(c.data);
    if (c.data.standardize) standardize(ds);
    const DesignMatrix X(ds.x);
    const LambdaGrid grid = make_grid(X, ds.y, c.grid_count, c.lambda_min,
                                      c.solver.p == 0.0 ? PenaltyKind::l0 : PenaltyKind::l1);
    SolverOptions opts = c.solver.options();
    opts.warm_start = c.warm_start;
    const auto path = reg_path(X, ds.y, grid.values(), opts);

    // Plot-ready: one row per lambda, one column per feature that is ever nonzero.
    std::vector<Index> ever;
    for (Index j = 0; j < X.cols(); ++j)
        for (const auto& f : path)
            if (f.theta[j] != 0.0) {
                ever.push_back(j);
                break;
            }
    std::vector<std::string> header{"lambda", "nonzeros", "objective", "iterations", "converged"};
    for (Index j : ever) header.push_back(ds.names[static_cast<std::size_t>(j)]);
    Matrix table(static_cast<Index>(path.size()), static_cast<Index>(header.size()));
    bool all_converged = true;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const auto& f = path[i];
        const auto r = static_cast<Index>(i);
        table(r, 0) = f.lambda;
        table(r, 1) = static_cast<double>(f.support.size());
        table(r, 2) = f.objective;
        table(r, 3) = f.iterations;
        table(r, 4) = f.converged;
        all_converged = all_converged && f.converged;
        for (std::size_t k = 0; k < ever.size(); ++k) table(r, 5 + static_cast<Index>(k)) = f.theta[ever[k]];
    }
    std::ostringstream out;
    write_csv(out, header, table);
    emit(c.common.output, out.str());
    return all_converged ? Exit::ok : Exit::not_converged;
}

// ---- cv --------------------------------------------------------------------

struct CvCmd {
    Common common;
    DataFlags data;
    SolverFlags solver;
    int folds = 5;
    int grid_count = 100;
    double lambda_min = 1e-4;
    std::string rule = "combined_max";
};

int run_cv(const CvCmd& c) {
    const SelectionRule rule = parse_selection_rule(c.rule);
    if (rule == SelectionRule::aic || rule == SelectionRule::bic || rule == SelectionRule::ric)
        throw InputError("cv needs a cross-validation rule (cv_mse, stability, combined_max); use fit --ic instead");
    Dataset ds = load_data(c.data);
    Scaling scaling;
    if (c.data.standardize) scaling = standardize(ds);
    const DesignMatrix X(ds.x);
    const LambdaGrid grid = make_grid(X, ds.y, c.grid_count, c.lambda_min,
                                      c.solver.p == 0.0 ? PenaltyKind::l0 : PenaltyKind::l1);
    const SolverOptions opts = c.solver.options();
    const CvReport report = cv_mse(X, ds.y, grid, c.folds, c.common.seed, opts, c.common.threads);
    const SelectionResult sel = select_lambda(report, rule);
    const FitResult fit = fit_lpem(X, ds.y, sel.lambda_final, opts);

    json rows = json::array();
    json failures = json::array();
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const CvRow& r = report.rows[i];
        rows.push_back({{"lambda", r.lambda}, {"mse_mean", r.mse_mean}, {"mse_sd", r.mse_sd},
                        {"nnz_mean", r.nnz_mean}, {"nnz_sd", r.nnz_sd}, {"valid", r.valid}});
        if (!r.valid) failures.push_back({{"lambda_index", i}, {"lambda", r.lambda}});
    }
    json results{{"cv", rows},
                 {"selection",
                  {{"rule", to_string(rule)}, {"lambda_mse", sel.lambda_mse}, {"lambda_ss", sel.lambda_ss},
                   {"lambda_final", sel.lambda_final}, {"stability_exact_zero", sel.stability_exact}}},
                 {"refit_full_data", true},
                 {"fit", fit_json(fit, X, ds.y, ds, scaling)},
                 {"certificate_failures", report.certificate_failures}};
    json config{{"command", "cv"}, {"data", data_config(c.data)}, {"solver", solver_config(c.solver)},
                {"folds", c.folds}, {"grid_count", c.grid_count}, {"lambda_min", c.lambda_min},
                {"rule", to_string(rule)}, {"threads", c.common.threads}};
    emit(c.common.output, envelope(config, c.common.seed, results, failures).dump(2) + "\n");
    return fit.converged ? Exit::ok : Exit::not_converged;
}

// ---- graph -----------------------------------------------------------------

struct GraphCmd {
    Common common;
    SolverFlags solver;
    std::string data;
    std::optional<double> lambda;
    std::string ic;
    bool positive_only = false;
    std::string symmetrization = "or";
    std::string truth;
    std::string auc_mode = "magnitude";
    std::string edges;
    bool standardize = false;
};

Adjacency read_truth(const std::string& path, Index m) {
    const CsvTable t = read_csv(path);
    if (t.values.rows() != m || t.values.cols() != m)
        throw InputError("truth adjacency must be " + std::to_string(m) + "x" + std::to_string(m));
    Adjacency a = (t.values.array() != 0.0).matrix();
    for (Index i = 0; i < m; ++i) a(i, i) = false;
    return a;
}

int run_graph(const GraphCmd& c) {
    if (c.lambda.has_value() && !c.ic.empty()) throw InputError("give at most one of --lambda and --ic");
    CsvTable table = read_csv(c.data);
    if (table.values.cols() < 2) throw InputError("graph estimation needs at least two columns");
    if (c.standardize) {
        table.values.rowwise() -= table.values.colwise().mean();
        for (Index j = 0; j < table.values.cols(); ++j) {
            const double s = table.values.col(j).norm();
            if (s == 0.0) throw InputError("column '" + table.header[static_cast<std::size_t>(j)] + "' is constant");
            table.values.col(j) /= s;
        }
    }
    const DesignMatrix X(table.values);
    NetworkOptions opts;
    opts.lambda = c.lambda ? LambdaRule::fixed_value(*c.lambda)
                           : LambdaRule::ic(c.ic.empty() ? InformationCriterion::bic : parse_criterion(c.ic));
    opts.positive_only = c.positive_only;
    opts.rule = parse_symmetrization(c.symmetrization);
    opts.solver = c.solver.options();
    opts.threads = c.common.threads;
    const NetworkEstimate est = nodewise_network(X, opts);

    if (!c.edges.empty()) {
        std::ofstream out(c.edges, std::ios::binary);
        if (!out) throw InputError("cannot write '" + c.edges + "'");
        write_edge_list(out, est, table.header);
    }
    int edge_count = 0;
    for (Index i = 0; i < X.cols(); ++i)
        for (Index j = i + 1; j < X.cols(); ++j) edge_count += est.adjacency(i, j);

    json results{{"nodes", X.cols()},
                 {"samples", X.rows()},
                 {"edges", edge_count},
                 {"lambda_used", est.lambda_used.empty() ? 0.0 : est.lambda_used.front()},
                 {"edge_file", c.edges}};
    if (!c.truth.empty()) {
        const Adjacency truth = read_truth(c.truth, X.cols());
        GraphMetrics gm;
        if (c.auc_mode == "path") {
            const LambdaGrid grid = LambdaGrid::log_spaced(1e-2, 1e3, 40);
            const Matrix scores = lambda_path_scores(X, grid.values(), opts);
            gm = graph_metrics(truth, est, &scores);
        } else if (c.auc_mode == "magnitude") {
            gm = graph_metrics(truth, est);
        } else {
            throw InputError("--auc-mode must be 'magnitude' or 'path'");
        }
        results["metrics"] = to_json(gm);
    }
    json failures = json::array();
    for (Index i : est.failed_nodes) failures.push_back({{"node", table.header[static_cast<std::size_t>(i)]}});
    const LambdaRule& rule = opts.lambda;
    json config{{"command", "graph"},
                {"data", c.data},
                {"lambda_rule", rule.fixed ? json(*rule.fixed) : json(to_string(rule.criterion))},
                {"positive_only", c.positive_only},
                {"symmetrization", to_string(opts.rule)},
                {"auc_mode", c.auc_mode},
                {"standardize", c.standardize},
                {"solver", solver_config(c.solver)},
                {"threads", c.common.threads}};
    emit(c.common.output, envelope(config, c.common.seed, results, failures).dump(2) + "\n");
    return Exit::ok;
}

// ---- sim-table -------------------------------------------------------------

struct SimCmd {
    Common common;
    int table = 1;
    int replicates = 0;  // 0 = the protocol's count
    std::string out_dir = ".";
    int grid_count = 100;
};

struct TableOutput {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::ostringstream detail;
    json summary = json::array();
    int attempted = 0;
    int succeeded = 0;
};

std::string fmt(double v) { return format_double(v); }

void add_stats_detail(TableOutput& out, const std::string& label, const ExperimentStats& st) {
    out.detail << "# " << label << '\n';
    write_replicates_csv(out.detail, st);
    out.summary.push_back({{"cell", label}, {"stats", to_json(st)}});
    out.attempted += static_cast<int>(st.records.size());
    out.succeeded += st.succeeded;
}

void regression_table(const SimCmd& c, TableOutput& out) {
    const bool high_dim = c.table >= 3;
    const std::vector<double> rs = high_dim ? std::vector<double>{0.0, 0.3, 0.6} : std::vector<double>{0.0, 0.3, 0.6, 0.8};
    const int default_reps = c.table == 3 ? 20 : 100;
    ExperimentSpec base;
    base.n = 100;
    base.m = high_dim ? 1000 : 50;
    base.replicates = c.replicates > 0 ? c.replicates : default_reps;
    base.seed = c.common.seed;
    base.threads = c.common.threads;
    base.grid_count = c.grid_count;

    struct Method {
        std::string name;
        double p;
        SelectionRule rule;
    };
    std::vector<Method> methods;
    switch (c.table) {
    case 1: methods = {{"L0", 0.0, SelectionRule::cv_mse}, {"L1", 1.0, SelectionRule::cv_mse}}; break;
    case 2:
    case 3: methods = {{"L0", 0.0, SelectionRule::combined_max}, {"L1", 1.0, SelectionRule::combined_max}}; break;
    default: methods = {{"AIC", 0.0, SelectionRule::aic}, {"BIC", 0.0, SelectionRule::bic}}; break;
    }
    const std::string mse_name = c.table == 4 ? "MSE_insample" : "MSE_test";
    out.header = {"r"};
    for (const auto& m : methods)
        for (const std::string& col : std::vector<std::string>{"SF", "SF_sd", mse_name, mse_name + "_sd", "bias",
                                                               "bias_sd", "true_model", "failures"})
            out.header.push_back(m.name + "_" + col);

    for (double r : rs) {
        std::vector<std::string> row{fmt(r)};
        for (const auto& m : methods) {
            ExperimentSpec spec = base;
            spec.r = r;
            spec.p = m.p;
            spec.rule = m.rule;
            const ExperimentStats st = run_experiment(spec);
            for (double v : {st.selected.mean, st.selected.sd, st.headline_mse.mean, st.headline_mse.sd, st.bias.mean,
                             st.bias.sd})
                row.push_back(fmt(v));
            row.push_back(std::to_string(st.true_model_count) + "/" + std::to_string(st.succeeded));
            row.push_back(std::to_string(st.failures));
            add_stats_detail(out, m.name + " r=" + fmt(r), st);
        }
        out.rows.push_back(std::move(row));
    }
}

void graph_table(const SimCmd& c, TableOutput& out) {
    out.header = {"network", "criterion", "n", "AUC", "AUC_sd", "FDR_pct", "FDR_pct_sd", "FNR_pct", "FNR_pct_sd",
                  "FPR_pct", "FPR_pct_sd", "failures"};
    for (BandKind kind : {BandKind::band1, BandKind::band2}) {
        for (InformationCriterion ic : {InformationCriterion::aic, InformationCriterion::bic}) {
            for (Index n : {50, 100, 200}) {
                GraphExperimentSpec spec;
                spec.kind = kind;
                spec.m = 100;
                spec.n = n;
                spec.replicates = c.replicates > 0 ? c.replicates : 100;
                spec.network.lambda = LambdaRule::ic(ic);
                spec.seed = c.common.seed;
                spec.threads = c.common.threads;
                const GraphExperimentStats st = run_graph_experiment(spec);
                out.rows.push_back({to_string(kind), to_string(ic), std::to_string(n), fmt(st.auc.mean),
                                    fmt(st.auc.sd), fmt(100 * st.fdr.mean), fmt(100 * st.fdr.sd),
                                    fmt(100 * st.fnr.mean), fmt(100 * st.fnr.sd), fmt(100 * st.fpr.mean),
                                    fmt(100 * st.fpr.sd), std::to_string(st.failures)});
                const std::string label = to_string(kind) + " " + to_string(ic) + " n=" + std::to_string(n);
                out.detail << "# " << label << '\n';
                write_replicates_csv(out.detail, st);
                out.summary.push_back({{"cell", label}, {"stats", to_json(st)}});
                out.attempted += static_cast<int>(st.records.size());
                out.succeeded += st.succeeded;
            }
        }
    }
}

int run_sim(const SimCmd& c) {
    if (c.table < 1 || c.table > 5) throw InputError("--table must be 1..5");
    TableOutput out;
    if (c.table == 5) graph_table(c, out);
    else regression_table(c, out);

    const std::filesystem::path dir(c.out_dir);
    std::filesystem::create_directories(dir);
    const auto aggregate = dir / ("table" + std::to_string(c.table) + ".csv");
    const auto detail = dir / ("table" + std::to_string(c.table) + "_replicates.csv");
    {
        std::ofstream f(aggregate, std::ios::binary);
        if (!f) throw InputError("cannot write '" + aggregate.string() + "'");
        for (std::size_t i = 0; i < out.header.size(); ++i) f << (i ? "," : "") << out.header[i];
        f << '\n';
        for (const auto& row : out.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << row[i];
            f << '\n';
        }
    }
    {
        std::ofstream f(detail, std::ios::binary);
        if (!f) throw InputError("cannot write '" + detail.string() + "'");
        f << out.detail.str();
    }
    json failures = json::array();
    for (const auto& cell : out.summary)
        for (const auto& fl : cell["stats"]["failures"]) failures.push_back({{"cell", cell["cell"]}, {"failure", fl}});
    json config{{"command", "sim-table"}, {"table", c.table}, {"replicates", c.replicates},
                {"grid_count", c.grid_count}, {"out_dir", c.out_dir}, {"threads", c.common.threads}};
    json results{{"aggregate_csv", aggregate.string()}, {"replicate_csv", detail.string()},
                 {"cells", out.summary}, {"attempted", out.attempted}, {"succeeded", out.succeeded}};
    emit(c.common.output, envelope(config, c.common.seed, results, failures).dump(2) + "\n");
    return out.succeeded * 10 >= out.attempted * 9 ? Exit::ok : Exit::too_many_failures;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse regression and network estimation with the L0EM fixed-point iteration"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    FitCmd fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit one model at a given lambda or information criterion");
    add_common_flags(fit_cmd, fit.common);
    add_data_flags(fit_cmd, fit.data);
    add_solver_flags(fit_cmd, fit.solver);
    fit_cmd->add_option("--lambda", fit.lambda, "Regularization strength")->check(CLI::PositiveNumber);
    fit_cmd->add_option("--ic", fit.ic, "Information criterion: aic, bic or ric");

    PathCmd path;
    auto* path_cmd = app.add_subcommand("path", "Regularization path as plot-ready CSV");
    add_common_flags(path_cmd, path.common);
    add_data_flags(path_cmd, path.data);
    add_solver_flags(path_cmd, path.solver);
    path_cmd->add_option("--grid-count", path.grid_count, "Number of lambda values")->check(CLI::Range(2, 100000));
    path_cmd->add_option("--lambda-min", path.lambda_min, "Smallest lambda")->check(CLI::PositiveNumber);
    path_cmd->add_flag("--warm-start", path.warm_start, "Start each fit from the previous solution");

    CvCmd cv;
    auto* cv_cmd = app.add_subcommand("cv", "Cross-validated lambda selection and full-data refit");
    add_common_flags(cv_cmd, cv.common);
    add_data_flags(cv_cmd, cv.data);
    add_solver_flags(cv_cmd, cv.solver);
    cv_cmd->add_option("--folds", cv.folds, "Number of folds")->check(CLI::Range(2, 1000000));
    cv_cmd->add_option("--grid-count", cv.grid_count, "Number of lambda values")->check(CLI::Range(2, 100000));
    cv_cmd->add_option("--lambda-min", cv.lambda_min, "Smallest lambda")->check(CLI::PositiveNumber);
    cv_cmd->add_option("--rule", cv.rule, "cv_mse, stability or combined_max");

    GraphCmd graph;
    auto* graph_cmd = app.add_subcommand("graph", "Nodewise network estimation");
    add_common_flags(graph_cmd, graph.common);
    add_solver_flags(graph_cmd, graph.solver);
    graph_cmd->add_option("--data", graph.data, "Expression matrix CSV (columns = nodes)")->required();
    graph_cmd->add_option("--lambda", graph.lambda, "Fixed per-node lambda")->check(CLI::PositiveNumber);
    graph_cmd->add_option("--ic", graph.ic, "Per-node information criterion (default bic)");
    graph_cmd->add_flag("--positive-only", graph.positive_only, "Keep only positive coefficients");
    graph_cmd->add_option("--symmetrize", graph.symmetrization, "or, and or max_magnitude");
    graph_cmd->add_option("--truth", graph.truth, "True adjacency CSV (m x m, header row) for metrics");
    graph_cmd->add_option("--auc-mode", graph.auc_mode, "magnitude or path");
    graph_cmd->add_option("--edges", graph.edges, "Edge-list CSV output");
    graph_cmd->add_flag("--standardize", graph.standardize, "Center and unit-scale columns");

    SimCmd sim;
    auto* sim_cmd = app.add_subcommand("sim-table", "Reproduce a simulation table");
    add_common_flags(sim_cmd, sim.common);
    sim_cmd->add_option("--table", sim.table, "Table id 1..5")->required();
    sim_cmd->add_option("--replicates", sim.replicates, "Replicates per cell (default: protocol)");
    sim_cmd->add_option("--out-dir", sim.out_dir, "Directory for the CSV files");
    sim_cmd->add_option("--grid-count", sim.grid_count, "Lambda grid size for CV tables")->check(CLI::Range(2, 100000));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Exit::ok : Exit::input_error;
    }

    try {
        if (*fit_cmd) return run_fit(fit);
        if (*path_cmd) return run_path(path);
        if (*cv_cmd) return run_cv(cv);
        if (*graph_cmd) return run_graph(graph);
        if (*sim_cmd) return run_sim(sim);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Exit::input_error;
    } catch (const CsvError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Exit::input_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Exit::input_error;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return Exit::not_converged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Exit::input_error;
    }
    return Exit::ok;
}
