#include "l0em/simulate.hpp"

#include "l0em/metrics.hpp"
#include "l0em/parallel.hpp"

#include <cmath>
#include <numeric>

namespace l0em {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(seed) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

namespace {

Matrix standard_normals(Index n, Index m, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix z(n, m);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < m; ++j) z(i, j) = normal(rng);
    return z;
}

} // namespace

DesignMatrix gen_ar1(Index n, Index m, double r, std::uint64_t seed) {
    if (n < 1 || m < 1) throw std::invalid_argument("gen_ar1: n and m must be positive");
    if (!(std::abs(r) < 1.0)) throw std::invalid_argument("gen_ar1: |r| must be below 1");
    Rng rng(seed);
    Matrix x = standard_normals(n, m, rng);
    // The Cholesky factor of r^|i-j| is L(j, k) = r^(j-k) c_k with c_0 = 1 and
    // c_k = sqrt(1 - r^2), so x L^t reduces to a first-order recursion.
    const double c = std::sqrt(1.0 - r * r);
    for (Index j = 1; j < m; ++j) x.col(j) = r * x.col(j - 1) + c * x.col(j);
    return DesignMatrix(std::move(x));
}

Matrix sample_gaussian(const Matrix& cov, Index n, Rng& rng) {
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) throw NumericError("covariance is not positive definite");
    const Matrix z = standard_normals(n, cov.rows(), rng);
    return z * llt.matrixU();
}

SparseCoefficients default_true_beta() { return {{0, 2.0}, {1, -3.0}, {4, 4.0}}; }

Vector dense_coefficients(const SparseCoefficients& beta, Index m) {
    Vector theta = Vector::Zero(m);
    for (const auto& [j, v] : beta) {
        if (j < 0 || j >= m) throw std::invalid_argument("true coefficient index out of range");
        theta[j] = v;
    }
    return theta;
}

Vector gen_response(const DesignMatrix& X, const SparseCoefficients& beta, double noise_sd,
                    std::uint64_t seed) {
    if (!(noise_sd >= 0.0)) throw std::invalid_argument("noise_sd must be nonnegative");
    Vector y = X.data() * dense_coefficients(beta, X.cols());
    if (noise_sd > 0.0) {
        Rng rng(seed);
        std::normal_distribution<double> normal(0.0, noise_sd);
        for (Index i = 0; i < y.size(); ++i) y[i] += normal(rng);
    }
    return y;
}

BandKind parse_band_kind(const std::string& name) {
    if (name == "band1" || name == "1") return BandKind::band1;
    if (name == "band2" || name == "2") return BandKind::band2;
    throw std::invalid_argument("unknown band network '" + name + "'");
}

std::string to_string(BandKind kind) { return kind == BandKind::band1 ? "band1" : "band2"; }

Matrix band2_precision(Index m) {
    Matrix omega = Matrix::Identity(m, m);
    for (Index i = 0; i < m; ++i) {
        if (i + 1 < m) omega(i, i + 1) = omega(i + 1, i) = -0.25;
        if (i + 2 < m) omega(i, i + 2) = omega(i + 2, i) = -0.4;
    }
    const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(omega, Eigen::EigenvaluesOnly).eigenvalues()[0];
    if (lmin <= 0.0) {
        omega.diagonal().array() += std::abs(lmin) + 0.1;
        const Vector d = omega.diagonal().cwiseSqrt().cwiseInverse();
        omega = d.asDiagonal() * omega * d.asDiagonal();
    }
    return omega;
}

BandNetwork gen_band_network(BandKind kind, Index m, Index n, std::uint64_t seed) {
    if (m < 3) throw std::invalid_argument("band networks need m >= 3");
    if (n < 1) throw std::invalid_argument("band networks need n >= 1");
    const Index width = kind == BandKind::band1 ? 1 : 2;
    Matrix cov(m, m), prec;
    if (kind == BandKind::band1) {
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < m; ++j) cov(i, j) = std::pow(0.6, static_cast<double>(std::abs(i - j)));
        prec = cov.llt().solve(Matrix::Identity(m, m));
    } else {
        prec = band2_precision(m);
        Eigen::LLT<Matrix> llt(prec);
        if (llt.info() != Eigen::Success) throw NumericError("band-2 precision repair failed");
        cov = llt.solve(Matrix::Identity(m, m));
    }
    Adjacency truth = Adjacency::Constant(m, m, false);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j) truth(i, j) = i != j && std::abs(i - j) <= width;
    Rng rng(seed);
    Matrix x = sample_gaussian(cov, n, rng);
    return BandNetwork{DesignMatrix(std::move(x)), std::move(truth), std::move(cov), std::move(prec)};
}

void ExperimentSpec::validate() const {
    if (n < 2 || m < 1) throw std::invalid_argument("experiment needs n >= 2 and m >= 1");
    if (replicates < 1) throw std::invalid_argument("replicates must be at least 1");
    if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("correlation r must lie in [0, 1)");
    if (!(noise_sd > 0.0)) throw std::invalid_argument("noise_sd must be positive");
    if (!(p >= 0.0 && p <= 2.0)) throw std::invalid_argument("penalty exponent must lie in [0, 2]");
    dense_coefficients(true_beta, m);
    solver.validate();
}

Summary summarize(const std::vector<double>& values) {
    Summary s;
    if (values.empty()) return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

namespace {

bool is_cv_rule(SelectionRule rule) {
    return rule == SelectionRule::cv_mse || rule == SelectionRule::stability ||
           rule == SelectionRule::combined_max;
}

InformationCriterion criterion_of(SelectionRule rule) {
    switch (rule) {
    case SelectionRule::aic: return InformationCriterion::aic;
    case SelectionRule::bic: return InformationCriterion::bic;
    default: return InformationCriterion::ric;
    }
}

} // namespace

std::vector<ExperimentStats> run_experiment_rules(const ExperimentSpec& spec,
                                                  const std::vector<SelectionRule>& rules) {
    spec.validate();
    if (rules.empty()) throw std::invalid_argument("no selection rule requested");
    const bool need_cv = std::any_of(rules.begin(), rules.end(), is_cv_rule);
    const Index test_rows = spec.test_size > 0 ? spec.test_size : spec.n;
    const Vector theta_true = dense_coefficients(spec.true_beta, spec.m);
    std::vector<Index> true_support;
    for (Index j = 0; j < spec.m; ++j)
        if (theta_true[j] != 0.0) true_support.push_back(j);

    SolverOptions solver = spec.solver;
    solver.p = spec.p;
    solver.init.reset();
    solver.warm_start = false;

    const std::size_t reps = static_cast<std::size_t>(spec.replicates);
    std::vector<std::vector<ReplicateRecord>> per_rule(rules.size(), std::vector<ReplicateRecord>(reps));

    parallel_for(reps, spec.threads, [&](std::size_t rep) {
        const auto rid = static_cast<std::uint64_t>(rep);
        for (std::size_t q = 0; q < rules.size(); ++q) per_rule[q][rep].replicate = static_cast<int>(rep);
        try {
            const DesignMatrix X = gen_ar1(spec.n, spec.m, spec.r, derive_seed(spec.seed, rid, 1));
            const Vector y = gen_response(X, spec.true_beta, spec.noise_sd, derive_seed(spec.seed, rid, 2));
            const DesignMatrix Xt = gen_ar1(test_rows, spec.m, spec.r, derive_seed(spec.seed, rid, 3));
            const Vector yt = gen_response(Xt, spec.true_beta, spec.noise_sd, derive_seed(spec.seed, rid, 4));

            CvReport report;
            if (need_cv) {
                const LambdaGrid grid = make_grid(X, y, spec.grid_count, spec.lambda_min,
                                                  spec.p == 0.0 ? PenaltyKind::l0 : PenaltyKind::l1);
                report = cv_mse(X, y, grid, spec.folds, derive_seed(spec.seed, rid, 5), solver, 1);
            }

            for (std::size_t q = 0; q < rules.size(); ++q) {
                ReplicateRecord& rec = per_rule[q][rep];
                double lambda = 0.0;
                if (is_cv_rule(rules[q])) {
                    const SelectionResult sel = select_lambda(report, rules[q]);
                    lambda = sel.lambda_final;
                    rec.lambda_mse = sel.lambda_mse;
                    rec.lambda_ss = sel.lambda_ss;
                    rec.stability_exact = sel.stability_exact;
                    for (const CvRow& row : report.rows)
                        if (row.lambda == lambda) rec.cv_mse = row.mse_mean;
                    rec.cv_converged_fits = report.converged_fits;
                    rec.cv_certificate_failures = report.certificate_failures;
                } else {
                    lambda = lambda_ic(criterion_of(rules[q]), spec.n, spec.m);
                }
                SolverOptions final_opts = solver;
                final_opts.keep_iterates = spec.p == 0.0;
                FitResult fit = fit_lpem(X, y, lambda, final_opts);

                rec.lambda = lambda;
                rec.selected = static_cast<int>(fit.support.size());
                rec.test_mse = mse(yt, Xt.data() * fit.theta);
                rec.insample_mse = mse(y, X.data() * fit.theta);
                rec.bias = bias(fit.theta, theta_true);
                const SupportMetrics sm = support_metrics(fit.theta, true_support);
                rec.exact_recovery = sm.exact_recovery;
                rec.true_positive = sm.true_positive;
                rec.false_positive = sm.false_positive;
                rec.false_negative = sm.false_negative;
                rec.converged = fit.converged;
                rec.iterations = fit.iterations;
                if (spec.p == 0.0 && fit.converged) {
                    rec.certificate_ok = passes_stationarity_certificate(X, y, fit.theta, lambda);
                    rec.contraction_ok = eventually_contracts(fit);
                }
                fit.iterates.clear();
                rec.theta = std::move(fit.theta);
                rec.ok = true;
            }
        } catch (const std::exception& e) {
            for (std::size_t q = 0; q < rules.size(); ++q) {
                if (!per_rule[q][rep].ok) per_rule[q][rep].error = e.what();
            }
        }
    });

    std::vector<ExperimentStats> out;
    for (std::size_t q = 0; q < rules.size(); ++q) {
        ExperimentStats st;
        st.spec = spec;
        st.spec.rule = rules[q];
        st.records = std::move(per_rule[q]);
        std::vector<double> sel, tmse, cmse, imse, bs;
        for (const ReplicateRecord& rec : st.records) {
            if (!rec.ok) {
                ++st.failures;
                continue;
            }
            ++st.succeeded;
            sel.push_back(rec.selected);
            tmse.push_back(rec.test_mse);
            cmse.push_back(rec.cv_mse);
            imse.push_back(rec.insample_mse);
            bs.push_back(rec.bias);
            st.true_model_count += rec.exact_recovery;
            if (rec.converged) {
                ++st.converged;
                st.certificate_pass += rec.certificate_ok;
                st.contraction_pass += rec.contraction_ok;
            }
        }
        st.selected = summarize(sel);
        st.test_mse = summarize(tmse);
        st.cv_mse = summarize(cmse);
        st.insample_mse = summarize(imse);
        st.bias = summarize(bs);
        st.headline_mse = is_cv_rule(rules[q]) ? st.test_mse : st.insample_mse;
        out.push_back(std::move(st));
    }
    return out;
}

ExperimentStats run_experiment(const ExperimentSpec& spec) {
    return std::move(run_experiment_rules(spec, {spec.rule}).front());
}

GraphExperimentStats run_graph_experiment(const GraphExperimentSpec& spec) {
    if (spec.replicates < 1) throw std::invalid_argument("replicates must be at least 1");
    GraphExperimentStats st;
    st.spec = spec;
    st.records.resize(static_cast<std::size_t>(spec.replicates));
    NetworkOptions net = spec.network;
    net.threads = 1;
    parallel_for(st.records.size(), spec.threads, [&](std::size_t rep) {
        GraphReplicateRecord& rec = st.records[rep];
        rec.replicate = static_cast<int>(rep);
        try {
            const BandNetwork data =
                gen_band_network(spec.kind, spec.m, spec.n, derive_seed(spec.seed, rep, 11));
            const NetworkEstimate est = nodewise_network(data.data, net);
            rec.metrics = graph_metrics(data.truth, est);
            rec.edges = static_cast<int>(est.adjacency.count() / 2);
            rec.failed_nodes = static_cast<int>(est.failed_nodes.size());
            rec.ok = true;
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
    });
    std::vector<double> auc, fdr, fnr, fpr, edges;
    for (const auto& rec : st.records) {
        if (!rec.ok) {
            ++st.failures;
            continue;
        }
        ++st.succeeded;
        auc.push_back(rec.metrics.auc);
        fdr.push_back(rec.metrics.fdr);
        fnr.push_back(rec.metrics.fnr);
        fpr.push_back(rec.metrics.fpr);
        edges.push_back(rec.edges);
    }
    st.auc = summarize(auc);
    st.fdr = summarize(fdr);
    st.fnr = summarize(fnr);
    st.fpr = summarize(fpr);
    st.edges = summarize(edges);
    return st;
}

} // namespace l0em
