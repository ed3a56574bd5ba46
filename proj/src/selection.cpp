#include "l0em/selection.hpp"

#include "l0em/metrics.hpp"
#include "l0em/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace l0em {

namespace {

double sample_sd(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

Matrix take_rows(const Matrix& a, const std::vector<Index>& rows) {
    Matrix out(static_cast<Index>(rows.size()), a.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = a.row(rows[i]);
    return out;
}

Vector take_rows(const Vector& a, const std::vector<Index>& rows) {
    Vector out(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Index>(i)] = a[rows[i]];
    return out;
}

} // namespace

LambdaGrid::LambdaGrid(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("lambda grid is empty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
            throw std::invalid_argument("lambda grid values must be positive and finite");
        }
        if (i > 0 && !(values_[i] > values_[i - 1])) {
            throw std::invalid_argument("lambda grid must be strictly ascending");
        }
    }
}

LambdaGrid LambdaGrid::log_spaced(double lo, double hi, int count) {
    if (count < 2) throw std::invalid_argument("log-spaced grid needs at least two values");
    if (!(lo > 0.0)) throw std::invalid_argument("lambda_min must be positive");
    if (!(lo < hi)) throw std::invalid_argument("lambda_min must be below lambda_max");
    std::vector<double> v(static_cast<std::size_t>(count));
    const double a = std::log(lo);
    const double step = (std::log(hi) - a) / static_cast<double>(count - 1);
    for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = std::exp(a + step * i);
    v.front() = lo;
    v.back() = hi;
    return LambdaGrid(std::move(v));
}

LambdaGrid LambdaGrid::explicit_values(std::vector<double> values) {
    return LambdaGrid(std::move(values));
}

LambdaGrid make_grid(const DesignMatrix& X, const Vector& y, int count, double lambda_min,
                     PenaltyKind kind) {
    const double hi = kind == PenaltyKind::l0 ? lambda_max(X, y) : lambda_max_l1(X, y);
    return LambdaGrid::log_spaced(lambda_min, hi, count);
}

std::vector<int> assign_folds(Index n, int k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("cross-validation needs k >= 2");
    if (n < k) throw std::invalid_argument("cross-validation needs at least k observations");
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> fold(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < perm.size(); ++i) {
        fold[static_cast<std::size_t>(perm[i])] = static_cast<int>(i % static_cast<std::size_t>(k));
    }
    return fold;
}

CvReport cv_mse(const DesignMatrix& X, const Vector& y, const LambdaGrid& grid, int k,
                std::uint64_t seed, const SolverOptions& opts, int threads) {
    check_response(X, y);
    opts.validate();

    CvReport report;
    report.k = k;
    report.seed = seed;
    report.fold_of_row = assign_folds(X.rows(), k, seed);

    struct Fold {
        DesignMatrix train;
        Vector y_train;
        Matrix x_test;
        Vector y_test;
    };
    std::vector<Fold> folds;
    folds.reserve(static_cast<std::size_t>(k));
    for (int f = 0; f < k; ++f) {
        std::vector<Index> tr, te;
        for (Index i = 0; i < X.rows(); ++i) {
            (report.fold_of_row[static_cast<std::size_t>(i)] == f ? te : tr).push_back(i);
        }
        folds.push_back(Fold{DesignMatrix(take_rows(X.data(), tr)), take_rows(y, tr),
                             take_rows(X.data(), te), take_rows(y, te)});
    }

    const std::size_t nl = grid.size();
    const std::size_t nk = static_cast<std::size_t>(k);
    report.fold_mse.assign(nl, std::vector<double>(nk, std::numeric_limits<double>::quiet_NaN()));
    report.fold_nnz.assign(nl, std::vector<int>(nk, -1));
    std::vector<char> cert_fail(nl * nk, 0), conv(nl * nk, 0);

    parallel_for(nl * nk, threads, [&](std::size_t cell) {
        const std::size_t li = cell / nk;
        const std::size_t f = cell % nk;
        const Fold& fold = folds[f];
        try {
            const FitResult fit = fit_lpem(fold.train, fold.y_train, grid[li], opts);
            report.fold_mse[li][f] = mse(fold.y_test, fold.x_test * fit.theta);
            report.fold_nnz[li][f] = static_cast<int>(fit.support.size());
            if (fit.converged) {
                conv[cell] = 1;
                if (opts.p == 0.0 &&
                    !passes_stationarity_certificate(fold.train, fold.y_train, fit.theta, grid[li])) {
                    cert_fail[cell] = 1;
                }
            }
        } catch (const NumericError&) {
            // cell stays invalid
        }
    });

    for (std::size_t c = 0; c < nl * nk; ++c) {
        report.converged_fits += conv[c];
        report.certificate_failures += cert_fail[c];
    }

    report.rows.resize(nl);
    for (std::size_t li = 0; li < nl; ++li) {
        CvRow& row = report.rows[li];
        row.lambda = grid[li];
        std::vector<double> ms, ns;
        for (std::size_t f = 0; f < nk; ++f) {
            if (report.fold_nnz[li][f] < 0) {
                row.valid = false;
                continue;
            }
            ms.push_back(report.fold_mse[li][f]);
            ns.push_back(static_cast<double>(report.fold_nnz[li][f]));
        }
        if (ms.empty()) {
            row.mse_mean = row.nnz_mean = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        row.mse_mean = std::accumulate(ms.begin(), ms.end(), 0.0) / static_cast<double>(ms.size());
        row.nnz_mean = std::accumulate(ns.begin(), ns.end(), 0.0) / static_cast<double>(ns.size());
        row.mse_sd = sample_sd(ms, row.mse_mean);
        const bool agree = std::all_of(ns.begin(), ns.end(), [&](double c) { return c == ns.front(); });
        row.nnz_sd = agree ? 0.0 : sample_sd(ns, row.nnz_mean);
    }
    return report;
}

StabilityPick lambda_stability(const CvReport& report) {
    if (report.rows.empty()) throw std::invalid_argument("empty cross-validation report");
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const CvRow& row = report.rows[i];
        if (row.valid && row.nnz_sd == 0.0) return {row.lambda, i, true};
    }
    StabilityPick pick;
    pick.exact_zero = false;
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const CvRow& row = report.rows[i];
        if (!row.valid) continue;
        if (row.nnz_sd <= best) {
            best = row.nnz_sd;
            pick.lambda = row.lambda;
            pick.index = i;
            found = true;
        }
    }
    if (!found) throw std::invalid_argument("cross-validation report has no valid rows");
    return pick;
}

double lambda_min_mse(const CvReport& report) {
    double best = std::numeric_limits<double>::infinity();
    double lambda = std::numeric_limits<double>::quiet_NaN();
    for (const CvRow& row : report.rows) {
        if (!row.valid) continue;
        if (row.mse_mean <= best) {
            best = row.mse_mean;
            lambda = row.lambda;
        }
    }
    if (std::isnan(lambda)) throw std::invalid_argument("cross-validation report has no valid rows");
    return lambda;
}

SelectionResult select_lambda(const CvReport& report, SelectionRule rule) {
    SelectionResult res;
    res.rule = rule;
    res.lambda_mse = lambda_min_mse(report);
    const StabilityPick ss = lambda_stability(report);
    res.lambda_ss = ss.lambda;
    res.stability_exact = ss.exact_zero;
    switch (rule) {
    case SelectionRule::cv_mse: res.lambda_final = res.lambda_mse; break;
    case SelectionRule::stability: res.lambda_final = res.lambda_ss; break;
    case SelectionRule::combined_max: res.lambda_final = std::max(res.lambda_mse, res.lambda_ss); break;
    default: throw std::invalid_argument("information-criterion rules do not use a CV report");
    }
    return res;
}

double lambda_ic(InformationCriterion criterion, Index n, Index m) {
    if (n < 2) throw std::invalid_argument("information criteria need n >= 2");
    if (m < 1) throw std::invalid_argument("information criteria need m >= 1");
    switch (criterion) {
    case InformationCriterion::aic: return 2.0;
    case InformationCriterion::bic: return std::log(static_cast<double>(n));
    case InformationCriterion::ric: return 2.0 * std::log(static_cast<double>(m));
    }
    throw std::invalid_argument("unknown information criterion");
}

SelectionRule parse_selection_rule(const std::string& name) {
    if (name == "cv_mse" || name == "mse") return SelectionRule::cv_mse;
    if (name == "stability" || name == "ss") return SelectionRule::stability;
    if (name == "combined_max" || name == "combined") return SelectionRule::combined_max;
    if (name == "aic") return SelectionRule::aic;
    if (name == "bic") return SelectionRule::bic;
    if (name == "ric") return SelectionRule::ric;
    throw std::invalid_argument("unknown selection rule '" + name + "'");
}

std::string to_string(SelectionRule rule) {
    switch (rule) {
    case SelectionRule::cv_mse: return "cv_mse";
    case SelectionRule::stability: return "stability";
    case SelectionRule::combined_max: return "combined_max";
    case SelectionRule::aic: return "aic";
    case SelectionRule::bic: return "bic";
    case SelectionRule::ric: return "ric";
    }
    return "unknown";
}

InformationCriterion parse_criterion(const std::string& name) {
    if (name == "aic") return InformationCriterion::aic;
    if (name == "bic") return InformationCriterion::bic;
    if (name == "ric") return InformationCriterion::ric;
    throw std::invalid_argument("unknown information criterion '" + name + "'");
}

std::string to_string(InformationCriterion ic) {
    switch (ic) {
    case InformationCriterion::aic: return "aic";
    case InformationCriterion::bic: return "bic";
    case InformationCriterion::ric: return "ric";
    }
    return "unknown";
}

} // namespace l0em
