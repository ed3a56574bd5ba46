#include "l0em/graph.hpp"

#include "l0em/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace l0em {

Symmetrization parse_symmetrization(const std::string& name) {
    if (name == "or") return Symmetrization::or_rule;
    if (name == "and") return Symmetrization::and_rule;
    if (name == "max" || name == "max_magnitude") return Symmetrization::max_magnitude;
    throw std::invalid_argument("unknown symmetrization rule '" + name + "'");
}

std::string to_string(Symmetrization rule) {
    switch (rule) {
    case Symmetrization::or_rule: return "or";
    case Symmetrization::and_rule: return "and";
    case Symmetrization::max_magnitude: return "max_magnitude";
    }
    return "unknown";
}

double LambdaRule::resolve(Index n, Index m_neighbors) const {
    if (fixed) {
        if (!(*fixed > 0.0)) throw std::invalid_argument("fixed lambda must be positive");
        return *fixed;
    }
    return lambda_ic(criterion, n, m_neighbors);
}

SymmetricNetwork symmetrize(const Matrix& weights, Symmetrization rule) {
    if (weights.rows() != weights.cols()) throw std::invalid_argument("weights must be square");
    const Index m = weights.rows();
    SymmetricNetwork out{Adjacency::Constant(m, m, false), Matrix::Zero(m, m)};
    for (Index i = 0; i < m; ++i) {
        if (weights(i, i) != 0.0) throw std::invalid_argument("weights must have a zero diagonal");
        for (Index j = i + 1; j < m; ++j) {
            const double a = weights(i, j);
            const double b = weights(j, i);
            bool edge = false;
            double w = 0.0;
            switch (rule) {
            case Symmetrization::or_rule:
                edge = a != 0.0 || b != 0.0;
                w = std::abs(a) >= std::abs(b) ? a : b;
                break;
            case Symmetrization::and_rule:
                edge = a != 0.0 && b != 0.0;
                w = edge ? (std::abs(a) >= std::abs(b) ? a : b) : 0.0;
                break;
            case Symmetrization::max_magnitude:
                edge = a != 0.0 || b != 0.0;
                w = std::abs(a) >= std::abs(b) ? a : b;
                break;
            }
            out.adjacency(i, j) = out.adjacency(j, i) = edge;
            out.weights(i, j) = out.weights(j, i) = edge ? w : 0.0;
        }
    }
    return out;
}

namespace {

Matrix drop_column(const Matrix& x, Index skip) {
    Matrix out(x.rows(), x.cols() - 1);
    if (skip > 0) out.leftCols(skip) = x.leftCols(skip);
    if (skip < x.cols() - 1) out.rightCols(x.cols() - 1 - skip) = x.rightCols(x.cols() - 1 - skip);
    return out;
}

Matrix directed_weights(const DesignMatrix& X, const NetworkOptions& opts, double lambda_override,
                        std::vector<double>& lambda_used, std::vector<Index>& failed) {
    const Index m = X.cols();
    Matrix weights = Matrix::Zero(m, m);
    lambda_used.assign(static_cast<std::size_t>(m), 0.0);
    std::vector<char> fail(static_cast<std::size_t>(m), 0);
    SolverOptions solver = opts.solver;
    solver.nonneg = solver.nonneg || opts.positive_only;
    solver.init.reset();

    parallel_for(static_cast<std::size_t>(m), opts.threads, [&](std::size_t node) {
        const Index i = static_cast<Index>(node);
        const double lambda = lambda_override > 0.0 ? lambda_override : opts.lambda.resolve(X.rows(), m - 1);
        lambda_used[node] = lambda;
        try {
            const DesignMatrix rest(drop_column(X.data(), i));
            const FitResult fit = fit_lpem(rest, X.data().col(i), lambda, solver);
            for (Index j = 0, k = 0; j < m; ++j) {
                if (j == i) continue;
                weights(i, j) = fit.theta[k++];
            }
        } catch (const NumericError&) {
            fail[node] = 1;
        } catch (const std::invalid_argument&) {
            // zero neighbor column: node is left unconnected and flagged
            fail[node] = 1;
        }
    });
    failed.clear();
    for (Index i = 0; i < m; ++i) {
        if (fail[static_cast<std::size_t>(i)]) {
            failed.push_back(i);
            weights.row(i).setZero();
        }
    }
    return weights;
}

} // namespace

NetworkEstimate nodewise_network(const DesignMatrix& X, const NetworkOptions& opts) {
    if (X.cols() < 2) throw std::invalid_argument("network estimation needs at least two variables");
    if (X.rows() < 2) throw std::invalid_argument("network estimation needs at least two samples");
    opts.solver.validate();
    opts.lambda.resolve(X.rows(), X.cols() - 1);

    NetworkEstimate est;
    est.weights = directed_weights(X, opts, 0.0, est.lambda_used, est.failed_nodes);
    SymmetricNetwork sym = symmetrize(est.weights, opts.rule);
    est.adjacency = std::move(sym.adjacency);
    est.edge_weights = std::move(sym.weights);
    return est;
}

double roc_auc(const Adjacency& truth, const Matrix& scores, bool* undefined) {
    if (truth.rows() != truth.cols() || scores.rows() != truth.rows() || scores.cols() != truth.cols()) {
        throw std::invalid_argument("roc_auc: shape mismatch");
    }
    const Index m = truth.rows();
    std::vector<std::pair<double, bool>> items;
    items.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
    long pos = 0, neg = 0;
    for (Index i = 0; i < m; ++i) {
        for (Index j = i + 1; j < m; ++j) {
            items.emplace_back(std::abs(scores(i, j)), truth(i, j));
            truth(i, j) ? ++pos : ++neg;
        }
    }
    if (pos == 0 || neg == 0) {
        if (undefined) *undefined = true;
        return 1.0;
    }
    if (undefined) *undefined = false;
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    double auc = 0.0;
    long tp = 0, fp = 0;
    double prev_tpr = 0.0, prev_fpr = 0.0;
    for (std::size_t k = 0; k < items.size();) {
        const double t = items[k].first;
        while (k < items.size() && items[k].first == t) {
            items[k].second ? ++tp : ++fp;
            ++k;
        }
        const double tpr = static_cast<double>(tp) / static_cast<double>(pos);
        const double fpr = static_cast<double>(fp) / static_cast<double>(neg);
        auc += 0.5 * (fpr - prev_fpr) * (tpr + prev_tpr);
        prev_tpr = tpr;
        prev_fpr = fpr;
    }
    return auc;
}

GraphMetrics graph_metrics(const Adjacency& truth, const NetworkEstimate& estimate, const Matrix* scores) {
    const Index m = truth.rows();
    if (truth.cols() != m || estimate.adjacency.rows() != m || estimate.adjacency.cols() != m) {
        throw std::invalid_argument("graph_metrics: size mismatch");
    }
    for (Index i = 0; i < m; ++i) {
        if (truth(i, i)) throw std::invalid_argument("truth adjacency must have a zero diagonal");
        for (Index j = i + 1; j < m; ++j) {
            if (truth(i, j) != truth(j, i)) throw std::invalid_argument("truth adjacency must be symmetric");
        }
    }
    GraphMetrics gm;
    for (Index i = 0; i < m; ++i) {
        for (Index j = i + 1; j < m; ++j) {
            const bool t = truth(i, j);
            const bool e = estimate.adjacency(i, j);
            if (t && e) ++gm.true_positive;
            else if (e) ++gm.false_positive;
            else if (t) ++gm.false_negative;
            else ++gm.true_negative;
        }
    }
    auto ratio = [](int a, int b) { return a + b == 0 ? 0.0 : static_cast<double>(a) / (a + b); };
    gm.fdr = ratio(gm.false_positive, gm.true_positive);
    gm.fnr = ratio(gm.false_negative, gm.true_positive);
    gm.fpr = ratio(gm.false_positive, gm.true_negative);
    gm.auc = roc_auc(truth, scores ? *scores : estimate.edge_weights, &gm.auc_undefined);
    return gm;
}

Matrix lambda_path_scores(const DesignMatrix& X, const std::vector<double>& lambdas,
                          const NetworkOptions& opts) {
    if (lambdas.empty()) throw std::invalid_argument("lambda grid is empty");
    const Index m = X.cols();
    Matrix scores = Matrix::Zero(m, m);
    std::vector<double> used;
    std::vector<Index> failed;
    for (double lambda : lambdas) {
        if (!(lambda > 0.0)) throw std::invalid_argument("lambda grid values must be positive");
        const Matrix w = directed_weights(X, opts, lambda, used, failed);
        const SymmetricNetwork sym = symmetrize(w, opts.rule);
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < m; ++j)
                if (sym.adjacency(i, j)) scores(i, j) = std::max(scores(i, j), lambda);
    }
    return scores;
}

} // namespace l0em
