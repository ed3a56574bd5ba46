#pragma once

#include "l0em/linalg.hpp"
#include "l0em/selection.hpp"
#include "l0em/solver.hpp"

#include <optional>
#include <vector>

namespace l0em {

using Adjacency = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

enum class Symmetrization { or_rule, and_rule, max_magnitude };

Symmetrization parse_symmetrization(const std::string& name);
std::string to_string(Symmetrization rule);

/// Per-node regularization: a fixed value or an information criterion
/// evaluated with that regression's n and m - 1.
struct LambdaRule {
    std::optional<double> fixed;
    InformationCriterion criterion = InformationCriterion::bic;

    static LambdaRule fixed_value(double lambda) { return {lambda, InformationCriterion::bic}; }
    static LambdaRule ic(InformationCriterion c) { return {std::nullopt, c}; }
    double resolve(Index n, Index m_neighbors) const;
};

struct NetworkOptions {
    LambdaRule lambda = LambdaRule::ic(InformationCriterion::bic);
    bool positive_only = false;
    Symmetrization rule = Symmetrization::or_rule;
    SolverOptions solver;
    int threads = 1;
};

struct SymmetricNetwork {
    Adjacency adjacency;
    Matrix weights;  ///< symmetric edge weights, zero where no edge
};

struct NetworkEstimate {
    Matrix weights;  ///< row i: coefficients of the regression of x_i on the other columns
    Adjacency adjacency;
    Matrix edge_weights;
    std::vector<double> lambda_used;
    std::vector<Index> failed_nodes;  ///< rows zeroed after a numeric failure
};

/// Combines the two directed estimates of every pair into one undirected edge.
SymmetricNetwork symmetrize(const Matrix& weights, Symmetrization rule);

/// One L0 regression per node; weights(i, j) is the coefficient of x_j for x_i.
NetworkEstimate nodewise_network(const DesignMatrix& X, const NetworkOptions& opts);

struct GraphMetrics {
    double auc = 0.0;
    double fdr = 0.0;  ///< FP / (FP + TP)
    double fnr = 0.0;  ///< FN / (FN + TP)
    double fpr = 0.0;  ///< FP / (FP + TN)
    int true_positive = 0;
    int false_positive = 0;
    int false_negative = 0;
    int true_negative = 0;
    bool auc_undefined = false;  ///< truth has no edges (or no non-edges)
};

/**
 * ROC area over upper-triangle pairs, sweeping a threshold over `scores`
 * from its maximum down to 0. Tied scores enter together; the curve is
 * integrated with the trapezoid rule.
 */
double roc_auc(const Adjacency& truth, const Matrix& scores, bool* undefined = nullptr);

/// FDR/FNR/FPR from the estimate's adjacency; AUC from |edge_weights| unless
/// explicit edge scores are supplied (for example lambda_path_scores).
GraphMetrics graph_metrics(const Adjacency& truth, const NetworkEstimate& estimate,
                           const Matrix* scores = nullptr);

/// Edge score = largest grid lambda at which the symmetrized network still
/// contains the edge (0 if never). Alternative ranking for roc_auc.
Matrix lambda_path_scores(const DesignMatrix& X, const std::vector<double>& lambdas,
                          const NetworkOptions& opts);

} // namespace l0em
