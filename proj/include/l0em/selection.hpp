#pragma once

#include "l0em/linalg.hpp"
#include "l0em/solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace l0em {

/// Strictly ascending positive regularization values.
class LambdaGrid {
public:
    /// `count` values log-spaced between lo and hi, endpoints included exactly.
    static LambdaGrid log_spaced(double lo, double hi, int count);
    static LambdaGrid explicit_values(std::vector<double> values);

    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

private:
    explicit LambdaGrid(std::vector<double> values);
    std::vector<double> values_;
};

enum class PenaltyKind { l0, l1 };

/// Log grid from lambda_min up to lambda_max (L0) or max|X^t y| (L1).
LambdaGrid make_grid(const DesignMatrix& X, const Vector& y, int count = 100,
                     double lambda_min = 1e-4, PenaltyKind kind = PenaltyKind::l0);

struct CvRow {
    double lambda = 0.0;
    double mse_mean = 0.0;
    double mse_sd = 0.0;
    double nnz_mean = 0.0;
    double nnz_sd = 0.0;
    bool valid = true;  ///< false when any fold fit failed numerically
};

struct CvReport {
    std::vector<CvRow> rows;  ///< one per grid value, ascending lambda
    int k = 0;
    std::uint64_t seed = 0;
    std::vector<int> fold_of_row;            ///< fold index for every observation
    std::vector<std::vector<double>> fold_mse;  ///< [lambda][fold], NaN when invalid
    std::vector<std::vector<int>> fold_nnz;     ///< [lambda][fold], -1 when invalid
    /// Converged fold fits that failed the L0 stationarity certificate (p = 0 only).
    int certificate_failures = 0;
    int converged_fits = 0;
};

/// Seeded, size-balanced assignment of n rows to k folds.
std::vector<int> assign_folds(Index n, int k, std::uint64_t seed);

/**
 * k-fold cross-validation over a lambda grid. For every (lambda, fold) cell
 * the model is fit on the other k-1 folds and scored on the held-out one
 * (MSE with the held-out size as denominator, plus the nonzero count).
 * Cells run on up to `threads` workers; the report does not depend on it.
 */
CvReport cv_mse(const DesignMatrix& X, const Vector& y, const LambdaGrid& grid, int k,
                std::uint64_t seed, const SolverOptions& opts, int threads = 1);

struct StabilityPick {
    double lambda = 0.0;
    std::size_t index = 0;
    bool exact_zero = true;  ///< false when no row reached nonzero-count SD of exactly 0
};

/// Smallest lambda whose fold nonzero counts agree exactly; falls back to the
/// minimum SD (ties to the larger lambda) when no row agrees.
StabilityPick lambda_stability(const CvReport& report);

enum class SelectionRule { cv_mse, stability, combined_max, aic, bic, ric };
enum class InformationCriterion { aic, bic, ric };

SelectionRule parse_selection_rule(const std::string& name);
std::string to_string(SelectionRule rule);
InformationCriterion parse_criterion(const std::string& name);
std::string to_string(InformationCriterion ic);

struct SelectionResult {
    double lambda_mse = 0.0;
    double lambda_ss = 0.0;
    double lambda_final = 0.0;
    SelectionRule rule = SelectionRule::combined_max;
    bool stability_exact = true;
};

/// Grid lambda minimizing mean test MSE over valid rows (ties to the larger lambda).
double lambda_min_mse(const CvReport& report);

/// Applies a cross-validation rule to a report; IC rules are rejected here.
SelectionResult select_lambda(const CvReport& report, SelectionRule rule);

/// Closed-form lambda: 2 (AIC), ln n (BIC), 2 ln m (RIC).
double lambda_ic(InformationCriterion criterion, Index n, Index m);

} // namespace l0em
