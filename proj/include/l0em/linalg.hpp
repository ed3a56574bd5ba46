#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace l0em {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when a numerical kernel cannot produce a trustworthy result
/// (failed factorization, non-finite iterate). Argument problems use
/// std::invalid_argument instead.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what, double condition_estimate = 0.0,
                          int iteration = -1)
        : std::runtime_error(what), condition_estimate_(condition_estimate),
          iteration_(iteration) {}

    /// Reciprocal condition estimate of the failing kernel, 0 if not applicable.
    double condition_estimate() const noexcept { return condition_estimate_; }
    /// Iteration index at which the failure occurred, -1 if not applicable.
    int iteration() const noexcept { return iteration_; }

private:
    double condition_estimate_;
    int iteration_;
};

/**
 * n x m observation matrix (row = sample, column = feature).
 *
 * Immutable after construction. The constructor validates that every entry
 * is finite and caches the column norms plus the smaller of the two Gram
 * matrices (X^t X when m <= n, X X^t otherwise), which the ridge solves reuse
 * across regularization values.
 */
class DesignMatrix {
public:
    explicit DesignMatrix(Matrix data);

    const Matrix& data() const noexcept { return data_; }
    Index rows() const noexcept { return data_.rows(); }
    Index cols() const noexcept { return data_.cols(); }

    const Vector& column_norms() const noexcept { return column_norms_; }
    const Vector& column_sq_norms() const noexcept { return column_sq_norms_; }

    /// True when gram() holds X^t X (m x m); otherwise it holds X X^t (n x n).
    bool gram_is_primal() const noexcept { return gram_is_primal_; }
    const Matrix& gram() const noexcept { return gram_; }

    /// Throws std::invalid_argument naming the first zero column, if any.
    void require_nonzero_columns() const;

private:
    Matrix data_;
    Vector column_norms_;
    Vector column_sq_norms_;
    Matrix gram_;
    bool gram_is_primal_ = true;
};

/// Throws std::invalid_argument unless y has X.rows() finite entries.
void check_response(const DesignMatrix& X, const Vector& y);

enum class SolveForm { automatic, primal, dual };

/// Weights below this fraction of the largest weight freeze their coefficient at zero.
inline constexpr double kFrozenWeightRatio = 1e-14;

/**
 * Solves (diag(w) X^t X + lambda I) theta = diag(w) X^t y.
 *
 * Columns whose weight is below kFrozenWeightRatio * max(w) get theta_j = 0
 * exactly and are dropped from the factorization. The remaining system is
 * symmetrized through w^{1/2} scaling and solved by Cholesky either in the
 * m_active x m_active primal form or the n x n dual form
 * (lambda I + X W X^t)^{-1}; `automatic` picks the dual when m_active > n.
 */
Vector weighted_ridge_solve(const DesignMatrix& X, const Vector& y, const Vector& w, double lambda,
                            SolveForm form = SolveForm::automatic);

/// Plain ridge estimate (X^t X + lambda I)^{-1} X^t y; the all-ones-weight solve.
Vector ridge_init(const DesignMatrix& X, const Vector& y, double lambda);

} // namespace l0em
