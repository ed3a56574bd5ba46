#pragma once

#include "l0em/linalg.hpp"

#include <optional>
#include <vector>

namespace l0em {

struct SolverOptions {
    double p = 0.0;           ///< penalty exponent in [0, 2]; 0 is the L0 count
    double tol = 1e-6;        ///< stop once ||theta - eta||_inf < tol
    double threshold = 1e-3;  ///< final hard zeroing of |theta| < threshold
    int max_iter = 1000;
    bool nonneg = false;      ///< clamp negative coefficients to zero after every M-step
    /// Starting point; ridge estimate at the same lambda when empty.
    std::optional<Vector> init;
    /// Chain the previous solution as init along a regularization path.
    bool warm_start = false;
    /// Record every iterate in FitResult::iterates (diagnostics only).
    bool keep_iterates = false;

    void validate() const;
};

struct FitResult {
    Vector theta;               ///< post-threshold coefficients
    std::vector<Index> support; ///< indices with theta_j != 0, ascending
    int iterations = 0;         ///< number of M-steps performed
    bool converged = false;
    double objective = 0.0;     ///< penalized objective at theta
    double lambda = 0.0;
    std::vector<double> trace;  ///< ||theta - eta||_inf after each M-step
    /// theta^0 (init) through the last pre-threshold iterate; filled only on request.
    std::vector<Vector> iterates;
};

/// 0.5 ||y - X theta||^2 + (lambda / 2) sum_j |theta_j|^p, with 0^0 taken as 0.
double objective(const DesignMatrix& X, const Vector& y, const Vector& theta, double lambda,
                 double p);

/// max_j (x_j^t y)^2 / (4 x_j^t x_j). Above it the orthogonal-design L0 solution is zero.
double lambda_max(const DesignMatrix& X, const Vector& y);

/// max_j |x_j^t y|, the grid ceiling used for the L1 comparison runs.
double lambda_max_l1(const DesignMatrix& X, const Vector& y);

/// EM fixed-point iteration for the L0 penalty (opts.p is ignored and taken as 0).
FitResult fit_l0em(const DesignMatrix& X, const Vector& y, double lambda,
                   const SolverOptions& opts = {});

/// Same loop with M-step weights |eta|^(2-p), p in [0, 2].
FitResult fit_lpem(const DesignMatrix& X, const Vector& y, double lambda,
                   const SolverOptions& opts);

/// r_j = lambda theta_j - theta_j^2 x_j^t (y - X theta); zero at an L0 fixed point.
Vector stationarity_residual(const DesignMatrix& X, const Vector& y, const Vector& theta,
                             double lambda);

/// Tolerance 1e-6 (1 + ||theta||_inf^2 max_j ||x_j|| ||y - X theta||) for the residual above.
double stationarity_bound(const DesignMatrix& X, const Vector& y, const Vector& theta);

/// Whether ||stationarity_residual||_inf is within stationarity_bound.
bool passes_stationarity_certificate(const DesignMatrix& X, const Vector& y, const Vector& theta,
                                     double lambda);

/**
 * Checks that ||theta^r - theta*||_inf is non-increasing over the final 80% of
 * the recorded iterates, theta* being the last one. Requires a fit run with
 * keep_iterates. Increases up to 1e-12 (1 + ||theta*||_inf) are treated as
 * rounding noise.
 */
bool eventually_contracts(const FitResult& fit);

/// One independent fit per grid value (ascending). Numeric failures are
/// rethrown with the offending lambda index in the message.
std::vector<FitResult> reg_path(const DesignMatrix& X, const Vector& y,
                                const std::vector<double>& lambdas, const SolverOptions& opts);

} // namespace l0em
