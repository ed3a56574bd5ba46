#pragma once

#include "l0em/linalg.hpp"

#include <vector>

namespace l0em {

struct SupportMetrics {
    int true_positive = 0;
    int false_positive = 0;
    int false_negative = 0;
    bool exact_recovery = false;
};

/// Mean squared difference sum (y_i - yhat_i)^2 / n.
double mse(const Vector& y_true, const Vector& y_pred);

/// Euclidean distance ||theta_hat - theta_true|| over all coordinates.
double bias(const Vector& theta_hat, const Vector& theta_true);

/// Largest absolute cosine between two distinct columns of X.
double coherence(const DesignMatrix& X);

/// Compares the nonzero set of theta_hat with a list of true indices.
SupportMetrics support_metrics(const Vector& theta_hat, const std::vector<Index>& true_support);

} // namespace l0em
