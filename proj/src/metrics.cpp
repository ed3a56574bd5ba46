#include "l0em/metrics.hpp"

#include <cmath>

namespace l0em {

double mse(const Vector& y_true, const Vector& y_pred) {
    if (y_true.size() != y_pred.size()) throw std::invalid_argument("mse: length mismatch");
    if (y_true.size() == 0) throw std::invalid_argument("mse: empty input");
    return (y_true - y_pred).squaredNorm() / static_cast<double>(y_true.size());
}

double bias(const Vector& theta_hat, const Vector& theta_true) {
    if (theta_hat.size() != theta_true.size()) throw std::invalid_argument("bias: length mismatch");
    return (theta_hat - theta_true).norm();
}

double coherence(const DesignMatrix& X) {
    if (X.cols() < 2) throw std::invalid_argument("coherence needs at least two columns");
    X.require_nonzero_columns();
    Matrix g;
    if (X.gram_is_primal()) {
        g = X.gram();
    } else {
        g = X.data().transpose() * X.data();
    }
    const Vector& norms = X.column_norms();
    double mu = 0.0;
    for (Index j = 1; j < X.cols(); ++j) {
        for (Index i = 0; i < j; ++i) {
            mu = std::max(mu, std::abs(g(i, j)) / (norms[i] * norms[j]));
        }
    }
    // rounding can push a duplicated column a hair above 1
    return std::min(mu, 1.0);
}

SupportMetrics support_metrics(const Vector& theta_hat, const std::vector<Index>& true_support) {
    std::vector<char> truth(static_cast<std::size_t>(theta_hat.size()), 0);
    for (Index j : true_support) {
        if (j < 0 || j >= theta_hat.size()) throw std::invalid_argument("true support index out of range");
        truth[static_cast<std::size_t>(j)] = 1;
    }
    SupportMetrics sm;
    for (Index j = 0; j < theta_hat.size(); ++j) {
        const bool est = theta_hat[j] != 0.0;
        const bool tru = truth[static_cast<std::size_t>(j)] != 0;
        if (est && tru) ++sm.true_positive;
        else if (est) ++sm.false_positive;
        else if (tru) ++sm.false_negative;
    }
    sm.exact_recovery = sm.false_positive == 0 && sm.false_negative == 0;
    return sm;
}

} // namespace l0em
