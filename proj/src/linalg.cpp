#include "l0em/linalg.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace l0em {

namespace {

// Cholesky rejects kernels whose reciprocal condition estimate falls below this.
constexpr double kMinRcond = 1e-15;

Vector solve_spd(const Matrix& kernel, const Vector& rhs, const char* form_name) {
    Eigen::LLT<Matrix> llt(kernel);
    const double rcond = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
    if (llt.info() != Eigen::Success || !(rcond >= kMinRcond)) {
        std::ostringstream msg;
        msg << "weighted ridge " << form_name << " kernel is singular or ill-conditioned"
            << " (rcond estimate " << rcond << ")";
        throw NumericError(msg.str(), rcond);
    }
    return llt.solve(rhs);
}

} // namespace

DesignMatrix::DesignMatrix(Matrix data) : data_(std::move(data)) {
    if (data_.rows() < 1 || data_.cols() < 1) {
        throw std::invalid_argument("design matrix must have at least one row and one column");
    }
    if (!data_.allFinite()) {
        throw std::invalid_argument("design matrix contains non-finite entries");
    }
    column_sq_norms_ = data_.colwise().squaredNorm().transpose();
    column_norms_ = column_sq_norms_.cwiseSqrt();
    gram_is_primal_ = data_.cols() <= data_.rows();
    if (gram_is_primal_) {
        gram_ = Matrix(data_.cols(), data_.cols());
        gram_.setZero();
        gram_.selfadjointView<Eigen::Lower>().rankUpdate(data_.transpose());
    } else {
        gram_ = Matrix(data_.rows(), data_.rows());
        gram_.setZero();
        gram_.selfadjointView<Eigen::Lower>().rankUpdate(data_);
    }
    gram_ = gram_.selfadjointView<Eigen::Lower>();
}

void DesignMatrix::require_nonzero_columns() const {
    for (Index j = 0; j < cols(); ++j) {
        if (column_sq_norms_[j] == 0.0) {
            throw std::invalid_argument("design column " + std::to_string(j) + " is identically zero");
        }
    }
}

void check_response(const DesignMatrix& X, const Vector& y) {
    if (y.size() != X.rows()) {
        throw std::invalid_argument("response length " + std::to_string(y.size()) +
                                    " does not match design rows " + std::to_string(X.rows()));
    }
    if (!y.allFinite()) {
        throw std::invalid_argument("response contains non-finite entries");
    }
}

Vector weighted_ridge_solve(const DesignMatrix& X, const Vector& y, const Vector& w, double lambda,
                            SolveForm form) {
    check_response(X, y);
    if (w.size() != X.cols()) {
        throw std::invalid_argument("weight vector length does not match design columns");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("ridge penalty must be positive and finite");
    }
    if (!w.allFinite() || (w.array() < 0.0).any()) {
        throw std::invalid_argument("weights must be finite and nonnegative");
    }

    const Index n = X.rows();
    const Index m = X.cols();
    Vector theta = Vector::Zero(m);
    const double w_max = w.maxCoeff();
    if (w_max <= 0.0) {
        return theta;
    }

    const double cutoff = kFrozenWeightRatio * w_max;
    std::vector<Index> active;
    active.reserve(static_cast<std::size_t>(m));
    bool uniform = true;
    for (Index j = 0; j < m; ++j) {
        if (w[j] >= cutoff) {
            active.push_back(j);
            uniform = uniform && w[j] == w_max;
        }
    }
    const Index ma = static_cast<Index>(active.size());
    const bool full = ma == m;

    Vector s(ma);
    for (Index a = 0; a < ma; ++a) s[a] = std::sqrt(w[active[a]]);

    bool use_dual = form == SolveForm::dual || (form == SolveForm::automatic && ma > n);

    if (!use_dual) {
        // (S X_A^t X_A S + lambda I) u = S X_A^t y,  theta_A = S u
        Matrix kernel(ma, ma);
        if (X.gram_is_primal()) {
            const Matrix& g = X.gram();
            for (Index b = 0; b < ma; ++b)
                for (Index a = 0; a < ma; ++a)
                    kernel(a, b) = s[a] * g(active[a], active[b]) * s[b];
        } else {
            Matrix z(n, ma);
            for (Index a = 0; a < ma; ++a) z.col(a) = X.data().col(active[a]) * s[a];
            kernel.setZero();
            kernel.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose());
            kernel = kernel.selfadjointView<Eigen::Lower>();
        }
        kernel.diagonal().array() += lambda;
        Vector rhs(ma);
        for (Index a = 0; a < ma; ++a) rhs[a] = s[a] * X.data().col(active[a]).dot(y);
        const Vector u = solve_spd(kernel, rhs, "primal");
        for (Index a = 0; a < ma; ++a) theta[active[a]] = s[a] * u[a];
        return theta;
    }

    // theta_A = S Z^t (lambda I_n + Z Z^t)^{-1} y with Z = X_A S
    Matrix kernel(n, n);
    Matrix z;
    if (full && uniform && !X.gram_is_primal()) {
        kernel = w_max * X.gram();
    } else {
        z.resize(n, ma);
        for (Index a = 0; a < ma; ++a) z.col(a) = X.data().col(active[a]) * s[a];
        kernel.setZero();
        kernel.selfadjointView<Eigen::Lower>().rankUpdate(z);
        kernel = kernel.selfadjointView<Eigen::Lower>();
    }
    kernel.diagonal().array() += lambda;
    const Vector v = solve_spd(kernel, y, "dual");
    for (Index a = 0; a < ma; ++a) {
        theta[active[a]] = w[active[a]] * X.data().col(active[a]).dot(v);
    }
    return theta;
}

Vector ridge_init(const DesignMatrix& X, const Vector& y, double lambda) {
    return weighted_ridge_solve(X, y, Vector::Ones(X.cols()), lambda);
}

} // namespace l0em
