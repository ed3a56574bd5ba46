#include "l0em/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace l0em {

void SolverOptions::validate() const {
    if (!(p >= 0.0 && p <= 2.0)) throw std::invalid_argument("penalty exponent p must lie in [0, 2]");
    if (!(tol > 0.0)) throw std::invalid_argument("iteration tolerance must be positive");
    if (!(threshold > 0.0)) throw std::invalid_argument("final threshold must be positive");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
}

double objective(const DesignMatrix& X, const Vector& y, const Vector& theta, double lambda,
                 double p) {
    check_response(X, y);
    if (theta.size() != X.cols()) throw std::invalid_argument("coefficient length does not match design");
    if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
    const double rss = (y - X.data() * theta).squaredNorm();
    double penalty = 0.0;
    for (Index j = 0; j < theta.size(); ++j) {
        const double a = std::abs(theta[j]);
        if (a == 0.0) continue;
        penalty += p == 0.0 ? 1.0 : std::pow(a, p);
    }
    return 0.5 * rss + 0.5 * lambda * penalty;
}

double lambda_max(const DesignMatrix& X, const Vector& y) {
    check_response(X, y);
    X.require_nonzero_columns();
    const Vector xty = X.data().transpose() * y;
    return (xty.array().square() / (4.0 * X.column_sq_norms().array())).maxCoeff();
}

double lambda_max_l1(const DesignMatrix& X, const Vector& y) {
    check_response(X, y);
    return (X.data().transpose() * y).cwiseAbs().maxCoeff();
}

namespace {

void fill_weights(const Vector& eta, double p, Vector& w) {
    if (p == 0.0) {
        w = eta.array().square();
    } else if (p == 2.0) {
        w.setOnes(eta.size());
    } else {
        w = eta.array().abs().pow(2.0 - p);
    }
}

} // namespace

FitResult fit_lpem(const DesignMatrix& X, const Vector& y, double lambda, const SolverOptions& opts) {
    opts.validate();
    check_response(X, y);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("lambda must be positive and finite");
    }

    FitResult fit;
    fit.lambda = lambda;

    Vector theta;
    if (opts.init) {
        if (opts.init->size() != X.cols()) throw std::invalid_argument("supplied init has wrong length");
        if (!opts.init->allFinite()) throw std::invalid_argument("supplied init is not finite");
        theta = *opts.init;
    } else {
        theta = ridge_init(X, y, lambda);
    }
    if (opts.nonneg) theta = theta.cwiseMax(0.0);
    if (opts.keep_iterates) fit.iterates.push_back(theta);

    Vector eta;
    Vector w;
    for (int it = 1; it <= opts.max_iter; ++it) {
        eta = theta;
        fill_weights(eta, opts.p, w);
        try {
            theta = weighted_ridge_solve(X, y, w, lambda);
        } catch (const NumericError& e) {
            throw NumericError(std::string(e.what()) + " at iteration " + std::to_string(it),
                               e.condition_estimate(), it);
        }
        if (opts.nonneg) theta = theta.cwiseMax(0.0);
        if (!theta.allFinite()) {
            throw NumericError("non-finite iterate at iteration " + std::to_string(it), 0.0, it);
        }
        const double step = (theta - eta).lpNorm<Eigen::Infinity>();
        fit.trace.push_back(step);
        fit.iterations = it;
        if (opts.keep_iterates) fit.iterates.push_back(theta);
        if (step < opts.tol) {
            fit.converged = true;
            break;
        }
    }

    for (Index j = 0; j < theta.size(); ++j) {
        if (std::abs(theta[j]) < opts.threshold) theta[j] = 0.0;
        else fit.support.push_back(j);
    }
    fit.theta = std::move(theta);
    fit.objective = objective(X, y, fit.theta, lambda, opts.p);
    return fit;
}

FitResult fit_l0em(const DesignMatrix& X, const Vector& y, double lambda, const SolverOptions& opts) {
    if (opts.p == 0.0) return fit_lpem(X, y, lambda, opts);
    SolverOptions l0 = opts;
    l0.p = 0.0;
    return fit_lpem(X, y, lambda, l0);
}

Vector stationarity_residual(const DesignMatrix& X, const Vector& y, const Vector& theta,
                             double lambda) {
    check_response(X, y);
    if (theta.size() != X.cols()) throw std::invalid_argument("coefficient length does not match design");
    Vector r = Vector::Zero(theta.size());
    const Vector resid = y - X.data() * theta;
    for (Index j = 0; j < theta.size(); ++j) {
        if (theta[j] == 0.0) continue;
        r[j] = lambda * theta[j] - theta[j] * theta[j] * X.data().col(j).dot(resid);
    }
    return r;
}

double stationarity_bound(const DesignMatrix& X, const Vector& y, const Vector& theta) {
    const double tmax = theta.size() ? theta.lpNorm<Eigen::Infinity>() : 0.0;
    const double rnorm = (y - X.data() * theta).norm();
    return 1e-6 * (1.0 + tmax * tmax * X.column_norms().maxCoeff() * rnorm);
}

bool passes_stationarity_certificate(const DesignMatrix& X, const Vector& y, const Vector& theta,
                                     double lambda) {
    const Vector r = stationarity_residual(X, y, theta, lambda);
    return r.lpNorm<Eigen::Infinity>() <= stationarity_bound(X, y, theta);
}

bool eventually_contracts(const FitResult& fit) {
    if (fit.iterates.size() < 2) {
        if (fit.iterations > 0 && fit.iterates.empty()) {
            throw std::invalid_argument("eventually_contracts needs a fit run with keep_iterates");
        }
        return true;
    }
    const Vector& last = fit.iterates.back();
    const double slack = 1e-12 * (1.0 + last.lpNorm<Eigen::Infinity>());
    const std::size_t count = fit.iterates.size();
    const std::size_t start = count - static_cast<std::size_t>(std::ceil(0.8 * static_cast<double>(count)));
    double prev = (fit.iterates[start] - last).lpNorm<Eigen::Infinity>();
    for (std::size_t r = start + 1; r < count; ++r) {
        const double d = (fit.iterates[r] - last).lpNorm<Eigen::Infinity>();
        if (d > prev + slack) return false;
        prev = d;
    }
    return true;
}

std::vector<FitResult> reg_path(const DesignMatrix& X, const Vector& y,
                                const std::vector<double>& lambdas, const SolverOptions& opts) {
    if (lambdas.empty()) throw std::invalid_argument("lambda grid is empty");
    for (std::size_t i = 1; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > lambdas[i - 1])) throw std::invalid_argument("lambda grid must be strictly ascending");
    }
    std::vector<FitResult> path;
    path.reserve(lambdas.size());
    SolverOptions local = opts;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        try {
            path.push_back(fit_lpem(X, y, lambdas[i], local));
        } catch (const NumericError& e) {
            std::ostringstream msg;
            msg << e.what() << " (lambda index " << i << ", lambda " << lambdas[i] << ")";
            throw NumericError(msg.str(), e.condition_estimate(), e.iteration());
        }
        if (opts.warm_start) local.init = path.back().theta;
    }
    return path;
}

} // namespace l0em
