#include "l0em/selection.hpp"
#include "l0em/simulate.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace l0em;

namespace {

CvReport report_with_sds(const std::vector<double>& lambdas, const std::vector<double>& nnz_sd,
                         const std::vector<double>& mse) {
    CvReport rep;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        CvRow row;
        row.lambda = lambdas[i];
        row.nnz_sd = nnz_sd[i];
        row.mse_mean = mse[i];
        rep.rows.push_back(row);
    }
    return rep;
}

} // namespace

TEST(LambdaGrid, TwoValues) {
    const auto g = LambdaGrid::log_spaced(0.01, 5.0, 2);
    ASSERT_EQ(g.size(), 2U);
    EXPECT_EQ(g[0], 0.01);
    EXPECT_EQ(g[1], 5.0);
}

TEST(LambdaGrid, GeometricMidpoint) {
    const auto g = LambdaGrid::log_spaced(0.01, 1.0, 3);
    EXPECT_EQ(g[0], 0.01);
    EXPECT_NEAR(g[1], 0.1, 1e-15);
    EXPECT_EQ(g[2], 1.0);
}

TEST(LambdaGrid, Validation) {
    EXPECT_THROW(LambdaGrid::log_spaced(1.0, 1.0, 5), std::invalid_argument);
    EXPECT_THROW(LambdaGrid::log_spaced(0.0, 1.0, 5), std::invalid_argument);
    EXPECT_THROW(LambdaGrid::log_spaced(0.1, 1.0, 1), std::invalid_argument);
    EXPECT_THROW(LambdaGrid::explicit_values({1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(LambdaGrid::explicit_values({-1.0, 1.0}), std::invalid_argument);
    EXPECT_NO_THROW(LambdaGrid::explicit_values({0.5, 2.0}));
}

TEST(MakeGrid, DefaultProtocol) {
    const DesignMatrix X = gen_ar1(100, 50, 0.0, 1);
    const Vector y = gen_response(X, default_true_beta(), 1.0, 2);
    const LambdaGrid g = make_grid(X, y);
    ASSERT_EQ(g.size(), 100U);
    EXPECT_EQ(g[0], 1e-4);
    EXPECT_EQ(g[99], lambda_max(X, y));
    for (std::size_t i = 1; i + 1 < g.size(); ++i)
        EXPECT_NEAR(std::log(g[i + 1] / g[i]), std::log(g[1] / g[0]), 1e-12);
    EXPECT_EQ(make_grid(X, y, 10, 1e-4, PenaltyKind::l1)[9], lambda_max_l1(X, y));
}

TEST(MakeGrid, MinimumAboveMaximumRejected) {
    const DesignMatrix X(Matrix::Identity(3, 3));
    EXPECT_THROW(make_grid(X, Vector{{0.01, 0.01, 0.01}}, 10, 1e-4), std::invalid_argument);
}

TEST(AssignFolds, BalancedAndSeeded) {
    const auto a = assign_folds(23, 5, 7);
    const auto b = assign_folds(23, 5, 7);
    EXPECT_EQ(a, b);
    std::vector<int> counts(5, 0);
    for (int f : a) ++counts[static_cast<std::size_t>(f)];
    EXPECT_EQ(*std::max_element(counts.begin(), counts.end()) - *std::min_element(counts.begin(), counts.end()), 1);
    EXPECT_NE(a, assign_folds(23, 5, 8));
}

TEST(CvMse, AboveLambdaMaxOrthogonal) {
    Eigen::HouseholderQR<Matrix> qr(oracle::random_matrix(40, 4, 3));
    const Matrix q = qr.householderQ() * Matrix::Identity(40, 4);
    const DesignMatrix X(q);
    const Vector y = oracle::random_vector(40, 4);
    // Fold subsets of orthonormal columns are not orthonormal, so go well above lambda_max.
    const auto grid = LambdaGrid::explicit_values({lambda_max(X, y) * 100.0});
    const CvReport rep = cv_mse(X, y, grid, 5, 11, {});
    EXPECT_EQ(rep.rows[0].nnz_mean, 0.0);
    EXPECT_EQ(rep.rows[0].nnz_sd, 0.0);
    double expect = 0.0;
    for (int f = 0; f < 5; ++f) {
        double s = 0.0;
        int cnt = 0;
        for (Index i = 0; i < 40; ++i)
            if (rep.fold_of_row[static_cast<std::size_t>(i)] == f) s += y[i] * y[i], ++cnt;
        expect += s / cnt / 5.0;
    }
    EXPECT_NEAR(rep.rows[0].mse_mean, expect, 1e-12);
}

TEST(CvMse, LeaveOneOutMatchesRidgeShortcut) {
    // With p = 2 the fit is plain ridge, so k = n CV equals the LOO hat-matrix formula.
    const Matrix x = oracle::random_matrix(10, 3, 5);
    const Vector y = x * Vector{{1.0, -2.0, 0.5}} + 0.1 * oracle::random_vector(10, 6);
    SolverOptions opts;
    opts.p = 2.0;
    opts.threshold = 1e-300;
    const double lambda = 1e-6;
    const CvReport rep = cv_mse(DesignMatrix(x), y, LambdaGrid::explicit_values({lambda}), 10, 1, opts);
    EXPECT_NEAR(rep.rows[0].mse_mean, oracle::loo_ridge_mse(x, y, lambda), 1e-9);
    EXPECT_LT(rep.rows[0].mse_mean, 0.1);
}

TEST(CvMse, ReportShapeAndDeterminism) {
    const DesignMatrix X = gen_ar1(60, 20, 0.3, 7);
    const Vector y = gen_response(X, default_true_beta(), 1.0, 8);
    const LambdaGrid grid = make_grid(X, y, 12);
    const CvReport a = cv_mse(X, y, grid, 5, 99, {});
    const CvReport b = cv_mse(X, y, grid, 5, 99, {}, 3);
    ASSERT_EQ(a.rows.size(), 12U);
    EXPECT_EQ(a.k, 5);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].lambda, grid[i]);
        EXPECT_EQ(a.rows[i].mse_mean, b.rows[i].mse_mean);
        EXPECT_EQ(a.rows[i].nnz_sd, b.rows[i].nnz_sd);
        EXPECT_GE(a.rows[i].mse_sd, 0.0);
        EXPECT_GE(a.rows[i].nnz_sd, 0.0);
        const auto& counts = a.fold_nnz[i];
        const bool agree = std::all_of(counts.begin(), counts.end(), [&](int c) { return c == counts[0]; });
        EXPECT_EQ(agree, a.rows[i].nnz_sd == 0.0);
    }
    EXPECT_EQ(a.fold_of_row, b.fold_of_row);
}

TEST(CvMse, ArgumentErrors) {
    const DesignMatrix X(oracle::random_matrix(4, 2, 9));
    const auto grid = LambdaGrid::explicit_values({1.0});
    EXPECT_THROW(cv_mse(X, Vector::Ones(4), grid, 1, 0, {}), std::invalid_argument);
    EXPECT_THROW(cv_mse(X, Vector::Ones(4), grid, 5, 0, {}), std::invalid_argument);
}

TEST(LambdaStability, AllZeroPicksSmallest) {
    const auto rep = report_with_sds({0.1, 0.2, 0.3}, {0, 0, 0}, {1, 1, 1});
    const StabilityPick pick = lambda_stability(rep);
    EXPECT_EQ(pick.lambda, 0.1);
    EXPECT_TRUE(pick.exact_zero);
}

TEST(LambdaStability, FirstExactZero) {
    const auto rep = report_with_sds({1, 2, 3, 4}, {2, 1, 0, 0}, {1, 1, 1, 1});
    EXPECT_EQ(lambda_stability(rep).lambda, 3.0);
    EXPECT_EQ(lambda_stability(rep).index, 2U);
}

TEST(LambdaStability, FallbackToMinimumSd) {
    const auto rep = report_with_sds({1, 2, 3, 4}, {2, 0.5, 1, 0.5}, {1, 1, 1, 1});
    const StabilityPick pick = lambda_stability(rep);
    EXPECT_FALSE(pick.exact_zero);
    EXPECT_EQ(pick.lambda, 4.0);
}

TEST(LambdaStability, SkipsInvalidRows) {
    auto rep = report_with_sds({1, 2, 3}, {0, 1, 0}, {1, 1, 1});
    rep.rows[0].valid = false;
    EXPECT_EQ(lambda_stability(rep).lambda, 3.0);
}

TEST(SelectLambda, Rules) {
    const auto rep = report_with_sds({1, 2, 3, 4}, {1, 0, 0, 0}, {0.9, 0.8, 0.7, 1.2});
    const SelectionResult mse = select_lambda(rep, SelectionRule::cv_mse);
    EXPECT_EQ(mse.lambda_final, 3.0);
    const SelectionResult ss = select_lambda(rep, SelectionRule::stability);
    EXPECT_EQ(ss.lambda_final, 2.0);
    const SelectionResult both = select_lambda(rep, SelectionRule::combined_max);
    EXPECT_EQ(both.lambda_final, 3.0);
    EXPECT_GE(both.lambda_final, both.lambda_mse);
    EXPECT_GE(both.lambda_final, both.lambda_ss);
    EXPECT_THROW(select_lambda(rep, SelectionRule::bic), std::invalid_argument);
}

TEST(SelectLambda, EqualLambdas) {
    const auto rep = report_with_sds({1, 2, 3}, {1, 0, 0}, {0.9, 0.5, 0.7});
    const SelectionResult r = select_lambda(rep, SelectionRule::combined_max);
    EXPECT_EQ(r.lambda_mse, 2.0);
    EXPECT_EQ(r.lambda_ss, 2.0);
    EXPECT_EQ(r.lambda_final, 2.0);
}

TEST(SelectLambda, StabilityAboveMse) {
    const auto rep = report_with_sds({1, 2, 3}, {1, 1, 0}, {0.5, 0.6, 0.7});
    const SelectionResult r = select_lambda(rep, SelectionRule::combined_max);
    EXPECT_EQ(r.lambda_mse, 1.0);
    EXPECT_EQ(r.lambda_final, 3.0);
}

TEST(LambdaMinMse, TieGoesToLargerLambda) {
    const auto rep = report_with_sds({1, 2, 3}, {0, 0, 0}, {0.5, 0.5, 0.9});
    EXPECT_EQ(lambda_min_mse(rep), 2.0);
}

TEST(LambdaIc, ClosedForms) {
    EXPECT_EQ(lambda_ic(InformationCriterion::aic, 100, 1000), 2.0);
    EXPECT_NEAR(lambda_ic(InformationCriterion::bic, 100, 5), 4.605170185988091, 1e-12);
    EXPECT_NEAR(lambda_ic(InformationCriterion::ric, 100, 1000), 13.815510557964274, 1e-12);
    for (Index n = 8; n < 2000; n += 37)
        EXPECT_GT(lambda_ic(InformationCriterion::bic, n, 3), lambda_ic(InformationCriterion::aic, n, 3));
    EXPECT_THROW(lambda_ic(InformationCriterion::bic, 1, 3), std::invalid_argument);
}

TEST(RuleNames, RoundTrip) {
    for (auto r : {SelectionRule::cv_mse, SelectionRule::stability, SelectionRule::combined_max, SelectionRule::aic,
                   SelectionRule::bic, SelectionRule::ric})
        EXPECT_EQ(parse_selection_rule(to_string(r)), r);
    for (auto c : {InformationCriterion::aic, InformationCriterion::bic, InformationCriterion::ric})
        EXPECT_EQ(parse_criterion(to_string(c)), c);
    EXPECT_THROW(parse_selection_rule("nope"), std::invalid_argument);
}
