#include "l0em/metrics.hpp"
#include "l0em/simulate.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace l0em;

TEST(Mse, Basics) {
    const Vector a = oracle::random_vector(7, 1);
    EXPECT_EQ(mse(a, a), 0.0);
    EXPECT_DOUBLE_EQ(mse(Vector{{1.0, 1.0}}, Vector{{0.0, 2.0}}), 1.0);
    EXPECT_THROW(mse(Vector::Ones(2), Vector::Ones(3)), std::invalid_argument);
}

TEST(Mse, NaiveLoopOracle) {
    const Vector a = oracle::random_vector(5000, 2);
    const Vector b = oracle::random_vector(5000, 3);
    double s = 0.0;
    for (Index i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    EXPECT_NEAR(mse(a, b), s / 5000.0, 1e-12);
}

TEST(Bias, NaiveSummation) {
    const Vector a = oracle::random_vector(30, 4);
    const Vector b = oracle::random_vector(30, 5);
    double s = 0.0;
    for (Index j = 0; j < 30; ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
    EXPECT_NEAR(bias(a, b), std::sqrt(s), 1e-12);
}

TEST(Coherence, OrthogonalAndDuplicated) {
    EXPECT_EQ(coherence(DesignMatrix(Matrix::Identity(4, 3))), 0.0);
    Matrix x = oracle::random_matrix(10, 3, 6);
    x.col(2) = -2.0 * x.col(0);
    EXPECT_DOUBLE_EQ(coherence(DesignMatrix(x)), 1.0);
}

TEST(Coherence, Errors) {
    Matrix x = Matrix::Ones(3, 2);
    x.col(1).setZero();
    EXPECT_THROW(coherence(DesignMatrix(x)), std::invalid_argument);
    EXPECT_THROW(coherence(DesignMatrix(Matrix::Ones(3, 1))), std::invalid_argument);
}

TEST(Coherence, Ar1Population) {
    // The largest cosine of an r = 0.6 design is the adjacent-column correlation.
    EXPECT_NEAR(coherence(gen_ar1(10000, 6, 0.6, 7)), 0.6, 0.05);
}

TEST(SupportMetrics, Examples) {
    Vector theta = Vector::Zero(8);
    theta[0] = 2;
    theta[1] = -3;
    theta[4] = 4;
    const SupportMetrics hit = support_metrics(theta, {0, 1, 4});
    EXPECT_TRUE(hit.exact_recovery);
    EXPECT_EQ(hit.true_positive, 3);
    const SupportMetrics empty = support_metrics(Vector::Zero(8), {0, 1, 4});
    EXPECT_EQ(empty.false_negative, 3);
    EXPECT_EQ(empty.false_positive, 0);
    EXPECT_FALSE(empty.exact_recovery);
    EXPECT_THROW(support_metrics(theta, {9}), std::invalid_argument);
}

TEST(SupportMetrics, RandomPairsMatchSetOracle) {
    std::mt19937_64 rng(11);
    std::bernoulli_distribution coin(0.3);
    std::normal_distribution<double> z;
    for (int t = 0; t < 200; ++t) {
        Vector theta = Vector::Zero(20);
        std::set<Index> est, truth;
        std::vector<Index> truth_list;
        for (Index j = 0; j < 20; ++j) {
            if (coin(rng)) {
                theta[j] = z(rng) + 3.0;
                est.insert(j);
            }
            if (coin(rng)) {
                truth.insert(j);
                truth_list.push_back(j);
            }
        }
        std::vector<Index> inter;
        std::set_intersection(est.begin(), est.end(), truth.begin(), truth.end(), std::back_inserter(inter));
        const SupportMetrics sm = support_metrics(theta, truth_list);
        EXPECT_EQ(sm.true_positive, static_cast<int>(inter.size()));
        EXPECT_EQ(sm.false_positive, static_cast<int>(est.size() - inter.size()));
        EXPECT_EQ(sm.false_negative, static_cast<int>(truth.size() - inter.size()));
        EXPECT_EQ(sm.exact_recovery, est == truth);
        // Magnitude invariance.
        const SupportMetrics scaled = support_metrics(theta * 17.0, truth_list);
        EXPECT_EQ(scaled.true_positive, sm.true_positive);
        EXPECT_EQ(scaled.false_positive, sm.false_positive);
    }
}
