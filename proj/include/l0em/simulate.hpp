#pragma once

#include "l0em/graph.hpp"
#include "l0em/linalg.hpp"
#include "l0em/selection.hpp"
#include "l0em/solver.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace l0em {

using Rng = std::mt19937_64;

/// Mixes a base seed with stream identifiers (splitmix64), so every
/// replicate and purpose gets its own reproducible stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// n rows i.i.d. N(0, Sigma), Sigma(i, j) = r^|i - j|.
DesignMatrix gen_ar1(Index n, Index m, double r, std::uint64_t seed);

/// n rows i.i.d. N(0, cov) through the Cholesky factor of cov.
Matrix sample_gaussian(const Matrix& cov, Index n, Rng& rng);

using SparseCoefficients = std::vector<std::pair<Index, double>>;

/// The simulation truth y = 2 x1 - 3 x2 + 4 x5 (zero-based indices 0, 1, 4).
SparseCoefficients default_true_beta();

Vector dense_coefficients(const SparseCoefficients& beta, Index m);

/// y = X theta_true + eps with eps ~ N(0, noise_sd^2); noise_sd = 0 gives X theta_true.
Vector gen_response(const DesignMatrix& X, const SparseCoefficients& beta, double noise_sd,
                    std::uint64_t seed);

enum class BandKind { band1, band2 };

BandKind parse_band_kind(const std::string& name);
std::string to_string(BandKind kind);

struct BandNetwork {
    DesignMatrix data;
    Adjacency truth;
    Matrix covariance;
    Matrix precision;
};

/// Band-1 precision from Sigma(i, j) = 0.6^|i-j|, or a band-2 precision with
/// unit diagonal and off-diagonals -0.25 / -0.4 (shifted by |lambda_min| + 0.1
/// and rescaled to unit diagonal when it is not positive definite).
BandNetwork gen_band_network(BandKind kind, Index m, Index n, std::uint64_t seed);

/// Precision matrix of the band-2 design before sampling.
Matrix band2_precision(Index m);

struct ExperimentSpec {
    Index n = 100;
    Index m = 50;
    double r = 0.0;
    SparseCoefficients true_beta = default_true_beta();
    double noise_sd = 1.0;
    int replicates = 100;
    double p = 0.0;  ///< 0 = L0EM, 1 = L1 through LpEM
    SelectionRule rule = SelectionRule::combined_max;
    int folds = 5;
    int grid_count = 100;
    double lambda_min = 1e-4;
    Index test_size = 0;  ///< fresh test rows; 0 means n
    std::uint64_t seed = 1;
    SolverOptions solver;
    int threads = 1;

    void validate() const;
};

struct ReplicateRecord {
    int replicate = 0;
    bool ok = false;
    std::string error;
    double lambda = 0.0;
    double lambda_mse = 0.0;
    double lambda_ss = 0.0;
    bool stability_exact = true;
    int selected = 0;
    double test_mse = 0.0;
    double cv_mse = 0.0;        ///< fold-averaged CV MSE at the chosen lambda (CV rules)
    double insample_mse = 0.0;
    double bias = 0.0;
    bool exact_recovery = false;
    int true_positive = 0;
    int false_positive = 0;
    int false_negative = 0;
    bool converged = false;
    int iterations = 0;
    bool certificate_ok = true;  ///< stationarity certificate of the final L0 fit
    bool contraction_ok = true;  ///< eventual contraction of the final L0 fit
    int cv_converged_fits = 0;
    int cv_certificate_failures = 0;
    Vector theta;
};

struct Summary {
    double mean = 0.0;
    double sd = 0.0;
};

struct ExperimentStats {
    ExperimentSpec spec;
    std::vector<ReplicateRecord> records;
    Summary selected;
    Summary test_mse;
    Summary cv_mse;
    Summary insample_mse;
    Summary bias;
    /// test MSE for CV rules, in-sample MSE for information criteria
    Summary headline_mse;
    int true_model_count = 0;
    int succeeded = 0;
    int failures = 0;
    int converged = 0;
    int certificate_pass = 0;
    int contraction_pass = 0;
};

Summary summarize(const std::vector<double>& values);

/// Simulates, selects and scores `spec.replicates` data sets.
ExperimentStats run_experiment(const ExperimentSpec& spec);

/// Runs several selection rules on the same replicates, sharing the
/// cross-validation work. One ExperimentStats per rule, in order.
std::vector<ExperimentStats> run_experiment_rules(const ExperimentSpec& spec,
                                                  const std::vector<SelectionRule>& rules);

struct GraphExperimentSpec {
    BandKind kind = BandKind::band1;
    Index m = 100;
    Index n = 100;
    int replicates = 100;
    NetworkOptions network;
    std::uint64_t seed = 1;
    int threads = 1;  ///< replicate-level workers
};

struct GraphReplicateRecord {
    int replicate = 0;
    bool ok = false;
    std::string error;
    GraphMetrics metrics;
    int edges = 0;
    int failed_nodes = 0;
};

struct GraphExperimentStats {
    GraphExperimentSpec spec;
    std::vector<GraphReplicateRecord> records;
    Summary auc;
    Summary fdr;
    Summary fnr;
    Summary fpr;
    Summary edges;
    int succeeded = 0;
    int failures = 0;
};

GraphExperimentStats run_graph_experiment(const GraphExperimentSpec& spec);

} // namespace l0em
