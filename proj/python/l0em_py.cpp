#include "l0em/graph.hpp"
#include "l0em/selection.hpp"
#include "l0em/simulate.hpp"
#include "l0em/solver.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace l0em;

namespace {

SolverOptions make_options(double p, double tol, double threshold, int max_iter, bool nonneg) {
    SolverOptions o;
    o.p = p;
    o.tol = tol;
    o.threshold = threshold;
    o.max_iter = max_iter;
    o.nonneg = nonneg;
    o.validate();
    return o;
}

} // namespace

PYBIND11_MODULE(_l0em, m) {
    m.doc() = "L0 / Lp penalized regression by EM fixed-point iteration";

    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("theta", &FitResult::theta)
        .def_readonly("support", &FitResult::support)
        .def_readonly("iterations", &FitResult::iterations)
        .def_readonly("converged", &FitResult::converged)
        .def_readonly("objective", &FitResult::objective)
        .def_readonly("lambda_", &FitResult::lambda)
        .def_readonly("trace", &FitResult::trace)
        .def("__repr__", [](const FitResult& f) {
            return "<FitResult lambda=" + std::to_string(f.lambda) + " nonzeros=" + std::to_string(f.support.size()) +
                   " converged=" + (f.converged ? "True" : "False") + ">";
        });

    m.def(
        "fit",
        [](const Matrix& x, const Vector& y, double lambda, double p, double tol, double threshold, int max_iter,
           bool nonneg) {
            const DesignMatrix X(x);
            check_response(X, y);
            py::gil_scoped_release release;
            return fit_lpem(X, y, lambda, make_options(p, tol, threshold, max_iter, nonneg));
        },
        py::arg("x"), py::arg("y"), py::arg("lam"), py::arg("p") = 0.0, py::arg("tol") = 1e-6,
        py::arg("threshold") = 1e-3, py::arg("max_iter") = 1000, py::arg("nonneg") = false,
        "Fit the penalized model at one lambda (p = 0 is the L0 penalty).");

    m.def(
        "weighted_ridge_solve",
        [](const Matrix& x, const Vector& y, const Vector& w, double lambda) {
            return weighted_ridge_solve(DesignMatrix(x), y, w, lambda);
        },
        py::arg("x"), py::arg("y"), py::arg("w"), py::arg("lam"));

    m.def(
        "objective",
        [](const Matrix& x, const Vector& y, const Vector& theta, double lambda, double p) {
            return objective(DesignMatrix(x), y, theta, lambda, p);
        },
        py::arg("x"), py::arg("y"), py::arg("theta"), py::arg("lam"), py::arg("p") = 0.0);

    m.def(
        "lambda_max", [](const Matrix& x, const Vector& y) { return lambda_max(DesignMatrix(x), y); }, py::arg("x"),
        py::arg("y"));

    m.def(
        "lambda_ic",
        [](const std::string& criterion, Index n, Index m_) { return lambda_ic(parse_criterion(criterion), n, m_); },
        py::arg("criterion"), py::arg("n"), py::arg("m"));

    m.def(
        "cv_select",
        [](const Matrix& x, const Vector& y, int folds, int grid_count, double lambda_min, const std::string& rule,
           std::uint64_t seed, double p) {
            const DesignMatrix X(x);
            check_response(X, y);
            const SolverOptions opts = make_options(p, 1e-6, 1e-3, 1000, false);
            const SelectionRule sel_rule = parse_selection_rule(rule);
            SelectionResult sel;
            FitResult fit;
            {
                py::gil_scoped_release release;
                const LambdaGrid grid =
                    make_grid(X, y, grid_count, lambda_min, p == 0.0 ? PenaltyKind::l0 : PenaltyKind::l1);
                const CvReport rep = cv_mse(X, y, grid, folds, seed, opts);
                sel = select_lambda(rep, sel_rule);
                fit = fit_lpem(X, y, sel.lambda_final, opts);
            }
            return py::make_tuple(sel.lambda_mse, sel.lambda_ss, sel.lambda_final, std::move(fit));
        },
        py::arg("x"), py::arg("y"), py::arg("folds") = 5, py::arg("grid_count") = 100, py::arg("lambda_min") = 1e-4,
        py::arg("rule") = "combined_max", py::arg("seed") = 1, py::arg("p") = 0.0,
        "Cross-validate over a log grid; returns (lambda_mse, lambda_ss, lambda_final, refit).");

    m.def(
        "network",
        [](const Matrix& x, std::optional<double> lambda, const std::string& ic, bool positive_only,
           const std::string& symmetrize_rule) {
            NetworkOptions opts;
            opts.lambda = lambda ? LambdaRule::fixed_value(*lambda) : LambdaRule::ic(parse_criterion(ic));
            opts.positive_only = positive_only;
            opts.rule = parse_symmetrization(symmetrize_rule);
            const DesignMatrix X(x);
            NetworkEstimate est;
            {
                py::gil_scoped_release release;
                est = nodewise_network(X, opts);
            }
            return py::make_tuple(std::move(est.weights), Matrix(est.adjacency.cast<double>()));
        },
        py::arg("x"), py::arg("lam") = py::none(), py::arg("ic") = "bic", py::arg("positive_only") = false,
        py::arg("symmetrize") = "or", "Nodewise network; returns (weights, adjacency as 0/1 floats).");

    m.def(
        "gen_ar1", [](Index n, Index m_, double r, std::uint64_t seed) { return gen_ar1(n, m_, r, seed).data(); },
        py::arg("n"), py::arg("m"), py::arg("r"), py::arg("seed"));

    m.def(
        "gen_response",
        [](const Matrix& x, double noise_sd, std::uint64_t seed) {
            return gen_response(DesignMatrix(x), default_true_beta(), noise_sd, seed);
        },
        py::arg("x"), py::arg("noise_sd") = 1.0, py::arg("seed") = 1,
        "y = 2 x0 - 3 x1 + 4 x4 + noise.");

    m.def(
        "gen_band_network",
        [](const std::string& kind, Index m_, Index n, std::uint64_t seed) {
            BandNetwork net = gen_band_network(parse_band_kind(kind), m_, n, seed);
            return py::make_tuple(net.data.data(), Matrix(net.truth.cast<double>()));
        },
        py::arg("kind"), py::arg("m"), py::arg("n"), py::arg("seed"));
}
