#include "l0em/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace l0em {

using nlohmann::json;

Index CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<Index>(i);
    throw CsvError("column '" + name + "' not found in header", 1);
}

namespace {

// Splits one record; quoted fields may contain commas, doubled quotes and newlines.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    const std::size_t start_line = line + 1;
    char c;
    while (in.get(c)) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\r') {
            if (in.peek() == '\n') in.get(c);
            break;
        } else if (c == '\n') {
            break;
        } else {
            field.push_back(c);
        }
    }
    if (in_quotes) throw CsvError("unterminated quoted field", start_line);
    if (!any) return false;
    ++line;
    fields.push_back(std::move(field));
    return true;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

} // namespace

CsvTable parse_csv(std::istream& in) {
    CsvTable table;
    std::size_t line = 0;
    std::vector<std::string> fields;
    if (!read_record(in, fields, line)) throw CsvError("empty CSV input", 0);
    if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0].erase(0, 3);
    table.header = fields;
    const std::size_t width = fields.size();

    std::vector<double> cells;
    std::size_t rows = 0;
    while (read_record(in, fields, line)) {
        if (fields.size() == 1 && trim(fields[0]).empty()) continue;
        if (fields.size() != width) {
            throw CsvError("expected " + std::to_string(width) + " fields, found " +
                               std::to_string(fields.size()), line);
        }
        for (const auto& raw : fields) {
            const std::string cell = trim(raw);
            double v = 0.0;
            const char* b = cell.data();
            const char* e = b + cell.size();
            if (b != e && *b == '+') ++b;
            const auto res = std::from_chars(b, e, v);
            if (cell.empty() || res.ec != std::errc() || res.ptr != e || !std::isfinite(v)) {
                throw CsvError("cannot parse '" + cell + "' as a finite number", line);
            }
            cells.push_back(v);
        }
        ++rows;
    }
    table.values.resize(static_cast<Index>(rows), static_cast<Index>(width));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < width; ++c)
            table.values(static_cast<Index>(r), static_cast<Index>(c)) = cells[r * width + c];
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError("cannot open '" + path + "'", 0);
    return parse_csv(in);
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Matrix& values) {
    if (static_cast<Index>(header.size()) != values.cols()) {
        throw std::invalid_argument("CSV header width does not match the matrix");
    }
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << quote_if_needed(header[c]);
    out << '\n';
    for (Index r = 0; r < values.rows(); ++r) {
        for (Index c = 0; c < values.cols(); ++c) out << (c ? "," : "") << format_double(values(r, c));
        out << '\n';
    }
}

void write_csv(const std::string& path, const std::vector<std::string>& header, const Matrix& values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write_csv(out, header, values);
}

void write_edge_list(std::ostream& out, const NetworkEstimate& est, const std::vector<std::string>& names) {
    const SymmetricNetwork sym = symmetrize(est.weights, Symmetrization::or_rule);
    const Index m = sym.adjacency.rows();
    auto label = [&](Index i) {
        return names.size() == static_cast<std::size_t>(m) ? quote_if_needed(names[static_cast<std::size_t>(i)])
                                                           : std::to_string(i);
    };
    out << "node_i,node_j,weight\n";
    for (Index i = 0; i < m; ++i)
        for (Index j = i + 1; j < m; ++j)
            if (sym.adjacency(i, j)) out << label(i) << ',' << label(j) << ',' << format_double(sym.weights(i, j)) << '\n';
}

json to_json(const SolverOptions& opts) {
    json j{{"p", opts.p},
           {"tol", opts.tol},
           {"threshold", opts.threshold},
           {"max_iter", opts.max_iter},
           {"nonneg", opts.nonneg},
           {"warm_start", opts.warm_start},
           {"init", opts.init ? "supplied" : "ridge"}};
    return j;
}

json to_json(const FitResult& fit) {
    json coef = json::object();
    for (Index j : fit.support) coef[std::to_string(j)] = fit.theta[j];
    return json{{"lambda", fit.lambda},
                {"coefficients", coef},
                {"support", fit.support},
                {"objective", fit.objective},
                {"iterations", fit.iterations},
                {"converged", fit.converged},
                {"trace", fit.trace}};
}

json to_json(const GraphMetrics& gm) {
    return json{{"auc", gm.auc},
                {"fdr", gm.fdr},
                {"fnr", gm.fnr},
                {"fpr", gm.fpr},
                {"true_positive", gm.true_positive},
                {"false_positive", gm.false_positive},
                {"false_negative", gm.false_negative},
                {"true_negative", gm.true_negative},
                {"auc_undefined", gm.auc_undefined}};
}

json to_json(const Summary& s) { return json{{"mean", s.mean}, {"sd", s.sd}}; }

json to_json(const ExperimentStats& st) {
    const ExperimentSpec& s = st.spec;
    json beta = json::array();
    for (const auto& [j, v] : s.true_beta) beta.push_back({j, v});
    json spec{{"design", "ar1"},   {"n", s.n},
              {"m", s.m},          {"r", s.r},
              {"true_beta", beta}, {"noise_sd", s.noise_sd},
              {"replicates", s.replicates}, {"p", s.p},
              {"rule", to_string(s.rule)},  {"folds", s.folds},
              {"grid_count", s.grid_count}, {"lambda_min", s.lambda_min},
              {"test_size", s.test_size > 0 ? s.test_size : s.n},
              {"seed", s.seed},    {"solver", to_json(s.solver)}};
    json failures = json::array();
    for (const auto& rec : st.records)
        if (!rec.ok) failures.push_back({{"replicate", rec.replicate}, {"error", rec.error}});
    return json{{"spec", spec},
                {"selected", to_json(st.selected)},
                {"test_mse", to_json(st.test_mse)},
                {"cv_mse", to_json(st.cv_mse)},
                {"insample_mse", to_json(st.insample_mse)},
                {"headline_mse", to_json(st.headline_mse)},
                {"bias", to_json(st.bias)},
                {"true_model_count", st.true_model_count},
                {"succeeded", st.succeeded},
                {"failures", failures},
                {"converged", st.converged},
                {"certificate_pass", st.certificate_pass},
                {"contraction_pass", st.contraction_pass}};
}

json to_json(const GraphExperimentStats& st) {
    const GraphExperimentSpec& s = st.spec;
    json lam = s.network.lambda.fixed ? json(*s.network.lambda.fixed) : json(to_string(s.network.lambda.criterion));
    json spec{{"design", to_string(s.kind)}, {"m", s.m}, {"n", s.n},
              {"replicates", s.replicates},  {"lambda_rule", lam},
              {"positive_only", s.network.positive_only},
              {"symmetrization", to_string(s.network.rule)}, {"seed", s.seed}};
    json failures = json::array();
    for (const auto& rec : st.records)
        if (!rec.ok) failures.push_back({{"replicate", rec.replicate}, {"error", rec.error}});
    return json{{"spec", spec},         {"auc", to_json(st.auc)}, {"fdr", to_json(st.fdr)},
                {"fnr", to_json(st.fnr)}, {"fpr", to_json(st.fpr)}, {"edges", to_json(st.edges)},
                {"succeeded", st.succeeded}, {"failures", failures}};
}

void write_replicates_csv(std::ostream& out, const ExperimentStats& st) {
    out << "replicate,ok,lambda,lambda_mse,lambda_ss,selected,test_mse,cv_mse,insample_mse,bias,"
           "exact_recovery,converged,iterations,certificate_ok,contraction_ok,error\n";
    for (const auto& r : st.records) {
        out << r.replicate << ',' << r.ok << ',' << format_double(r.lambda) << ','
            << format_double(r.lambda_mse) << ',' << format_double(r.lambda_ss) << ',' << r.selected << ','
            << format_double(r.test_mse) << ',' << format_double(r.cv_mse) << ','
            << format_double(r.insample_mse) << ',' << format_double(r.bias) << ',' << r.exact_recovery << ','
            << r.converged << ',' << r.iterations << ',' << r.certificate_ok << ',' << r.contraction_ok << ','
            << quote_if_needed(r.error) << '\n';
    }
    out << "summary," << st.succeeded << ",,,," << format_double(st.selected.mean) << ','
        << format_double(st.test_mse.mean) << ',' << format_double(st.cv_mse.mean) << ','
        << format_double(st.insample_mse.mean) << ',' << format_double(st.bias.mean) << ','
        << st.true_model_count << ',' << st.converged << ",," << st.certificate_pass << ','
        << st.contraction_pass << ",failures=" << st.failures << '\n';
}

void write_replicates_csv(std::ostream& out, const GraphExperimentStats& st) {
    out << "replicate,ok,auc,fdr,fnr,fpr,edges,failed_nodes,error\n";
    for (const auto& r : st.records) {
        out << r.replicate << ',' << r.ok << ',' << format_double(r.metrics.auc) << ','
            << format_double(r.metrics.fdr) << ',' << format_double(r.metrics.fnr) << ','
            << format_double(r.metrics.fpr) << ',' << r.edges << ',' << r.failed_nodes << ','
            << quote_if_needed(r.error) << '\n';
    }
    out << "summary," << st.succeeded << ',' << format_double(st.auc.mean) << ',' << format_double(st.fdr.mean)
        << ',' << format_double(st.fnr.mean) << ',' << format_double(st.fpr.mean) << ','
        << format_double(st.edges.mean) << ",,failures=" << st.failures << '\n';
}

} // namespace l0em
