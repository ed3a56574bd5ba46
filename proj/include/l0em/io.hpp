#pragma once

#include "l0em/graph.hpp"
#include "l0em/linalg.hpp"
#include "l0em/simulate.hpp"
#include "l0em/solver.hpp"

#include <json.hpp>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace l0em {

/// Malformed CSV input; line() is 1-based, 0 when not tied to a line.
class CsvError : public std::runtime_error {
public:
    CsvError(const std::string& what, std::size_t line)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct CsvTable {
    std::vector<std::string> header;
    Matrix values;  ///< rows = records, columns follow header

    /// Index of a named column; throws CsvError when absent.
    Index column(const std::string& name) const;
};

/// RFC-4180 style: header row, comma separated, optional double quotes,
/// '.' decimal point. Every data cell must parse as a finite number.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Matrix& values);
void write_csv(const std::string& path, const std::vector<std::string>& header, const Matrix& values);

/// node_i,node_j,weight for every upper-triangle or-rule edge.
void write_edge_list(std::ostream& out, const NetworkEstimate& est,
                     const std::vector<std::string>& names = {});

nlohmann::json to_json(const SolverOptions& opts);
nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const GraphMetrics& gm);
nlohmann::json to_json(const Summary& s);
nlohmann::json to_json(const ExperimentStats& st);
nlohmann::json to_json(const GraphExperimentStats& st);

/// Per-replicate rows plus a trailing summary row (replicate = "summary").
void write_replicates_csv(std::ostream& out, const ExperimentStats& st);
void write_replicates_csv(std::ostream& out, const GraphExperimentStats& st);

} // namespace l0em
