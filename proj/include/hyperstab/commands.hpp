#pragma once

#include "hyperstab/scenario.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hyperstab {

struct CommandOptions {
    std::filesystem::path out_dir = "out";
    bool quiet = false;
    std::optional<FeedbackKind> feedback_override;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct Report {
    std::string scenario;
    int cells = 0;
    double t_opt = 0.0;
    double t_naive = 0.0;
    std::vector<CheckResult> checks;

    bool all_pass() const;
};

/// Kernel, inverse kernel and feedback trace tables of a scenario.
struct Synthesis {
    FredholmKernel kernel;
    InverseKernel inverse;
    std::shared_ptr<const IntegralOperator> op;
};

Synthesis synthesize(const Scenario& sc, const Grid& grid);

/// Writes kernel.csv, inverse_kernel.csv, feedback_trace.csv; prints T_opt and t_F.
Synthesis cmd_synthesize(const Scenario& sc, const CommandOptions& opts, std::ostream& log);

/// Runs the scenario's closed loop; writes trajectory.csv and norms.csv.
Trajectory cmd_simulate(const Scenario& sc, const CommandOptions& opts, std::ostream& log);

/// Runs the scenario-scoped checks; writes report.csv and the backing CSVs.
Report cmd_verify(const Scenario& sc, const CommandOptions& opts, std::ostream& log);

struct SweepRow {
    int cells = 0;
    double kernel_gap = 0.0;
    double commutation = 0.0;
    double vanish_error = 0.0;
};

/// log2(prev/cur) / log2(cur_cells/prev_cells); empty when either value is
/// zero, non-finite, or the two are equal.
std::optional<double> observed_order(double prev, double cur, int prev_cells, int cur_cells);

/// Convergence table over grid sizes; writes sweep.csv.
std::vector<SweepRow> cmd_sweep(const Scenario& sc, const std::vector<int>& grids, const CommandOptions& opts,
                                std::ostream& log);

/// Output directory of one scenario: <out_dir>/<scenario name>.
std::filesystem::path scenario_dir(const Scenario& sc, const CommandOptions& opts);

}  // namespace hyperstab
