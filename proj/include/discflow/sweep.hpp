// Peclet sweep driver: builds a design per Peclet value, evaluates the bound
// report (plus the direct solve where resolvable), and emits a reproducible
// CSV. Row failures are recorded, not fatal. Rows run in a small thread pool
// and are emitted in ascending-pe order, so identical configs produce
// byte-identical files.

#pragma once

#include <iosfwd>
#include <string>

#include "discflow/advdiff.hpp"

namespace discflow {

struct SweepConfig {
    std::string source = "constant";
    std::string flow = "branching";  // roll | branching | energy-roll
    Constraint constraint = Constraint::enstrophy;
    std::vector<double> pe = {1e2, 316.22776601683793, 1e3, 3162.2776601683795,
                              1e4, 31622.776601683792, 1e5};
    int nr = 1024;
    int modes = 256;       // base mode count; scaled up to resolve fine layers
    double stretch = 2.0;
    double exact_cap = 1e3;
    int roll_n = 8;        // azimuthal periods for flow=roll
    double roll_taper = 0.0;
    int jobs = 0;          // 0 = hardware concurrency
    std::string out;       // CSV path; empty = stdout

    // Parse key=value lines (# comments); unknown keys are an error.
    void apply_line(const std::string& key, const std::string& value);
};

SweepConfig parse_config_file(const std::string& path);

struct SweepRow {
    double pe = 0.0;
    bool ok = false;
    std::string error;      // row failure, or note about a skipped exact solve
    BoundReport report;
    double wall_seconds = 0.0;  // not serialized (would break reproducibility)
    int grid_modes = 0;
};

struct SweepTable {
    SweepConfig config;
    std::vector<SweepRow> rows;  // ascending pe
};

SweepTable run_sweep(const SweepConfig& config);

void write_csv(const SweepTable& table, std::ostream& os);
std::string to_csv(const SweepTable& table);
SweepTable read_csv(std::istream& is);

struct ScalingFit {
    double raw_slope = 0.0;           // d log(upper) / d log(pe)
    double compensated_spread = 1.0;  // max/min of the compensated value
    double r_squared = 0.0;
};

// Compensation: enstrophy -> value * pe^{2/3} / log^{4/3} pe, energy -> value * pe.
// Requires >= 4 points spanning >= 2 decades.
ScalingFit fit_scaling_values(const std::vector<double>& pe,
                              const std::vector<double>& value, Constraint constraint);
ScalingFit fit_scaling(const SweepTable& table, Constraint constraint);

}  // namespace discflow
