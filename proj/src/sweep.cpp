#include "discflow/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace discflow {

namespace {

std::vector<double> parse_pe_list(const std::string& s) {
    std::vector<double> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    if (out.empty()) throw std::invalid_argument("empty pe list");
    return out;
}

std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void SweepConfig::apply_line(const std::string& key, const std::string& value) {
    if (key == "source")
        source = value;
    else if (key == "flow")
        flow = value;
    else if (key == "constraint")
        constraint = constraint_from_string(value);
    else if (key == "pe")
        pe = parse_pe_list(value);
    else if (key == "nr")
        nr = std::stoi(value);
    else if (key == "modes")
        modes = std::stoi(value);
    else if (key == "stretch")
        stretch = std::stod(value);
    else if (key == "exact-cap" || key == "exact_cap")
        exact_cap = std::stod(value);
    else if (key == "roll-n" || key == "roll_n")
        roll_n = std::stoi(value);
    else if (key == "roll-taper" || key == "roll_taper")
        roll_taper = std::stod(value);
    else if (key == "jobs")
        jobs = std::stoi(value);
    else if (key == "out")
        out = value;
    else
        throw std::invalid_argument("unknown config key '" + key + "'");
}

SweepConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    SweepConfig cfg;
    std::string line;
    std::vector<std::string> unknown;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto strip = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line without '=': " + line);
        try {
            cfg.apply_line(strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
        } catch (const std::invalid_argument& e) {
            unknown.push_back(e.what());
        }
    }
    if (!unknown.empty()) {
        std::string msg = "config errors:";
        for (const auto& u : unknown) msg += "\n  " + u;
        throw std::invalid_argument(msg);
    }
    return cfg;
}

namespace {

// Layer-resolving mode count for one row.
int row_modes(const SweepConfig& cfg, double pe) {
    long finest = cfg.roll_n;
    if (cfg.flow == "branching") {
        finest = branching_plan(pe).inv_l.back();
    } else if (cfg.flow == "energy-roll") {
        finest = std::lround(std::sqrt(pe));
    }
    return std::max<long>(cfg.modes, 8 * finest);
}

SweepRow compute_row(const SweepConfig& cfg, double pe) {
    SweepRow row;
    row.pe = pe;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const int modes = row_modes(cfg, pe);
        row.grid_modes = modes;
        PolarGrid grid(cfg.nr, modes, cfg.stretch);
        Source source = make_source(cfg.source, grid);
        PoissonSolver solver(grid);

        FlowDesign design = [&] {
            if (cfg.flow == "roll") return roll_flow(source, cfg.roll_n, cfg.roll_taper);
            if (cfg.flow == "branching")
                return branching_flow(source, branching_plan(pe));
            if (cfg.flow == "energy-roll") return energy_roll_design(source, pe);
            throw std::invalid_argument("unknown flow '" + cfg.flow + "'");
        }();

        row.report = upper_bound(design, source, pe, cfg.constraint, solver);
        const auto lb = lower_bound_certify(design, source, pe, cfg.constraint, solver);
        row.report.lower = lb.lower;
        row.report.delta_star = lb.delta_star;

        if (pe <= cfg.exact_cap) {
            try {
                const auto sol = solve_steady(design, source, pe, cfg.constraint, solver);
                row.report.exact = sol.cooling;
            } catch (const std::exception& e) {
                row.error = std::string("exact solve skipped: ") + e.what();
            }
        }
        row.ok = true;
    } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
    }
    row.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

}  // namespace

SweepTable run_sweep(const SweepConfig& config) {
    if (config.flow != "roll" && config.flow != "branching" &&
        config.flow != "energy-roll")
        throw std::invalid_argument("run_sweep: unknown flow '" + config.flow + "'");
    SweepTable table;
    table.config = config;
    std::vector<double> pes = config.pe;
    std::sort(pes.begin(), pes.end());
    table.rows.resize(pes.size());

    int jobs = config.jobs > 0
                   ? config.jobs
                   : static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::max(1, std::min<int>(jobs, static_cast<int>(pes.size())));

    std::atomic<size_t> next{0};
    auto worker = [&] {
        while (true) {
            const size_t k = next.fetch_add(1);
            if (k >= pes.size()) break;
            table.rows[k] = compute_row(config, pes[k]);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return table;
}

void write_csv(const SweepTable& table, std::ostream& os) {
    const auto& cfg = table.config;
    os << "# discflow sweep\n";
    os << "# source=" << cfg.source << "\n";
    os << "# flow=" << cfg.flow << "\n";
    os << "# constraint=" << to_string(cfg.constraint) << "\n";
    os << "# nr=" << cfg.nr << "\n";
    os << "# modes=" << cfg.modes << "\n";
    os << "# stretch=" << format17(cfg.stretch) << "\n";
    os << "# exact-cap=" << format17(cfg.exact_cap) << "\n";
    if (cfg.flow == "roll") {
        os << "# roll-n=" << cfg.roll_n << "\n";
        os << "# roll-taper=" << format17(cfg.roll_taper) << "\n";
    }
    os << "pe,constraint,upper,lower,exact,residual_flux,residual_q,grad_eta,"
          "flow_norm,delta_star\n";
    for (const auto& row : table.rows) {
        if (!row.ok) {
            os << "# failed pe=" << format17(row.pe) << " error=" << row.error << "\n";
            continue;
        }
        const auto& r = row.report;
        os << format17(r.pe) << "," << to_string(r.constraint) << ","
           << format17(r.upper) << ",";
        if (r.lower) os << format17(*r.lower);
        os << ",";
        if (r.exact) os << format17(*r.exact);
        os << "," << format17(r.residual_flux) << "," << format17(r.residual_q) << ","
           << format17(r.grad_eta) << "," << format17(r.flow_norm) << ",";
        if (r.delta_star) os << format17(*r.delta_star);
        os << "\n";
    }
}

std::string to_csv(const SweepTable& table) {
    std::ostringstream ss;
    write_csv(table, ss);
    return ss.str();
}

SweepTable read_csv(std::istream& is) {
    SweepTable table;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos && line.rfind("# failed", 0) != 0) {
                const std::string key = line.substr(2, eq - 2);
                const std::string value = line.substr(eq + 1);
                try {
                    table.config.apply_line(key, value);
                } catch (const std::invalid_argument&) {
                    // informational header line
                }
            }
            continue;
        }
        if (!header_seen) {
            header_seen = true;  // column header
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) fields.push_back(item);
        while (fields.size() < 10) fields.push_back("");
        SweepRow row;
        row.ok = true;
        BoundReport& r = row.report;
        r.pe = std::stod(fields[0]);
        row.pe = r.pe;
        r.constraint = constraint_from_string(fields[1]);
        r.upper = std::stod(fields[2]);
        if (!fields[3].empty()) r.lower = std::stod(fields[3]);
        if (!fields[4].empty()) r.exact = std::stod(fields[4]);
        r.residual_flux = std::stod(fields[5]);
        r.residual_q = std::stod(fields[6]);
        r.grad_eta = std::stod(fields[7]);
        r.flow_norm = std::stod(fields[8]);
        if (!fields[9].empty()) r.delta_star = std::stod(fields[9]);
        table.rows.push_back(std::move(row));
    }
    return table;
}

ScalingFit fit_scaling_values(const std::vector<double>& pe,
                              const std::vector<double>& value, Constraint constraint) {
    if (pe.size() != value.size() || pe.size() < 4)
        throw std::invalid_argument("fit_scaling: need at least 4 rows");
    const auto [lo, hi] = std::minmax_element(pe.begin(), pe.end());
    if (*hi / *lo < 100.0)
        throw std::invalid_argument("fit_scaling: rows must span at least 2 decades");

    const size_t n = pe.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t k = 0; k < n; ++k) {
        const double x = std::log(pe[k]);
        const double y = std::log(value[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double denom = n * sxx - sx * sx;
    ScalingFit fit;
    fit.raw_slope = (n * sxy - sx * sy) / denom;
    const double sstot = syy - sy * sy / n;
    const double ssres = sstot - fit.raw_slope * (sxy - sx * sy / n);
    fit.r_squared = (sstot > 0.0) ? 1.0 - ssres / sstot : 1.0;

    double cmin = 0.0, cmax = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const double comp = (constraint == Constraint::enstrophy)
                                ? value[k] * std::pow(pe[k], 2.0 / 3.0) /
                                      std::pow(std::log(pe[k]), 4.0 / 3.0)
                                : value[k] * pe[k];
        if (k == 0 || comp < cmin) cmin = comp;
        if (k == 0 || comp > cmax) cmax = comp;
    }
    fit.compensated_spread = cmax / cmin;
    return fit;
}

ScalingFit fit_scaling(const SweepTable& table, Constraint constraint) {
    std::vector<double> pe, value;
    for (const auto& row : table.rows) {
        if (!row.ok) continue;
        pe.push_back(row.report.pe);
        value.push_back(row.report.upper);
    }
    return fit_scaling_values(pe, value, constraint);
}

}  // namespace discflow
