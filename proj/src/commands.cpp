#include "hyperstab/commands.hpp"

#include "hyperstab/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace hyperstab {

bool Report::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::filesystem::path scenario_dir(const Scenario& sc, const CommandOptions& opts) {
    auto dir = opts.out_dir / sc.name;
    std::filesystem::create_directories(dir);
    return dir;
}

namespace {

Scenario with_overrides(const Scenario& sc, const CommandOptions& opts) {
    Scenario out = sc;
    if (opts.feedback_override) out.feedback = *opts.feedback_override;
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

Synthesis synthesize(const Scenario& sc, const Grid& grid) {
    auto kernel = tabulate_kernel(sc.system, sc.g, grid);
    auto op = std::make_shared<const IntegralOperator>(kernel, sc.system.n);
    auto inverse = inverse_kernel(*op);
    return {std::move(kernel), std::move(inverse), std::move(op)};
}

Synthesis cmd_synthesize(const Scenario& sc, const CommandOptions& opts, std::ostream& log) {
    const Grid grid = sc.grid();
    auto syn = synthesize(sc, grid);
    const auto dir = scenario_dir(sc, opts);
    {
        auto out = open_output(dir / "kernel.csv");
        write_kernel_csv(out, syn.kernel);
    }
    {
        auto out = open_output(dir / "inverse_kernel.csv");
        write_kernel_csv(out, syn.inverse.theta);
    }
    {
        auto out = open_output(dir / "feedback_trace.csv");
        write_kernel_trace_csv(out, syn.kernel);
    }
    csv_precision(log);
    log << sc.name << ": T_opt=" << optimal_time(sc.system, grid) << " t_F=" << naive_time(sc.system, grid) << '\n';
    if (!opts.quiet) log << "  wrote " << dir.string() << "/{kernel,inverse_kernel,feedback_trace}.csv\n";
    return syn;
}

Trajectory cmd_simulate(const Scenario& scenario, const CommandOptions& opts, std::ostream& log) {
    const Scenario sc = with_overrides(scenario, opts);
    const Grid grid = sc.grid();
    std::shared_ptr<const IntegralOperator> op;
    if (sc.feedback == FeedbackKind::fredholm && sc.dynamics != Dynamics::z_target) {
        op = std::make_shared<const IntegralOperator>(tabulate_kernel(sc.system, sc.g, grid), sc.system.n);
    }
    const SimulationOptions sim{sc.scheme, sc.dt, sc.snapshot_stride};
    auto traj = simulate(sc.closed_loop(grid, op), sc.initial_state(grid), sc.t_final, grid, sim);

    const auto dir = scenario_dir(sc, opts);
    {
        auto out = open_output(dir / "trajectory.csv");
        write_trajectory_csv(out, traj);
    }
    {
        auto out = open_output(dir / "norms.csv");
        write_norms_csv(out, traj);
    }
    csv_precision(log);
    log << sc.name << ": dt=" << traj.dt << " steps=" << traj.norms.size() - 1
        << " final sup=" << traj.norms.back().total.sup;
    if (traj.norms.front().total.sup > 0.0) {
        const auto vt = vanish_time(traj, sc.tol.vanish);
        log << " vanish_time(" << sc.tol.vanish << ")=" << (vt ? fmt(*vt) : std::string("none"));
    }
    log << '\n';
    return traj;
}

Report cmd_verify(const Scenario& scenario, const CommandOptions& opts, std::ostream& log) {
    const Scenario sc = with_overrides(scenario, opts);
    const Grid grid = sc.grid();
    const auto dir = scenario_dir(sc, opts);

    Report rep;
    rep.scenario = sc.name;
    rep.cells = sc.cells;
    rep.t_opt = optimal_time(sc.system, grid);
    rep.t_naive = naive_time(sc.system, grid);
    rep.checks.push_back({"times", rep.t_opt <= rep.t_naive + 1e-12, rep.t_opt, rep.t_naive,
                          "T_opt=" + fmt(rep.t_opt) + " t_F=" + fmt(rep.t_naive)});

    const auto syn = synthesize(sc, grid);
    {
        auto out = open_output(dir / "kernel.csv");
        write_kernel_csv(out, syn.kernel);
    }
    const auto oracle = kernel_oracle_solve(sc.system, sc.g, grid);
    {
        auto out = open_output(dir / "kernel_oracle.csv");
        write_kernel_csv(out, oracle);
    }
    const double gap = mean_node_gap(syn.kernel, oracle);
    rep.checks.push_back({"kernel_oracle_gap", gap <= sc.tol.kernel, gap, sc.tol.kernel, "L1"});

    double boundary = 0.0;
    for (const auto& r : kernel_residual(sc.system, sc.g, syn.kernel)) {
        boundary = std::max({boundary, r.boundary_x0, r.boundary_y0});
    }
    rep.checks.push_back({"kernel_boundary", boundary <= 1e-12, boundary, 1e-12, "x=0 side and y=0 slice"});

    double roundtrip = 0.0;
    bool trace_exact = true;
    for (int s = 0; s < sc.verify_samples; ++s) {
        const auto z = random_state(sc.system.n, sc.system.m, grid, sc.verify_seed + static_cast<std::uint64_t>(s));
        const auto gamma = apply_fredholm(*syn.op, z);
        const auto back = invert_fredholm(*syn.op, gamma);
        roundtrip = std::max(roundtrip, sup_distance(back, z) / z.sup_norm());
        for (int i = 1; i <= sc.system.n; ++i) trace_exact = trace_exact && gamma(i, 0) == z(i, 0);
    }
    rep.checks.push_back({"roundtrip", roundtrip <= sc.tol.roundtrip, roundtrip, sc.tol.roundtrip, ""});
    rep.checks.push_back({"trace_preservation", trace_exact, trace_exact ? 0.0 : 1.0, 0.0, ""});

    const auto u0 = sc.initial_state(grid);
    const double init = u0.sup_norm();
    const SimulationOptions sim{sc.scheme, sc.dt, sc.snapshot_stride};

    {
        const auto traj = simulate(ClosedLoopSpec::z_target(sc.system, sc.g), u0, sc.t_final, grid, sim);
        auto out = open_output(dir / "z_target_norms.csv");
        write_norms_csv(out, traj);
        const double tol = sc.scheme == Scheme::integer_shift ? sc.tol.zero : sc.tol.vanish;
        const double deadline = rep.t_opt + sc.tol.slack_steps * traj.dt;
        if (init == 0.0) {
            rep.checks.push_back({"z_target_vanishing", false, 0.0, deadline, "zero initial data"});
        } else {
            const auto vt = vanish_time(traj, tol);
            const bool ok = vt && *vt <= deadline;
            rep.checks.push_back({"z_target_vanishing", ok, vt.value_or(std::numeric_limits<double>::infinity()),
                                  deadline, "tol=" + fmt(tol)});
        }
    }

    if (sc.dynamics == Dynamics::gamma_target) {
        const auto traj = simulate(sc.closed_loop(grid, syn.op), u0, sc.t_final, grid, sim);
        auto out = open_output(dir / "closed_loop_norms.csv");
        write_norms_csv(out, traj);
        const double deadline = rep.t_opt + sc.tol.slack_steps * traj.dt;
        if (init == 0.0) {
            rep.checks.push_back({"closed_loop_vanishing", false, 0.0, deadline, "zero initial data"});
        } else {
            const auto vt = vanish_time(traj, sc.tol.vanish);
            const bool ok = vt && *vt <= deadline;
            rep.checks.push_back({"closed_loop_vanishing", ok,
                                  vt.value_or(std::numeric_limits<double>::infinity()), deadline,
                                  "tol=" + fmt(sc.tol.vanish)});
        }
    }

    if (init > 0.0) {
        const double dev = commutation_check(sc.system, sc.g, syn.op, u0, sc.t_final, grid, sc.scheme, sc.dt) / init;
        rep.checks.push_back({"commutation", dev <= sc.tol.commutation, dev, sc.tol.commutation, "relative"});
    }

    {
        auto out = open_output(dir / "report.csv");
        out << "check,status,value,threshold,detail\n";
        for (const auto& c : rep.checks) {
            out << c.name << ',' << (c.pass ? "pass" : "fail") << ',' << c.value << ',' << c.threshold << ','
                << c.detail << '\n';
        }
    }
    if (!opts.quiet) {
        log << sc.name << " (N=" << sc.cells << ")\n";
        for (const auto& c : rep.checks) {
            log << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << ": " << fmt(c.value) << " vs "
                << fmt(c.threshold) << (c.detail.empty() ? "" : " (" + c.detail + ")") << '\n';
        }
    }
    log << sc.name << ": " << (rep.all_pass() ? "pass" : "fail") << '\n';
    return rep;
}

std::optional<double> observed_order(double prev, double cur, int prev_cells, int cur_cells) {
    if (!(prev > 0.0) || !(cur > 0.0) || !std::isfinite(prev) || !std::isfinite(cur) || prev == cur) {
        return std::nullopt;
    }
    return std::log2(prev / cur) / std::log2(static_cast<double>(cur_cells) / prev_cells);
}

std::vector<SweepRow> cmd_sweep(const Scenario& scenario, const std::vector<int>& grids, const CommandOptions& opts,
                                std::ostream& log) {
    if (grids.size() < 2) throw Error("sweep needs at least two grid sizes");
    const Scenario sc = with_overrides(scenario, opts);
    std::vector<SweepRow> rows;
    for (int cells : grids) {
        const Grid grid(cells);
        SweepRow row;
        row.cells = cells;
        const auto syn = synthesize(sc, grid);
        row.kernel_gap = mean_node_gap(syn.kernel, kernel_oracle_solve(sc.system, sc.g, grid));

        const auto u0 = sc.initial_state(grid);
        const double init = u0.sup_norm();
        const auto dt = sc.dt_for(cells);
        if (init > 0.0) {
            row.commutation =
                commutation_check(sc.system, sc.g, syn.op, u0, sc.t_final, grid, sc.scheme, dt) / init;
            const SimulationOptions sim{sc.scheme, dt, std::numeric_limits<int>::max()};
            const auto traj = simulate(sc.closed_loop(grid, syn.op), u0, sc.t_final, grid, sim);
            const auto vt = vanish_time(traj, sc.tol.vanish);
            row.vanish_error =
                vt ? std::abs(*vt - optimal_time(sc.system, grid)) : std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(row);
    }

    const auto dir = scenario_dir(sc, opts);
    auto out = open_output(dir / "sweep.csv");
    csv_precision(log);
    auto order_text = [](std::optional<double> o) {
        if (!o) return std::string("n/a");
        std::ostringstream os;
        os.precision(17);
        os << *o;
        return os.str();
    };
    out << "n,kernel_gap,kernel_gap_order,commutation,commutation_order,vanish_error,vanish_error_order\n";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        std::optional<double> o_gap;
        std::optional<double> o_comm;
        std::optional<double> o_van;
        if (r > 0) {
            const auto& p = rows[r - 1];
            o_gap = observed_order(p.kernel_gap, row.kernel_gap, p.cells, row.cells);
            o_comm = observed_order(p.commutation, row.commutation, p.cells, row.cells);
            o_van = observed_order(p.vanish_error, row.vanish_error, p.cells, row.cells);
        }
        out << row.cells << ',' << row.kernel_gap << ',' << order_text(o_gap) << ',' << row.commutation << ','
            << order_text(o_comm) << ',' << row.vanish_error << ',' << order_text(o_van) << '\n';
        if (!opts.quiet) {
            log << sc.name << " N=" << row.cells << " kernel_gap=" << fmt(row.kernel_gap) << " (order "
                << order_text(o_gap) << ") commutation=" << fmt(row.commutation) << " (order " << order_text(o_comm)
                << ") vanish_error=" << fmt(row.vanish_error) << " (order " << order_text(o_van) << ")\n";
        }
    }
    return rows;
}

}  // namespace hyperstab
