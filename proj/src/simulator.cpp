#include "hyperstab/simulator.hpp"

#include "hyperstab/csv.hpp"
#include "hyperstab/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace hyperstab {

ClosedLoopSpec ClosedLoopSpec::plant(HyperbolicSystem sys, FeedbackLaw law) {
    return {std::move(sys), Dynamics::plant, std::nullopt, std::move(law)};
}

ClosedLoopSpec ClosedLoopSpec::gamma_target(HyperbolicSystem sys, const CascadeMatrix& g, FeedbackLaw law) {
    return {std::move(sys), Dynamics::gamma_target, build_gamma_source(g), std::move(law)};
}

ClosedLoopSpec ClosedLoopSpec::z_target(HyperbolicSystem sys, const CascadeMatrix& g) {
    return {std::move(sys), Dynamics::z_target, build_z_source(g), ZeroFeedback{}};
}

namespace {

void check_spec(const ClosedLoopSpec& spec) {
    const auto& sys = spec.system;
    switch (spec.dynamics) {
        case Dynamics::plant:
            if (spec.source) throw ValidationError("plant dynamics carry Sigma, not a trace source");
            break;
        case Dynamics::gamma_target:
        case Dynamics::z_target: {
            if (!spec.source) throw ValidationError("target dynamics need a trace source");
            const auto want = spec.dynamics == Dynamics::z_target ? SourceMode::z_source : SourceMode::gamma_source;
            if (spec.source->mode != want) throw ValidationError("trace source does not match the dynamics mode");
            if (spec.source->n != sys.n || spec.source->m != sys.m) {
                throw ValidationError("trace source shape does not match the system");
            }
            break;
        }
    }
    if (spec.dynamics == Dynamics::z_target && !std::holds_alternative<ZeroFeedback>(spec.feedback)) {
        throw ValidationError("z target requires z_-(t,1) = 0 (zero feedback)");
    }
}

}  // namespace

Stepper::Stepper(ClosedLoopSpec spec, const Grid& grid, Scheme scheme, std::optional<double> dt)
    : spec_(std::move(spec)), grid_(grid), scheme_(scheme), dt_(0.0) {
    const auto& sys = spec_.system;
    ensure_valid(sys, grid_);
    check_spec(spec_);

    double max_speed = 0.0;
    for (int i = 1; i <= sys.n; ++i) {
        speeds_.push_back(sys.speed(i).sample(grid_));
        for (double v : speeds_.back()) max_speed = std::max(max_speed, std::abs(v));
    }
    const double h = grid_.spacing();

    if (scheme_ == Scheme::upwind) {
        dt_ = dt.value_or(0.9 * h / max_speed);
        if (!(dt_ > 0.0)) throw StepError("time step must be positive");
        const double courant = max_speed * dt_ / h;
        if (courant > 1.0 + 1e-12) {
            throw StepError("upwind CFL violated: max|lambda| dt/dx = " + std::to_string(courant) + " > 1");
        }
    } else {
        if (!dt) throw StepError("integer_shift needs an explicit time step");
        dt_ = *dt;
        if (!(dt_ > 0.0)) throw StepError("time step must be positive");
        if (!sys.has_constant_speeds()) throw StepError("integer_shift needs constant speeds");
        for (int i = 1; i <= sys.n; ++i) {
            const double cells = std::abs(speeds_[i - 1][0]) * dt_ / h;
            const double rounded = std::round(cells);
            if (rounded < 1.0 || std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells)) {
                throw StepError("integer_shift: |lambda_" + std::to_string(i) + "| dt/dx = " + std::to_string(cells) +
                                " is not a positive integer");
            }
            if (rounded > grid_.cells()) throw StepError("integer_shift: shift exceeds the grid");
            shifts_.push_back(static_cast<int>(rounded));
        }
    }

    if (spec_.dynamics == Dynamics::plant) {
        coupling_.assign(static_cast<std::size_t>(sys.n), {});
        for (int i = 0; i < sys.n; ++i) {
            for (int j = 0; j < sys.n; ++j) coupling_[i].push_back(sys.sigma[i][j].sample(grid_));
        }
    } else {
        coupling_.assign(static_cast<std::size_t>(sys.n), {});
        for (int i = 1; i <= sys.n; ++i) {
            for (int j = 1; j <= sys.m; ++j) coupling_[i - 1].push_back(spec_.source->at(i, j).sample(grid_));
        }
    }
}

double Stepper::source(const StateVector& u, int i, int k) const {
    const auto& row = coupling_[static_cast<std::size_t>(i - 1)];
    double s = 0.0;
    if (spec_.dynamics == Dynamics::plant) {
        for (std::size_t j = 0; j < row.size(); ++j) s += row[j][k] * u(static_cast<int>(j) + 1, k);
    } else {
        for (std::size_t j = 0; j < row.size(); ++j) s += row[j][k] * u(static_cast<int>(j) + 1, 0);
    }
    return s;
}

void Stepper::advance(StateVector& u) const {
    if (!(u.grid() == grid_) || u.n() != spec_.system.n || u.m() != spec_.system.m) {
        throw GridMismatch("state does not match the stepper");
    }
    const auto& sys = spec_.system;
    const int last = grid_.cells();
    const double ratio = dt_ / grid_.spacing();
    const StateVector old = u;
    const auto feedback = evaluate_feedback(spec_.feedback, old);

    for (int i = 1; i <= sys.m; ++i) {
        auto next = u.component(i);
        const auto& lam = speeds_[i - 1];
        if (scheme_ == Scheme::upwind) {
            for (int k = 0; k < last; ++k) {
                const double nu = -lam[k] * ratio;
                next[k] = old(i, k) + nu * (old(i, k + 1) - old(i, k)) + dt_ * source(old, i, k);
            }
            next[last] = feedback[i - 1];
        } else {
            const int s = shifts_[i - 1];
            for (int k = 0; k + s <= last; ++k) next[k] = old(i, k + s) + dt_ * source(old, i, k + s);
            for (int k = last - s + 1; k <= last; ++k) next[k] = feedback[i - 1];
        }
    }

    for (int i = sys.m + 1; i <= sys.n; ++i) {
        const auto& qrow = sys.q[static_cast<std::size_t>(i - sys.m - 1)];
        double inflow = 0.0;
        for (int j = 1; j <= sys.m; ++j) inflow += qrow[j - 1] * u(j, 0);

        auto next = u.component(i);
        const auto& lam = speeds_[i - 1];
        if (scheme_ == Scheme::upwind) {
            for (int k = 1; k <= last; ++k) {
                const double nu = lam[k] * ratio;
                next[k] = old(i, k) - nu * (old(i, k) - old(i, k - 1)) + dt_ * source(old, i, k);
            }
            next[0] = inflow;
        } else {
            const int s = shifts_[i - 1];
            for (int k = last; k >= s; --k) next[k] = old(i, k - s) + dt_ * source(old, i, k - s);
            for (int k = 0; k < s; ++k) next[k] = inflow;
        }
    }
}

namespace {

NormRecord record(double t, const StateVector& u) {
    return {t, u.minus_norms(), u.plus_norms(), u.total_norms()};
}

int step_count(double t_final, double dt) {
    if (t_final < 0.0) throw StepError("final time must be non-negative");
    return static_cast<int>(std::ceil(t_final / dt - 1e-9));
}

}  // namespace

Trajectory simulate(const ClosedLoopSpec& spec, const StateVector& u0, double t_final, const Grid& grid,
                    const SimulationOptions& options) {
    const Stepper stepper(spec, grid, options.scheme, options.dt);
    const int stride = std::max(1, options.snapshot_stride);
    const int steps = step_count(t_final, stepper.dt());

    Trajectory traj;
    traj.dt = stepper.dt();
    StateVector u = u0;
    traj.times.push_back(0.0);
    traj.snapshots.push_back(u);
    traj.norms.push_back(record(0.0, u));
    for (int s = 1; s <= steps; ++s) {
        stepper.advance(u);
        const double t = s * stepper.dt();
        traj.norms.push_back(record(t, u));
        if (s % stride == 0 || s == steps) {
            traj.times.push_back(t);
            traj.snapshots.push_back(u);
        }
    }
    return traj;
}

std::optional<double> vanish_time(const Trajectory& traj, double tol_rel) {
    if (traj.norms.empty()) throw ValidationError("empty trajectory");
    const double initial = traj.norms.front().total.sup;
    if (initial == 0.0) throw ValidationError("vanish_time needs nonzero initial data");
    const double bound = tol_rel * initial;
    std::optional<double> since;
    for (auto it = traj.norms.rbegin(); it != traj.norms.rend(); ++it) {
        if (it->total.sup > bound) break;
        since = it->t;
    }
    return since;
}

double sup_norm_at(const Trajectory& traj, double t) {
    if (traj.norms.empty()) throw ValidationError("empty trajectory");
    const auto best = std::min_element(traj.norms.begin(), traj.norms.end(), [t](const auto& a, const auto& b) {
        return std::abs(a.t - t) < std::abs(b.t - t);
    });
    return best->total.sup;
}

double commutation_check(const HyperbolicSystem& sys, const CascadeMatrix& g,
                         std::shared_ptr<const IntegralOperator> op, const StateVector& z0, double t_final,
                         const Grid& grid, Scheme scheme, std::optional<double> dt) {
    if (!op) throw ValidationError("commutation check needs a Fredholm operator");
    const Stepper z_step(ClosedLoopSpec::z_target(sys, g), grid, scheme, dt);
    const Stepper gamma_step(ClosedLoopSpec::gamma_target(sys, g, FredholmFeedback{op}), grid, scheme,
                             z_step.dt());
    StateVector z = z0;
    StateVector gamma = apply_fredholm(*op, z0);
    double deviation = 0.0;
    const int steps = step_count(t_final, z_step.dt());
    for (int s = 1; s <= steps; ++s) {
        z_step.advance(z);
        gamma_step.advance(gamma);
        deviation = std::max(deviation, sup_distance(gamma, apply_fredholm(*op, z)));
    }
    return deviation;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    csv_precision(os);
    os << "t,component,x,value\n";
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        const auto& u = traj.snapshots[s];
        for (int i = 1; i <= u.n(); ++i) {
            const auto c = u.component(i);
            for (int k = 0; k < u.grid().size(); ++k) {
                os << traj.times[s] << ',' << i << ',' << u.grid().node(k) << ',' << c[k] << '\n';
            }
        }
    }
}

void write_norms_csv(std::ostream& os, const Trajectory& traj) {
    csv_precision(os);
    os << "t,block,sup_norm,l2_norm\n";
    for (const auto& r : traj.norms) {
        os << r.t << ",minus," << r.minus.sup << ',' << r.minus.l2 << '\n';
        os << r.t << ",plus," << r.plus.sup << ',' << r.plus.l2 << '\n';
        os << r.t << ",total," << r.total.sup << ',' << r.total.l2 << '\n';
    }
}

}  // namespace hyperstab
