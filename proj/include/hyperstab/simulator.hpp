#pragma once

#include "hyperstab/kernels.hpp"
#include "hyperstab/state.hpp"
#include "hyperstab/system.hpp"
#include "hyperstab/transforms.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

namespace hyperstab {

enum class Dynamics {
    plant,         // u_t + Lambda u_x = Sigma u
    gamma_target,  // gamma_t + Lambda gamma_x = G gamma(t,0)
    z_target,      // z_t + Lambda z_x = G~ z(t,0), z_-(t,1) = 0
};

enum class Scheme { upwind, integer_shift };

struct ClosedLoopSpec {
    HyperbolicSystem system;
    Dynamics dynamics = Dynamics::plant;
    std::optional<TargetSource> source;  // set for the target modes
    FeedbackLaw feedback = ZeroFeedback{};

    static ClosedLoopSpec plant(HyperbolicSystem sys, FeedbackLaw law);
    static ClosedLoopSpec gamma_target(HyperbolicSystem sys, const CascadeMatrix& g, FeedbackLaw law);
    static ClosedLoopSpec z_target(HyperbolicSystem sys, const CascadeMatrix& g);
};

/// Explicit one-step map of a closed loop on a fixed grid.
///
/// Each step transports (upwind or exact integer-cell shift), adds the source
/// by explicit Euler on the current snapshot, then closes the boundaries:
/// u_-(1) takes the feedback evaluated on the current snapshot and
/// u_+(0) = Q u_-(0) with u_-(0) from the freshly transported values.
class Stepper {
public:
    Stepper(ClosedLoopSpec spec, const Grid& grid, Scheme scheme, std::optional<double> dt = std::nullopt);

    double dt() const { return dt_; }
    const Grid& grid() const { return grid_; }
    const ClosedLoopSpec& spec() const { return spec_; }

    void advance(StateVector& u) const;

private:
    double source(const StateVector& u, int i, int k) const;

    ClosedLoopSpec spec_;
    Grid grid_;
    Scheme scheme_;
    double dt_;
    std::vector<std::vector<double>> speeds_;                // n x nodes
    std::vector<int> shifts_;                                // integer_shift only
    std::vector<std::vector<std::vector<double>>> coupling_;  // sigma (n x n) or B (n x m), sampled
};

struct SimulationOptions {
    Scheme scheme = Scheme::upwind;
    std::optional<double> dt;
    int snapshot_stride = 1;
};

struct NormRecord {
    double t = 0.0;
    BlockNorms minus;
    BlockNorms plus;
    BlockNorms total;
};

struct Trajectory {
    double dt = 0.0;
    std::vector<double> times;           // snapshot stamps
    std::vector<StateVector> snapshots;  // one per stamp
    std::vector<NormRecord> norms;       // every step
};

Trajectory simulate(const ClosedLoopSpec& spec, const StateVector& u0, double t_final, const Grid& grid,
                    const SimulationOptions& options);

/// Earliest stamp after which the sup norm stays <= tol_rel * initial sup norm.
std::optional<double> vanish_time(const Trajectory& traj, double tol_rel);

/// Sup norm recorded at the step nearest to t.
double sup_norm_at(const Trajectory& traj, double t);

/// Max over steps of sup |gamma(t) - F z(t)|, where z solves the z target from
/// z0 and gamma solves the gamma target under feedback H from F z0.
double commutation_check(const HyperbolicSystem& sys, const CascadeMatrix& g,
                         std::shared_ptr<const IntegralOperator> op, const StateVector& z0, double t_final,
                         const Grid& grid, Scheme scheme, std::optional<double> dt = std::nullopt);

/// `t,component,x,value` for every stored snapshot.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
/// `t,block,sup_norm,l2_norm` with blocks minus, plus, total for every step.
void write_norms_csv(std::ostream& os, const Trajectory& traj);

}  // namespace hyperstab
