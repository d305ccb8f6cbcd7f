// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "hyperstab/kernels.hpp"
#include "hyperstab/scenario.hpp"
#include "hyperstab/simulator.hpp"
#include "hyperstab/transforms.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace hyperstab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

HyperbolicSystem s3_system() {
    auto sys = HyperbolicSystem::with_constant_speeds({-2, -1, 1}, 2);
    sys.q = {{1.0, 1.0}};
    return sys;
}

CascadeMatrix s3_cascade(Profile g21 = Profile::constant(1)) {
    CascadeMatrix g(3, 2);
    g.set_g(2, 1, std::move(g21));
    g.set_gplus(1, 1, Profile::constant(1));
    g.set_gplus(1, 2, Profile::constant(1));
    return g;
}

std::shared_ptr<const IntegralOperator> s3_operator(const Grid& grid) {
    return std::make_shared<const IntegralOperator>(tabulate_kernel(s3_system(), s3_cascade(), grid), 3);
}

// The bundled scenario's initial data: u1 = 1, u2 a bump at 1/2, u3 = 0.
StateVector s3_initial(const Grid& grid) {
    StateVector u(3, 2, grid);
    for (int k = 0; k < grid.size(); ++k) {
        const double d = (grid.node(k) - 0.5) / 0.5;
        const double c = std::cos(3.14159265358979323846 * d);
        u(1, k) = 1.0;
        u(2, k) = std::abs(d) < 0.5 ? c * c : 0.0;
    }
    return u;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

Outcome times() {
    const auto sys = s3_system();
    const Grid grid(200);
    const double t_opt = optimal_time(sys, grid);
    const double t_f = naive_time(sys, grid);
    auto affine = sys;
    affine.speeds[2] = Profile::affine(1, 1);
    const double t_aff = optimal_time(affine, Grid(1024));
    const double e_aff = std::abs(t_aff - (1.0 + std::log(2.0)));
    const bool ok = std::abs(t_opt - 2.0) <= 1e-12 && std::abs(t_f - 2.5) <= 1e-12 && e_aff <= 1e-8;
    return {ok, "T_opt=" + num(t_opt) + " t_F=" + num(t_f) + " affine error=" + num(e_aff)};
}

Outcome kernel_equivalence() {
    const auto sys = s3_system();
    const auto g = s3_cascade(Profile::affine(0, 1));
    std::vector<double> gaps;
    for (int n : {128, 256, 512}) {
        const Grid grid(n);
        gaps.push_back(max_node_gap(tabulate_kernel(sys, g, grid), kernel_oracle_solve(sys, g, grid)));
    }
    bool ok = gaps.back() <= 0.02;
    std::string orders;
    for (std::size_t s = 1; s < gaps.size(); ++s) {
        const double order = std::log2(gaps[s - 1] / gaps[s]);
        ok = ok && gaps[s] < gaps[s - 1] && order >= 0.8;
        orders += (s > 1 ? "," : "") + num(order);
    }
    return {ok, "gaps=" + num(gaps[0]) + "," + num(gaps[1]) + "," + num(gaps[2]) + " orders=" + orders};
}

Outcome exact_inversion(int& trace_failures) {
    const Grid grid(512);
    const auto op = s3_operator(grid);
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto z = random_state(3, 2, grid, seed);
        const auto gamma = apply_fredholm(*op, z);
        for (int i = 1; i <= 3; ++i) trace_failures += gamma(i, 0) != z(i, 0);
        worst = std::max(worst, sup_distance(invert_fredholm(*op, gamma), z) / z.sup_norm());
    }
    const double defect = composition_defect(*op, inverse_kernel(*op));
    return {worst <= 1e-12 && defect <= 1e-10, "roundtrip=" + num(worst) + " composition=" + num(defect)};
}

Outcome z_target_vanishing() {
    const Grid grid(200);
    const auto spec = ClosedLoopSpec::z_target(s3_system(), s3_cascade());
    double minus_late = 0.0;
    double total_late = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto traj = simulate(spec, random_state(3, 2, grid, seed), 3.0, grid,
                                   {Scheme::integer_shift, grid.spacing(), 1000000});
        for (const auto& r : traj.norms) {
            if (r.t >= 1.0 + 2 * traj.dt) minus_late = std::max(minus_late, r.minus.sup);
            if (r.t >= 2.0 + 2 * traj.dt) total_late = std::max(total_late, r.total.sup);
        }
    }
    return {minus_late <= 1e-12 && total_late <= 1e-12,
            "max |z_-| after 1=" + num(minus_late) + " max |z| after 2=" + num(total_late)};
}

Outcome optimal_feedback() {
    bool ok = true;
    std::string detail;
    std::vector<double> residual;
    for (int n : {200, 400}) {
        const Grid grid(n);
        const auto spec = ClosedLoopSpec::gamma_target(s3_system(), s3_cascade(), FredholmFeedback{s3_operator(grid)});
        const auto traj = simulate(spec, s3_initial(grid), 3.0, grid, {Scheme::integer_shift, grid.spacing(), 1000000});
        const auto vt = vanish_time(traj, 1e-6);
        ok = ok && vt && *vt <= 2.0 + 5 * traj.dt + 1e-12;
        residual.push_back(sup_norm_at(traj, 2.1));
        detail += "N=" + std::to_string(n) + " vanish=" + (vt ? num(*vt) : std::string("none")) +
                  " sup(2.1)=" + num(residual.back()) + " ";
    }
    const double shrink = residual[0] / residual[1];
    ok = ok && shrink >= 1.7;
    return {ok, detail + "shrink=" + num(shrink)};
}

Outcome optimality_gap() {
    bool ok = true;
    std::string detail;
    for (int n : {200, 400}) {
        const Grid grid(n);
        StateVector u0(3, 2, grid);
        for (auto& v : u0.component(1)) v = 1.0;
        const auto spec = ClosedLoopSpec::gamma_target(s3_system(), s3_cascade(), ZeroFeedback{});
        const auto traj = simulate(spec, u0, 3.0, grid, {Scheme::integer_shift, grid.spacing(), 1000000});
        const auto vt = vanish_time(traj, 1e-6);
        const double mid = sup_norm_at(traj, 2.25) / traj.norms.front().total.sup;
        ok = ok && vt && std::abs(*vt - 2.5) <= 5 * traj.dt + 1e-12 && mid >= 0.01;
        detail += "N=" + std::to_string(n) + " vanish=" + (vt ? num(*vt) : std::string("none")) +
                  " rel sup(2.25)=" + num(mid) + " ";
    }
    return {ok, detail};
}

Outcome commutation() {
    std::vector<double> dev;
    for (int n : {100, 200, 400}) {
        const Grid grid(n);
        const auto z0 = s3_initial(grid);
        dev.push_back(commutation_check(s3_system(), s3_cascade(), s3_operator(grid), z0, 3.0, grid,
                                        Scheme::integer_shift, grid.spacing()) /
                      z0.sup_norm());
    }
    bool ok = dev.back() <= 0.05;
    std::string orders;
    for (std::size_t s = 1; s < dev.size(); ++s) {
        const double order = std::log2(dev[s - 1] / dev[s]);
        ok = ok && order >= 0.8;
        orders += (s > 1 ? "," : "") + num(order);
    }
    return {ok, "rel deviation=" + num(dev[0]) + "," + num(dev[1]) + "," + num(dev[2]) + " orders=" + orders};
}

Outcome trace_preservation(int inversion_failures) {
    int failures = inversion_failures;
    int states = 100;
    for (int n : {100, 200, 400}) {
        const Grid grid(n);
        const auto op = s3_operator(grid);
        for (const auto& z : {s3_initial(grid), random_state(3, 2, grid, 77)}) {
            const auto gamma = apply_fredholm(*op, z);
            for (int i = 1; i <= 3; ++i) failures += gamma(i, 0) != z(i, 0);
            ++states;
        }
    }
    return {failures == 0, std::to_string(states) + " states, " + std::to_string(failures) + " mismatches"};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        std::string name;
        double budget;
        std::function<Outcome()> run;
    };
    int trace_failures = 0;
    const std::vector<Criterion> criteria = {
        {1, "control times", 1.0, times},
        {2, "kernel equivalence", 10.0, kernel_equivalence},
        {3, "exact inversion", 10.0, [&] { return exact_inversion(trace_failures); }},
        {4, "z target vanishes by T_opt", 10.0, z_target_vanishing},
        {5, "optimal feedback vanishes by T_opt", 20.0, optimal_feedback},
        {6, "zero feedback needs t_F", 20.0, optimality_gap},
        {7, "commutation", 30.0, commutation},
        {8, "trace preservation", 1.0, [&] { return trace_preservation(trace_failures); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool pass = out.pass && secs < c.budget;
        failed += !pass;
        std::printf("%s criterion %d (%s): %s [%.2fs / %.0fs]\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    out.detail.c_str(), secs, c.budget);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
