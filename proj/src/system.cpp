#include "hyperstab/system.hpp"

#include "hyperstab/error.hpp"

#include <cmath>
#include <sstream>

namespace hyperstab {

HyperbolicSystem HyperbolicSystem::with_constant_speeds(std::vector<double> speeds, int m) {
    HyperbolicSystem sys;
    sys.n = static_cast<int>(speeds.size());
    sys.m = m;
    for (double c : speeds) sys.speeds.push_back(Profile::constant(c));
    sys.sigma.assign(speeds.size(), std::vector<Profile>(speeds.size(), Profile::constant(0.0)));
    if (m >= 0 && m <= sys.n) {
        sys.q.assign(static_cast<std::size_t>(sys.n - m),
                     std::vector<double>(static_cast<std::size_t>(m), 0.0));
    }
    return sys;
}

bool HyperbolicSystem::has_constant_speeds() const {
    for (const auto& s : speeds) {
        if (!s.is_constant()) return false;
    }
    return true;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto& v : violations) {
        os << v.field;
        if (v.node >= 0) os << " [node " << v.node << "]";
        if (v.component > 0) {
            os << " [component " << v.component;
            if (v.other > 0) os << " vs " << v.other;
            os << "]";
        }
        os << ": " << v.message << '\n';
    }
    return os.str();
}

ValidationReport validate_system(const HyperbolicSystem& sys, const Grid& grid) {
    ValidationReport report;
    auto add = [&](std::string field, int node, int comp, int other, std::string msg) {
        report.violations.push_back({std::move(field), node, comp, other, std::move(msg)});
    };

    if (sys.n < 2) add("n", -1, 0, 0, "need at least 2 components");
    if (sys.m < 1 || sys.m > sys.n - 1) add("m", -1, 0, 0, "need 1 <= m <= n-1");
    if (static_cast<int>(sys.speeds.size()) != sys.n) {
        add("speeds", -1, 0, 0, "expected n speed profiles");
    }
    bool sigma_ok = static_cast<int>(sys.sigma.size()) == sys.n;
    for (const auto& row : sys.sigma) sigma_ok = sigma_ok && static_cast<int>(row.size()) == sys.n;
    if (!sigma_ok) add("sigma", -1, 0, 0, "expected an n x n matrix");
    bool q_ok = static_cast<int>(sys.q.size()) == sys.n - sys.m;
    for (const auto& row : sys.q) q_ok = q_ok && static_cast<int>(row.size()) == sys.m;
    if (!q_ok) add("q", -1, 0, 0, "expected an (n-m) x m matrix");
    if (!report.valid()) return report;

    for (int k = 0; k < grid.size(); ++k) {
        const double x = grid.node(k);
        for (int i = 1; i <= sys.n; ++i) {
            const double li = sys.speed(i)(x);
            if (!std::isfinite(li)) add("speeds", k, i, 0, "speed is not finite");
            if (i <= sys.m && !(li < 0.0)) add("speeds", k, i, 0, "negative-block speed must be < 0");
            if (i > sys.m && !(li > 0.0)) add("speeds", k, i, 0, "positive-block speed must be > 0");
            if (i > 1) {
                const double prev = sys.speed(i - 1)(x);
                if (!(prev < li)) add("speeds", k, i - 1, i, "speeds must be strictly increasing");
            }
        }
    }
    return report;
}

void ensure_valid(const HyperbolicSystem& sys, const Grid& grid) {
    const auto report = validate_system(sys, grid);
    if (!report.valid()) {
        ValidationReport first;
        first.violations.push_back(report.violations.front());
        throw ValidationError("invalid system: " + first.summary());
    }
}

TravelTime::TravelTime(const Profile& speed, const Grid& grid)
    : grid_(grid), nodes_(static_cast<std::size_t>(grid.size()), 0.0), decreasing_(false) {
    const auto lam = speed.sample(grid);
    const double h = grid.spacing();
    for (int k = 0; k < grid.cells(); ++k) {
        nodes_[k + 1] = nodes_[k] + 0.5 * h * (1.0 / lam[k] + 1.0 / lam[k + 1]);
    }
    decreasing_ = nodes_.back() < 0.0;
}

double TravelTime::operator()(double x) const { return interpolate(grid_, nodes_, x); }

std::optional<double> TravelTime::inverse(double s) const {
    const double lo_val = decreasing_ ? nodes_.back() : 0.0;
    const double hi_val = decreasing_ ? 0.0 : nodes_.back();
    if (s < lo_val || s > hi_val) return std::nullopt;

    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        const double v = (*this)(mid);
        const bool before = decreasing_ ? v > s : v < s;
        if (before) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace {

void require_negative_index(const HyperbolicSystem& sys, int i) {
    if (i < 1 || i > sys.m) {
        throw ValidationError("component " + std::to_string(i) + " is not in the negative block 1.." +
                              std::to_string(sys.m));
    }
}

}  // namespace

double phi(const HyperbolicSystem& sys, const Grid& grid, int i, double x) {
    require_negative_index(sys, i);
    return TravelTime(sys.speed(i), grid)(x);
}

std::optional<double> phi_inverse(const HyperbolicSystem& sys, const Grid& grid, int i, double s) {
    require_negative_index(sys, i);
    return TravelTime(sys.speed(i), grid).inverse(s);
}

double transit_time(const Profile& speed, const Grid& grid) {
    if (speed.is_constant()) return 1.0 / std::abs(speed(0.0));
    const double h = grid.spacing();
    double coarse = 0.0;
    double mids = 0.0;
    for (int k = 0; k < grid.size(); ++k) {
        coarse += grid.weights()[k] / std::abs(speed(grid.node(k)));
    }
    for (int k = 0; k < grid.cells(); ++k) {
        mids += h / std::abs(speed(grid.node(k) + 0.5 * h));
    }
    const double fine = 0.5 * (coarse + mids);
    return (4.0 * fine - coarse) / 3.0;
}

double optimal_time(const HyperbolicSystem& sys, const Grid& grid) {
    ensure_valid(sys, grid);
    return transit_time(sys.speed(sys.m + 1), grid) + transit_time(sys.speed(sys.m), grid);
}

double naive_time(const HyperbolicSystem& sys, const Grid& grid) {
    ensure_valid(sys, grid);
    double t = transit_time(sys.speed(sys.m + 1), grid);
    for (int i = 1; i <= sys.m; ++i) t += transit_time(sys.speed(i), grid);
    return t;
}

}  // namespace hyperstab
