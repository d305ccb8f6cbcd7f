#pragma once

#include "hyperstab/grid.hpp"
#include "hyperstab/profile.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hyperstab {

/// Plant data for u_t + Lambda(x) u_x = Sigma(x) u on (0,1).
///
/// Components 1..m travel left (negative speed) and are actuated at x = 1;
/// components m+1..n travel right and receive u_+(t,0) = Q u_-(t,0).
/// Component indices in the public API are 1-based throughout.
struct HyperbolicSystem {
    int n = 0;
    int m = 0;
    std::vector<Profile> speeds;              // n entries
    std::vector<std::vector<Profile>> sigma;  // n x n
    std::vector<std::vector<double>> q;       // (n-m) x m

    /// Constant-coefficient system with zero Sigma and zero Q.
    static HyperbolicSystem with_constant_speeds(std::vector<double> speeds, int m);

    const Profile& speed(int i) const { return speeds.at(static_cast<std::size_t>(i - 1)); }
    bool has_constant_speeds() const;
};

struct Violation {
    std::string field;
    int node = -1;       // grid node index, -1 when not node-specific
    int component = 0;   // 1-based, 0 when not component-specific
    int other = 0;       // second component of a pairwise check
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool valid() const { return violations.empty(); }
    /// One line per violation.
    std::string summary() const;
};

/// Checks dimensions and the ordering
/// lambda_1 < ... < lambda_m < 0 < lambda_{m+1} < ... < lambda_n at every node.
ValidationReport validate_system(const HyperbolicSystem& sys, const Grid& grid);

/// Throws ValidationError naming the first violation.
void ensure_valid(const HyperbolicSystem& sys, const Grid& grid);

/// Characteristic travel-time coordinate phi(x) = int_0^x 1/lambda.
///
/// Built by cumulative trapezoid on the grid nodes and linear within each
/// cell, so it is exactly monotone whenever lambda has one sign.
class TravelTime {
public:
    TravelTime(const Profile& speed, const Grid& grid);

    double operator()(double x) const;

    /// x with phi(x) = s, found by bisection to 1e-12 in x; empty when s lies
    /// outside the range of phi.
    std::optional<double> inverse(double s) const;

    /// phi(1).
    double total() const { return nodes_.back(); }
    std::span<const double> nodes() const { return nodes_; }
    const Grid& grid() const { return grid_; }

private:
    Grid grid_;
    std::vector<double> nodes_;
    bool decreasing_;
};

/// phi_i(x) for a negative component i (1 <= i <= m).
double phi(const HyperbolicSystem& sys, const Grid& grid, int i, double x);
std::optional<double> phi_inverse(const HyperbolicSystem& sys, const Grid& grid, int i, double s);

/// int_0^1 1/|lambda| dx.
///
/// Composite trapezoid on the grid refined once by Richardson extrapolation
/// against the midpoint-augmented grid, giving fourth-order accuracy for
/// smooth speeds.
double transit_time(const Profile& speed, const Grid& grid);

/// int 1/lambda_{m+1} + int 1/|lambda_m|.
double optimal_time(const HyperbolicSystem& sys, const Grid& grid);

/// int 1/lambda_{m+1} + sum_{i<=m} int 1/|lambda_i|.
double naive_time(const HyperbolicSystem& sys, const Grid& grid);

}  // namespace hyperstab
