#pragma once

#include "hyperstab/grid.hpp"
#include "hyperstab/profile.hpp"
#include "hyperstab/system.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace hyperstab {

/// Trace-coupling matrix G = [[G-, 0], [G+, 0]] of the intermediate target
/// system. G- is strictly lower triangular (the cascade); only the left m
/// columns are stored since the right block is identically zero.
class CascadeMatrix {
public:
    CascadeMatrix(int n, int m);

    int n() const { return n_; }
    int m() const { return m_; }

    /// g_ij for 1 <= j < i <= m. Any other (i,j) inside the m x m block is zero.
    const Profile& g(int i, int j) const;
    void set_g(int i, int j, Profile p);

    /// Row r (1..n-m) of G+, column j (1..m).
    const Profile& gplus(int r, int j) const;
    void set_gplus(int r, int j, Profile p);

    /// True when every g_ij is identically zero.
    bool gminus_is_zero() const;

private:
    int n_;
    int m_;
    std::vector<Profile> gminus_;  // m x m row-major, only j < i used
    std::vector<Profile> gplus_;   // (n-m) x m row-major
};

enum class SourceMode { gamma_source, z_source };

/// Left n x m block B(x) of the source B(x) * state(t,0) in a target system.
struct TargetSource {
    SourceMode mode = SourceMode::gamma_source;
    int n = 0;
    int m = 0;
    std::vector<std::vector<Profile>> left;  // n x m

    const Profile& at(int i, int j) const {
        return left.at(static_cast<std::size_t>(i - 1)).at(static_cast<std::size_t>(j - 1));
    }
};

/// Source G of the intermediate (gamma) target system.
TargetSource build_gamma_source(const CascadeMatrix& g);
/// Source G~ of the final (z) target system: rows 1..m vanish, G+ kept.
TargetSource build_z_source(const CascadeMatrix& g);

/// Dense (N+1) x (N+1) table indexed by (x node, y node).
class NodeTable {
public:
    NodeTable() = default;
    explicit NodeTable(int size, double fill = 0.0)
        : size_(size), data_(static_cast<std::size_t>(size) * size, fill) {}

    int size() const { return size_; }
    double& operator()(int xk, int yl) { return data_[static_cast<std::size_t>(xk) * size_ + yl]; }
    double operator()(int xk, int yl) const {
        return data_[static_cast<std::size_t>(xk) * size_ + yl];
    }
    /// Row at fixed x node, contiguous over y.
    std::span<const double> row(int xk) const {
        return {data_.data() + static_cast<std::size_t>(xk) * size_, static_cast<std::size_t>(size_)};
    }
    std::span<double> row(int xk) {
        return {data_.data() + static_cast<std::size_t>(xk) * size_, static_cast<std::size_t>(size_)};
    }

private:
    int size_ = 0;
    std::vector<double> data_;
};

/// Strictly lower-triangular m x m kernel tabulated on a grid.
///
/// Entries exist for 2 <= i <= m, 1 <= j < i. Row 1 is empty. The same type
/// holds the inverse kernel Theta.
class FredholmKernel {
public:
    FredholmKernel(int m, const Grid& grid);

    int m() const { return m_; }
    const Grid& grid() const { return grid_; }

    static bool in_cascade(int m, int i, int j) { return i >= 2 && i <= m && j >= 1 && j < i; }

    NodeTable& entry(int i, int j);
    const NodeTable& entry(int i, int j) const;

    /// Nonzero-support flag per node pair; filled by the closed-form builder.
    std::vector<std::uint8_t>& support(int i, int j);
    const std::vector<std::uint8_t>& support(int i, int j) const;

    /// Bilinear interpolation of entry (i,j) at (x,y).
    double at(int i, int j, double x, double y) const;

    /// True when every stored value is zero.
    bool is_zero() const;

private:
    std::size_t index(int i, int j) const;

    int m_;
    Grid grid_;
    std::vector<NodeTable> tables_;
    std::vector<std::vector<std::uint8_t>> support_;
};

/// Closed-form kernel from the method of characteristics:
/// k_ij(x,y) = g_ij(phi_i^{-1}(phi_i(x) - phi_j(y))) / (-lambda_j(y)) when
/// phi_i(x) <= phi_j(y), zero otherwise, and zero on the side x = 0.
class KernelEvaluator {
public:
    KernelEvaluator(const HyperbolicSystem& sys, const CascadeMatrix& g, const Grid& grid);

    double operator()(int i, int j, double x, double y) const;
    bool in_support(int i, int j, double x, double y) const;

    const TravelTime& travel_time(int i) const { return phis_.at(static_cast<std::size_t>(i - 1)); }

private:
    HyperbolicSystem sys_;
    CascadeMatrix g_;
    std::vector<TravelTime> phis_;
};

double eval_kernel(const HyperbolicSystem& sys, const CascadeMatrix& g, const Grid& grid, int i,
                   int j, double x, double y);

/// Node tables of the closed-form kernel, with support masks.
FredholmKernel tabulate_kernel(const HyperbolicSystem& sys, const CascadeMatrix& g,
                               const Grid& grid);

/// Independent route: marches lambda_i(x) k_x + (lambda_j(y) k)_y = 0 in y
/// with first-order upwind in x from k(x,0) = -g_ij(x)/lambda_j(0) and
/// k(0,y) = 0.
FredholmKernel kernel_oracle_solve(const HyperbolicSystem& sys, const CascadeMatrix& g,
                                   const Grid& grid);

struct KernelResidual {
    int i = 0;
    int j = 0;
    /// Max |lambda_i(x) k_x + (lambda_j(y) k)_y| by centered differences over
    /// interior nodes whose stencil does not straddle the support interface.
    double interior = 0.0;
    /// Max |k(0,y)|.
    double boundary_x0 = 0.0;
    /// Max |k(x,0) + g_ij(x)/lambda_j(0)| for x > 0.
    double boundary_y0 = 0.0;
};

std::vector<KernelResidual> kernel_residual(const HyperbolicSystem& sys, const CascadeMatrix& g,
                                            const FredholmKernel& k);

/// Max over entries and node pairs of |a - b|.
double max_node_gap(const FredholmKernel& a, const FredholmKernel& b);
/// Max over entries of the trapezoid L1 norm of a - b on the unit square.
double mean_node_gap(const FredholmKernel& a, const FredholmKernel& b);

/// CSV `i,j,x,y,value`, row-major over (x,y) nodes, 17 significant digits.
void write_kernel_csv(std::ostream& os, const FredholmKernel& k);
/// Same schema restricted to the x = 1 row: the feedback trace K-(1,.).
void write_kernel_trace_csv(std::ostream& os, const FredholmKernel& k);

}  // namespace hyperstab
