#pragma once

#include "hyperstab/grid.hpp"

#include <span>
#include <vector>

namespace hyperstab {

struct BlockNorms {
    double sup = 0.0;
    double l2 = 0.0;
};

/// n components sampled on one grid; components 1..m form the negative block.
class StateVector {
public:
    StateVector(int n, int m, const Grid& grid);

    int n() const { return n_; }
    int m() const { return m_; }
    const Grid& grid() const { return grid_; }

    std::span<double> component(int i);
    std::span<const double> component(int i) const;

    /// Value of component i at node k.
    double& operator()(int i, int k) { return data_[offset(i) + static_cast<std::size_t>(k)]; }
    double operator()(int i, int k) const { return data_[offset(i) + static_cast<std::size_t>(k)]; }

    /// Norms over components [first, last], discrete L2 with trapezoid weights.
    BlockNorms norms(int first, int last) const;
    BlockNorms minus_norms() const { return norms(1, m_); }
    BlockNorms plus_norms() const { return norms(m_ + 1, n_); }
    BlockNorms total_norms() const { return norms(1, n_); }
    double sup_norm() const { return total_norms().sup; }

    std::span<const double> raw() const { return data_; }

private:
    std::size_t offset(int i) const { return static_cast<std::size_t>(i - 1) * grid_.size(); }

    int n_;
    int m_;
    Grid grid_;
    std::vector<double> data_;
};

/// Sup norm of a - b.
double sup_distance(const StateVector& a, const StateVector& b);

}  // namespace hyperstab
