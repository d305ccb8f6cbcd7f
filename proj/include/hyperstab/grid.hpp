#pragma once

#include <span>
#include <vector>

namespace hyperstab {

/// Uniform grid on [0,1] with nodes x_k = k/N, k = 0..N.
class Grid {
public:
    static constexpr int kMinCells = 8;

    explicit Grid(int cells);

    int cells() const { return cells_; }
    int size() const { return cells_ + 1; }
    double spacing() const { return spacing_; }
    double node(int k) const { return k * spacing_; }

    /// Composite trapezoid weights (h/2, h, ..., h, h/2).
    std::span<const double> weights() const { return weights_; }

    /// Index of the cell containing x, clamped to [0, N-1].
    int cell_of(double x) const;

    bool operator==(const Grid& other) const { return cells_ == other.cells_; }

private:
    int cells_;
    double spacing_;
    std::vector<double> weights_;
};

/// Composite trapezoid of node samples over [0,1].
double trapezoid(const Grid& grid, std::span<const double> samples);

/// Piecewise-linear interpolation of node samples at x in [0,1].
double interpolate(const Grid& grid, std::span<const double> samples, double x);

}  // namespace hyperstab
