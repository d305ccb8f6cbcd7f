#include "hyperstab/grid.hpp"

#include "hyperstab/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hyperstab {

Grid::Grid(int cells) : cells_(cells), spacing_(0.0) {
    if (cells < kMinCells) {
        throw ValidationError("grid needs at least " + std::to_string(kMinCells) +
                              " cells, got " + std::to_string(cells));
    }
    spacing_ = 1.0 / cells;
    weights_.assign(static_cast<std::size_t>(cells) + 1, spacing_);
    weights_.front() = 0.5 * spacing_;
    weights_.back() = 0.5 * spacing_;
}

int Grid::cell_of(double x) const {
    const int k = static_cast<int>(std::floor(x * cells_));
    return std::clamp(k, 0, cells_ - 1);
}

double trapezoid(const Grid& grid, std::span<const double> samples) {
    if (static_cast<int>(samples.size()) != grid.size()) {
        throw GridMismatch("trapezoid: sample count does not match grid");
    }
    const auto w = grid.weights();
    double sum = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) sum += w[k] * samples[k];
    return sum;
}

double interpolate(const Grid& grid, std::span<const double> samples, double x) {
    const int k = grid.cell_of(x);
    const double t = (x - grid.node(k)) * grid.cells();
    return (1.0 - t) * samples[k] + t * samples[k + 1];
}

}  // namespace hyperstab
