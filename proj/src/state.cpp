#include "hyperstab/state.hpp"

#include "hyperstab/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hyperstab {

StateVector::StateVector(int n, int m, const Grid& grid)
    : n_(n), m_(m), grid_(grid), data_(static_cast<std::size_t>(n) * grid.size(), 0.0) {
    if (n < 1 || m < 0 || m > n) throw ValidationError("state needs n >= 1 and 0 <= m <= n");
}

std::span<double> StateVector::component(int i) {
    if (i < 1 || i > n_) throw ValidationError("component " + std::to_string(i) + " out of range");
    return {data_.data() + offset(i), static_cast<std::size_t>(grid_.size())};
}

std::span<const double> StateVector::component(int i) const {
    if (i < 1 || i > n_) throw ValidationError("component " + std::to_string(i) + " out of range");
    return {data_.data() + offset(i), static_cast<std::size_t>(grid_.size())};
}

BlockNorms StateVector::norms(int first, int last) const {
    BlockNorms out;
    const auto w = grid_.weights();
    double sq = 0.0;
    for (int i = first; i <= last; ++i) {
        const auto c = component(i);
        for (std::size_t k = 0; k < c.size(); ++k) {
            out.sup = std::max(out.sup, std::abs(c[k]));
            sq += w[k] * c[k] * c[k];
        }
    }
    out.l2 = std::sqrt(sq);
    return out;
}

double sup_distance(const StateVector& a, const StateVector& b) {
    if (!(a.grid() == b.grid()) || a.n() != b.n()) throw GridMismatch("states live on different grids");
    const auto ra = a.raw();
    const auto rb = b.raw();
    double d = 0.0;
    for (std::size_t k = 0; k < ra.size(); ++k) d = std::max(d, std::abs(ra[k] - rb[k]));
    return d;
}

}  // namespace hyperstab
