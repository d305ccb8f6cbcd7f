#include "hyperstab/profile.hpp"

#include "hyperstab/error.hpp"
#include "hyperstab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hyperstab {

Profile Profile::constant(double c) { return Profile(Kind::constant, {c}); }

Profile Profile::affine(double a, double b) { return Profile(Kind::affine, {a, b}); }

Profile Profile::polynomial(std::vector<double> coefficients) {
    if (coefficients.empty() || coefficients.size() > 4) {
        throw ValidationError("polynomial profile takes 1 to 4 coefficients");
    }
    return Profile(Kind::polynomial, std::move(coefficients));
}

Profile Profile::tabulated(std::vector<double> samples) {
    if (samples.size() < 2) throw ValidationError("tabulated profile needs at least 2 samples");
    for (double v : samples) {
        if (!std::isfinite(v)) throw ValidationError("tabulated profile has a non-finite sample");
    }
    return Profile(Kind::tabulated, std::move(samples));
}

double Profile::operator()(double x) const {
    switch (kind_) {
        case Kind::constant:
            return data_[0];
        case Kind::affine:
            return data_[0] + data_[1] * x;
        case Kind::polynomial: {
            double v = 0.0;
            for (auto it = data_.rbegin(); it != data_.rend(); ++it) v = v * x + *it;
            return v;
        }
        case Kind::tabulated: {
            const int cells = static_cast<int>(data_.size()) - 1;
            const int k = std::clamp(static_cast<int>(std::floor(x * cells)), 0, cells - 1);
            const double t = x * cells - k;
            return (1.0 - t) * data_[k] + t * data_[k + 1];
        }
    }
    return 0.0;
}

bool Profile::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return v == 0.0; });
}

bool Profile::is_constant() const {
    switch (kind_) {
        case Kind::constant:
            return true;
        case Kind::affine:
            return data_[1] == 0.0;
        case Kind::polynomial:
            return std::all_of(data_.begin() + 1, data_.end(), [](double v) { return v == 0.0; });
        case Kind::tabulated:
            return std::all_of(data_.begin(), data_.end(),
                               [&](double v) { return v == data_.front(); });
    }
    return false;
}

std::vector<double> Profile::sample(const Grid& grid) const {
    std::vector<double> out(static_cast<std::size_t>(grid.size()));
    for (int k = 0; k < grid.size(); ++k) out[k] = (*this)(grid.node(k));
    return out;
}

std::string Profile::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case Kind::constant:
            os << "constant:" << data_[0];
            break;
        case Kind::affine:
            os << "affine:" << data_[0] << ',' << data_[1];
            break;
        case Kind::polynomial:
            os << "poly:";
            for (std::size_t i = 0; i < data_.size(); ++i) os << (i ? "," : "") << data_[i];
            break;
        case Kind::tabulated:
            os << "table[" << data_.size() << "]";
            break;
    }
    return os.str();
}

}  // namespace hyperstab
