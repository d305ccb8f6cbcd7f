#pragma once

#include <span>
#include <string>
#include <vector>

namespace hyperstab {

class Grid;

/// Real function on [0,1] given in closed form or by uniform samples.
///
/// Tabulated profiles hold samples at x_k = k/(S-1) and are interpolated
/// linearly between them. The sample grid need not match any simulation grid.
class Profile {
public:
    enum class Kind { constant, affine, polynomial, tabulated };

    Profile() : Profile(constant(0.0)) {}

    static Profile constant(double c);
    /// a + b x
    static Profile affine(double a, double b);
    /// c0 + c1 x + c2 x^2 + c3 x^3 (at most four coefficients)
    static Profile polynomial(std::vector<double> coefficients);
    static Profile tabulated(std::vector<double> samples);

    double operator()(double x) const;

    Kind kind() const { return kind_; }
    std::span<const double> coefficients() const { return data_; }

    /// True when the profile is identically zero as stored.
    bool is_zero() const;
    /// True when the profile takes one value on all of [0,1].
    bool is_constant() const;

    std::vector<double> sample(const Grid& grid) const;

    std::string describe() const;

private:
    Profile(Kind kind, std::vector<double> data) : kind_(kind), data_(std::move(data)) {}

    Kind kind_;
    std::vector<double> data_;
};

}  // namespace hyperstab
