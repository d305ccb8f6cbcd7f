#pragma once

#include "hyperstab/kernels.hpp"
#include "hyperstab/state.hpp"

#include <memory>
#include <variant>
#include <vector>

namespace hyperstab {

/// Discretized Fredholm map (I - K o) with trapezoid weights.
///
/// Components 1 and m+1..n pass through; component i in 2..m receives
/// -sum_{j<i} int k_ij(., y) z_j(y) dy. In component-major ordering the
/// matrix is unit lower block-triangular, so the inverse is an exact forward
/// substitution.
class IntegralOperator {
public:
    IntegralOperator(FredholmKernel kernel, int n);

    const FredholmKernel& kernel() const { return kernel_; }
    const Grid& grid() const { return kernel_.grid(); }
    int n() const { return n_; }
    int m() const { return kernel_.m(); }

private:
    FredholmKernel kernel_;
    int n_;
};

StateVector apply_fredholm(const IntegralOperator& op, const StateVector& z);
StateVector invert_fredholm(const IntegralOperator& op, const StateVector& gamma);

/// Theta with inverse(gamma)_i = gamma_i - sum_{j<i} int theta_ij(., y) gamma_j(y) dy.
struct InverseKernel {
    FredholmKernel theta;
};

/// Columns of the discrete inverse recovered by inverting sampled impulses.
InverseKernel inverse_kernel(const IntegralOperator& op);

/// Applies I - Theta o with the same quadrature as the forward map.
StateVector apply_inverse_kernel(const InverseKernel& inv, const StateVector& gamma);

/// Sup-norm distance of (I - Theta W)(I - K W) from the identity, where W is
/// the diagonal of quadrature weights.
double composition_defect(const IntegralOperator& op, const InverseKernel& inv);

struct ZeroFeedback {};

/// u -> (sum_j int f_ij u_j)_{i <= m}; f tables are m x n node samples.
struct RieszFeedback {
    Grid grid;
    int m = 0;
    int n = 0;
    std::vector<std::vector<std::vector<double>>> f;

    static RieszFeedback from_profiles(const std::vector<std::vector<Profile>>& f, const Grid& grid);
};

/// H gamma = -int K-(1,y) [F^{-1} gamma]_-(y) dy.
struct FredholmFeedback {
    std::shared_ptr<const IntegralOperator> op;
};

using FeedbackLaw = std::variant<ZeroFeedback, RieszFeedback, FredholmFeedback>;

std::vector<double> feedback_H(const FeedbackLaw& law, const StateVector& gamma);
std::vector<double> feedback_riesz(const FeedbackLaw& law, const StateVector& u);

/// Second route for H via the tabulated inverse kernel:
/// -int K-(1,.) (I - Theta) gamma_-.
std::vector<double> feedback_H_via_inverse_kernel(const IntegralOperator& op, const InverseKernel& inv,
                                                  const StateVector& gamma);

/// Dispatches on the variant; the zero law returns m zeros.
std::vector<double> evaluate_feedback(const FeedbackLaw& law, const StateVector& state);

}  // namespace hyperstab
