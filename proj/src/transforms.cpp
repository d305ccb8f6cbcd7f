#include "hyperstab/transforms.hpp"

#include "hyperstab/error.hpp"

#include <algorithm>
#include <cmath>

namespace hyperstab {

IntegralOperator::IntegralOperator(FredholmKernel kernel, int n) : kernel_(std::move(kernel)), n_(n) {
    if (n <= kernel_.m()) throw ValidationError("integral operator needs n > m");
}

namespace {

void check_grid(const IntegralOperator& op, const StateVector& s) {
    if (!(op.grid() == s.grid())) throw GridMismatch("state grid does not match kernel grid");
    if (s.n() != op.n() || s.m() != op.m()) throw GridMismatch("state shape does not match operator");
}

// out[k] += sign * sum_l table(k,l) w_l v[l]
void accumulate(const NodeTable& table, std::span<const double> wv, double sign, std::span<double> out) {
    const int size = table.size();
    for (int k = 0; k < size; ++k) {
        const auto row = table.row(k);
        double s = 0.0;
        for (int l = 0; l < size; ++l) s += row[l] * wv[l];
        out[k] += sign * s;
    }
}

std::vector<double> weighted(const Grid& grid, std::span<const double> v) {
    const auto w = grid.weights();
    std::vector<double> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = w[k] * v[k];
    return out;
}

// One pass through the cascade in component order. Reading the coupled
// components from `input` gives the forward map; reading the already
// recovered ones from `out` gives forward substitution.
StateVector sweep(const FredholmKernel& kernel, const StateVector& input, bool substitute) {
    StateVector out = input;
    const Grid& grid = kernel.grid();
    for (int i = 2; i <= kernel.m(); ++i) {
        for (int j = 1; j < i; ++j) {
            const auto source = substitute ? out.component(j) : input.component(j);
            const auto wv = weighted(grid, source);
            accumulate(kernel.entry(i, j), wv, substitute ? 1.0 : -1.0, out.component(i));
        }
    }
    return out;
}

}  // namespace

StateVector apply_fredholm(const IntegralOperator& op, const StateVector& z) {
    check_grid(op, z);
    return sweep(op.kernel(), z, false);
}

StateVector invert_fredholm(const IntegralOperator& op, const StateVector& gamma) {
    check_grid(op, gamma);
    return sweep(op.kernel(), gamma, true);
}

InverseKernel inverse_kernel(const IntegralOperator& op) {
    const Grid& grid = op.grid();
    const int m = op.m();
    InverseKernel inv{FredholmKernel(m, grid)};
    const auto w = grid.weights();
    for (int j = 1; j < m; ++j) {
        for (int l = 0; l < grid.size(); ++l) {
            StateVector impulse(op.n(), m, grid);
            impulse(j, l) = 1.0 / w[l];
            const auto column = invert_fredholm(op, impulse);
            for (int i = j + 1; i <= m; ++i) {
                auto& theta = inv.theta.entry(i, j);
                for (int k = 0; k < grid.size(); ++k) theta(k, l) = -column(i, k);
            }
        }
    }
    for (int i = 2; i <= m; ++i) {
        for (int j = 1; j < i; ++j) {
            const auto& theta = inv.theta.entry(i, j);
            auto& mask = inv.theta.support(i, j);
            for (int k = 0; k < grid.size(); ++k) {
                for (int l = 0; l < grid.size(); ++l) {
                    mask[static_cast<std::size_t>(k) * grid.size() + l] = theta(k, l) != 0.0 ? 1 : 0;
                }
            }
        }
    }
    return inv;
}

StateVector apply_inverse_kernel(const InverseKernel& inv, const StateVector& gamma) {
    if (!(inv.theta.grid() == gamma.grid()) || gamma.m() != inv.theta.m()) {
        throw GridMismatch("state does not match inverse kernel");
    }
    return sweep(inv.theta, gamma, false);
}

double composition_defect(const IntegralOperator& op, const InverseKernel& inv) {
    const Grid& grid = op.grid();
    if (!(inv.theta.grid() == grid)) throw GridMismatch("inverse kernel grid does not match operator");
    const int m = op.m();
    const int size = grid.size();
    const auto w = grid.weights();
    double defect = 0.0;

    // Block (i,j), i > j, of (I - Theta W)(I - K W):
    //   -(K_ij + Theta_ij) W + sum_{j<p<i} Theta_ip W K_pj W
    std::vector<double> block(static_cast<std::size_t>(size) * size);
    for (int i = 2; i <= m; ++i) {
        for (int j = 1; j < i; ++j) {
            const auto& k_ij = op.kernel().entry(i, j);
            const auto& t_ij = inv.theta.entry(i, j);
            for (int a = 0; a < size; ++a) {
                for (int b = 0; b < size; ++b) {
                    block[static_cast<std::size_t>(a) * size + b] = -(k_ij(a, b) + t_ij(a, b)) * w[b];
                }
            }
            for (int p = j + 1; p < i; ++p) {
                const auto& t_ip = inv.theta.entry(i, p);
                const auto& k_pj = op.kernel().entry(p, j);
                for (int a = 0; a < size; ++a) {
                    for (int s = 0; s < size; ++s) {
                        const double left = t_ip(a, s) * w[s];
                        if (left == 0.0) continue;
                        const auto krow = k_pj.row(s);
                        double* out = &block[static_cast<std::size_t>(a) * size];
                        for (int b = 0; b < size; ++b) out[b] += left * krow[b] * w[b];
                    }
                }
            }
            for (double v : block) defect = std::max(defect, std::abs(v));
        }
    }
    return defect;
}

RieszFeedback RieszFeedback::from_profiles(const std::vector<std::vector<Profile>>& f, const Grid& grid) {
    RieszFeedback law{grid, static_cast<int>(f.size()), f.empty() ? 0 : static_cast<int>(f.front().size()), {}};
    for (const auto& row : f) {
        if (static_cast<int>(row.size()) != law.n) throw ValidationError("riesz kernels must form an m x n array");
        std::vector<std::vector<double>> sampled;
        for (const auto& p : row) sampled.push_back(p.sample(grid));
        law.f.push_back(std::move(sampled));
    }
    return law;
}

namespace {

std::vector<double> trace_feedback(const FredholmKernel& kernel, const StateVector& z) {
    const Grid& grid = kernel.grid();
    const int last = grid.cells();
    std::vector<double> h(static_cast<std::size_t>(kernel.m()), 0.0);
    for (int i = 2; i <= kernel.m(); ++i) {
        double s = 0.0;
        for (int j = 1; j < i; ++j) {
            const auto row = kernel.entry(i, j).row(last);
            const auto zj = z.component(j);
            const auto w = grid.weights();
            for (int l = 0; l < grid.size(); ++l) s += row[l] * w[l] * zj[l];
        }
        h[i - 1] = -s;
    }
    return h;
}

}  // namespace

std::vector<double> feedback_H(const FeedbackLaw& law, const StateVector& gamma) {
    const auto* fred = std::get_if<FredholmFeedback>(&law);
    if (fred == nullptr || !fred->op) throw ValidationError("feedback_H needs the fredholm feedback variant");
    const auto z = invert_fredholm(*fred->op, gamma);
    return trace_feedback(fred->op->kernel(), z);
}

std::vector<double> feedback_H_via_inverse_kernel(const IntegralOperator& op, const InverseKernel& inv,
                                                  const StateVector& gamma) {
    check_grid(op, gamma);
    const auto z = apply_inverse_kernel(inv, gamma);
    return trace_feedback(op.kernel(), z);
}

std::vector<double> feedback_riesz(const FeedbackLaw& law, const StateVector& u) {
    const auto* riesz = std::get_if<RieszFeedback>(&law);
    if (riesz == nullptr) throw ValidationError("feedback_riesz needs the riesz feedback variant");
    if (!(riesz->grid == u.grid())) throw GridMismatch("riesz kernels and state live on different grids");
    if (riesz->n != u.n() || riesz->m != u.m()) throw GridMismatch("riesz kernels do not match state shape");
    std::vector<double> out(static_cast<std::size_t>(riesz->m), 0.0);
    const auto w = u.grid().weights();
    for (int i = 0; i < riesz->m; ++i) {
        double s = 0.0;
        for (int j = 0; j < riesz->n; ++j) {
            const auto& f = riesz->f[i][j];
            const auto uj = u.component(j + 1);
            for (std::size_t k = 0; k < f.size(); ++k) s += w[k] * f[k] * uj[k];
        }
        out[i] = s;
    }
    return out;
}

std::vector<double> evaluate_feedback(const FeedbackLaw& law, const StateVector& state) {
    if (std::holds_alternative<ZeroFeedback>(law)) return std::vector<double>(static_cast<std::size_t>(state.m()), 0.0);
    if (std::holds_alternative<RieszFeedback>(law)) return feedback_riesz(law, state);
    return feedback_H(law, state);
}

}  // namespace hyperstab
