#include "hyperstab/kernels.hpp"

#include "hyperstab/csv.hpp"
#include "hyperstab/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace hyperstab {

namespace {

// Slack on the closed support test phi_i(x) <= phi_j(y); the travel times are
// cumulative sums, so equal continuous values can differ by a few ulps.
constexpr double kSupportSlack = 1e-12;

std::string pair_name(int i, int j) { return "(" + std::to_string(i) + "," + std::to_string(j) + ")"; }

}  // namespace

CascadeMatrix::CascadeMatrix(int n, int m)
    : n_(n),
      m_(m),
      gminus_(static_cast<std::size_t>(m) * m, Profile::constant(0.0)),
      gplus_(static_cast<std::size_t>(n - m) * m, Profile::constant(0.0)) {
    if (m < 1 || n <= m) throw ValidationError("cascade matrix needs 1 <= m <= n-1");
}

const Profile& CascadeMatrix::g(int i, int j) const {
    if (i < 1 || i > m_ || j < 1 || j > m_) throw ValidationError("g" + pair_name(i, j) + " out of range");
    return gminus_[static_cast<std::size_t>(i - 1) * m_ + (j - 1)];
}

void CascadeMatrix::set_g(int i, int j, Profile p) {
    if (!FredholmKernel::in_cascade(m_, i, j)) {
        throw ValidationError("g" + pair_name(i, j) + " violates the cascade structure (need j < i <= m)");
    }
    gminus_[static_cast<std::size_t>(i - 1) * m_ + (j - 1)] = std::move(p);
}

const Profile& CascadeMatrix::gplus(int r, int j) const {
    if (r < 1 || r > n_ - m_ || j < 1 || j > m_) {
        throw ValidationError("gplus" + pair_name(r, j) + " out of range");
    }
    return gplus_[static_cast<std::size_t>(r - 1) * m_ + (j - 1)];
}

void CascadeMatrix::set_gplus(int r, int j, Profile p) {
    if (r < 1 || r > n_ - m_ || j < 1 || j > m_) {
        throw ValidationError("gplus" + pair_name(r, j) + " out of range");
    }
    gplus_[static_cast<std::size_t>(r - 1) * m_ + (j - 1)] = std::move(p);
}

bool CascadeMatrix::gminus_is_zero() const {
    return std::all_of(gminus_.begin(), gminus_.end(), [](const Profile& p) { return p.is_zero(); });
}

namespace {

TargetSource build_source(const CascadeMatrix& g, SourceMode mode) {
    TargetSource src;
    src.mode = mode;
    src.n = g.n();
    src.m = g.m();
    src.left.assign(static_cast<std::size_t>(g.n()),
                    std::vector<Profile>(static_cast<std::size_t>(g.m()), Profile::constant(0.0)));
    if (mode == SourceMode::gamma_source) {
        for (int i = 2; i <= g.m(); ++i) {
            for (int j = 1; j < i; ++j) src.left[i - 1][j - 1] = g.g(i, j);
        }
    }
    for (int r = 1; r <= g.n() - g.m(); ++r) {
        for (int j = 1; j <= g.m(); ++j) src.left[g.m() + r - 1][j - 1] = g.gplus(r, j);
    }
    return src;
}

}  // namespace

TargetSource build_gamma_source(const CascadeMatrix& g) { return build_source(g, SourceMode::gamma_source); }

TargetSource build_z_source(const CascadeMatrix& g) { return build_source(g, SourceMode::z_source); }

FredholmKernel::FredholmKernel(int m, const Grid& grid) : m_(m), grid_(grid) {
    if (m < 1) throw ValidationError("kernel needs m >= 1");
    const std::size_t count = static_cast<std::size_t>(m) * (m - 1) / 2;
    tables_.assign(count, NodeTable(grid.size()));
    support_.assign(count, std::vector<std::uint8_t>(static_cast<std::size_t>(grid.size()) * grid.size(), 0));
}

std::size_t FredholmKernel::index(int i, int j) const {
    if (!in_cascade(m_, i, j)) {
        throw ValidationError("kernel entry " + pair_name(i, j) + " is outside the cascade (need j < i <= m)");
    }
    return static_cast<std::size_t>(i - 1) * (i - 2) / 2 + (j - 1);
}

NodeTable& FredholmKernel::entry(int i, int j) { return tables_[index(i, j)]; }
const NodeTable& FredholmKernel::entry(int i, int j) const { return tables_[index(i, j)]; }

std::vector<std::uint8_t>& FredholmKernel::support(int i, int j) { return support_[index(i, j)]; }
const std::vector<std::uint8_t>& FredholmKernel::support(int i, int j) const { return support_[index(i, j)]; }

double FredholmKernel::at(int i, int j, double x, double y) const {
    const auto& t = entry(i, j);
    const int a = grid_.cell_of(x);
    const int b = grid_.cell_of(y);
    const double s = x * grid_.cells() - a;
    const double r = y * grid_.cells() - b;
    return (1 - s) * (1 - r) * t(a, b) + s * (1 - r) * t(a + 1, b) + (1 - s) * r * t(a, b + 1) +
           s * r * t(a + 1, b + 1);
}

bool FredholmKernel::is_zero() const {
    const int n = grid_.size();
    for (const auto& t : tables_) {
        for (int a = 0; a < n; ++a) {
            for (double v : t.row(a)) {
                if (v != 0.0) return false;
            }
        }
    }
    return true;
}

KernelEvaluator::KernelEvaluator(const HyperbolicSystem& sys, const CascadeMatrix& g, const Grid& grid)
    : sys_(sys), g_(g) {
    ensure_valid(sys, grid);
    if (g.n() != sys.n || g.m() != sys.m) throw ValidationError("cascade matrix shape does not match system");
    phis_.reserve(static_cast<std::size_t>(sys.m));
    for (int i = 1; i <= sys.m; ++i) phis_.emplace_back(sys.speed(i), grid);
}

bool KernelEvaluator::in_support(int i, int j, double x, double y) const {
    if (!FredholmKernel::in_cascade(sys_.m, i, j)) {
        throw ValidationError("kernel entry " + pair_name(i, j) + " is outside the cascade");
    }
    if (x <= 0.0) return false;
    return travel_time(i)(x) <= travel_time(j)(y) + kSupportSlack;
}

double KernelEvaluator::operator()(int i, int j, double x, double y) const {
    if (!in_support(i, j, x, y)) return 0.0;
    const auto& phi_i = travel_time(i);
    double foot = x;
    if (y > 0.0) {
        const double s = std::clamp(phi_i(x) - travel_time(j)(y), phi_i.total(), 0.0);
        foot = phi_i.inverse(s).value_or(0.0);
    }
    return g_.g(i, j)(foot) / (-sys_.speed(j)(y));
}

double eval_kernel(const HyperbolicSystem& sys, const CascadeMatrix& g, const Grid& grid, int i, int j,
                   double x, double y) {
    return KernelEvaluator(sys, g, grid)(i, j, x, y);
}

FredholmKernel tabulate_kernel(const HyperbolicSystem& sys, const CascadeMatrix& g, const Grid& grid) {
    const KernelEvaluator eval(sys, g, grid);
    FredholmKernel k(sys.m, grid);
    const int size = grid.size();
    for (int i = 2; i <= sys.m; ++i) {
        for (int j = 1; j < i; ++j) {
            if (g.g(i, j).is_zero()) continue;
            auto& table = k.entry(i, j);
            auto& mask = k.support(i, j);
            for (int a = 0; a < size; ++a) {
                for (int b = 0; b < size; ++b) {
                    const double x = grid.node(a);
                    const double y = grid.node(b);
                    if (!eval.in_support(i, j, x, y)) continue;
                    mask[static_cast<std::size_t>(a) * size + b] = 1;
                    table(a, b) = eval(i, j, x, y);
                }
            }
        }
    }
    return k;
}

FredholmKernel kernel_oracle_solve(const HyperbolicSystem& sys, const CascadeMatrix& g, const Grid& grid) {
    ensure_valid(sys, grid);
    FredholmKernel k(sys.m, grid);
    const int size = grid.size();
    const double h = grid.spacing();

    for (int i = 2; i <= sys.m; ++i) {
        const auto lam_i = sys.speed(i).sample(grid);
        const double lam_i_max = *std::max_element(lam_i.begin(), lam_i.end(),
                                                   [](double a, double b) { return std::abs(a) < std::abs(b); });
        for (int j = 1; j < i; ++j) {
            if (g.g(i, j).is_zero()) continue;
            const Profile& lam_j = sys.speed(j);
            auto& table = k.entry(i, j);
            auto& mask = k.support(i, j);

            // w = lambda_j(y) k is transported with speed lambda_i(x)/lambda_j(y) > 0.
            std::vector<double> w(static_cast<std::size_t>(size));
            std::vector<double> next(w.size());
            w[0] = 0.0;
            for (int a = 1; a < size; ++a) w[a] = -g.g(i, j)(grid.node(a));
            for (int a = 0; a < size; ++a) table(a, 0) = w[a] / lam_j(0.0);

            for (int b = 0; b < grid.cells(); ++b) {
                const double y0 = grid.node(b);
                // slowest |lambda_j| over the y interval bounds the speed; sample both ends and midpoint
                const double lam_j_min = std::min({std::abs(lam_j(y0)), std::abs(lam_j(y0 + 0.5 * h)),
                                                   std::abs(lam_j(y0 + h))});
                const double c_max = std::abs(lam_i_max) / lam_j_min;
                const int substeps = std::max(1, static_cast<int>(std::ceil(c_max - 1e-12)));
                const double dy = h / substeps;
                for (int s = 0; s < substeps; ++s) {
                    const double y = y0 + s * dy;
                    const double lj = lam_j(y);
                    next[0] = 0.0;
                    for (int a = 1; a < size; ++a) {
                        const double courant = lam_i[a] / lj * dy / h;
                        if (courant > 1.0 + 1e-12 || courant < 0.0) {
                            throw StepError("kernel oracle: Courant number " + std::to_string(courant) +
                                            " outside [0,1]");
                        }
                        next[a] = w[a] - courant * (w[a] - w[a - 1]);
                    }
                    std::swap(w, next);
                }
                const double lj_end = lam_j(grid.node(b + 1));
                for (int a = 0; a < size; ++a) table(a, b + 1) = w[a] / lj_end;
            }
            for (int a = 0; a < size; ++a) {
                for (int b = 0; b < size; ++b) {
                    mask[static_cast<std::size_t>(a) * size + b] = table(a, b) != 0.0 ? 1 : 0;
                }
            }
        }
    }
    return k;
}

std::vector<KernelResidual> kernel_residual(const HyperbolicSystem& sys, const CascadeMatrix& g,
                                            const FredholmKernel& k) {
    const Grid& grid = k.grid();
    const KernelEvaluator eval(sys, g, grid);
    const int size = grid.size();
    const double h = grid.spacing();
    std::vector<KernelResidual> out;

    for (int i = 2; i <= sys.m; ++i) {
        const auto lam_i = sys.speed(i).sample(grid);
        for (int j = 1; j < i; ++j) {
            const auto lam_j = sys.speed(j).sample(grid);
            const auto& t = k.entry(i, j);
            KernelResidual r{i, j, 0.0, 0.0, 0.0};

            std::vector<std::uint8_t> supp(static_cast<std::size_t>(size) * size);
            for (int a = 0; a < size; ++a) {
                for (int b = 0; b < size; ++b) {
                    supp[static_cast<std::size_t>(a) * size + b] =
                        eval.in_support(i, j, grid.node(a), grid.node(b)) ? 1 : 0;
                }
            }
            auto flag = [&](int a, int b) { return supp[static_cast<std::size_t>(a) * size + b]; };

            for (int a = 1; a < size - 1; ++a) {
                for (int b = 1; b < size - 1; ++b) {
                    const auto f = flag(a, b);
                    if (flag(a - 1, b) != f || flag(a + 1, b) != f || flag(a, b - 1) != f || flag(a, b + 1) != f) {
                        continue;
                    }
                    const double dx = (t(a + 1, b) - t(a - 1, b)) / (2 * h);
                    const double dy = (lam_j[b + 1] * t(a, b + 1) - lam_j[b - 1] * t(a, b - 1)) / (2 * h);
                    r.interior = std::max(r.interior, std::abs(lam_i[a] * dx + dy));
                }
            }
            for (int b = 0; b < size; ++b) r.boundary_x0 = std::max(r.boundary_x0, std::abs(t(0, b)));
            for (int a = 1; a < size; ++a) {
                const double want = -g.g(i, j)(grid.node(a)) / lam_j[0];
                r.boundary_y0 = std::max(r.boundary_y0, std::abs(t(a, 0) - want));
            }
            out.push_back(r);
        }
    }
    return out;
}

double max_node_gap(const FredholmKernel& a, const FredholmKernel& b) {
    if (!(a.grid() == b.grid()) || a.m() != b.m()) throw GridMismatch("kernels live on different grids");
    const int size = a.grid().size();
    double gap = 0.0;
    for (int i = 2; i <= a.m(); ++i) {
        for (int j = 1; j < i; ++j) {
            const auto& ta = a.entry(i, j);
            const auto& tb = b.entry(i, j);
            for (int x = 0; x < size; ++x) {
                for (int y = 0; y < size; ++y) gap = std::max(gap, std::abs(ta(x, y) - tb(x, y)));
            }
        }
    }
    return gap;
}

double mean_node_gap(const FredholmKernel& a, const FredholmKernel& b) {
    if (!(a.grid() == b.grid()) || a.m() != b.m()) throw GridMismatch("kernels live on different grids");
    const int size = a.grid().size();
    const auto w = a.grid().weights();
    double gap = 0.0;
    for (int i = 2; i <= a.m(); ++i) {
        for (int j = 1; j < i; ++j) {
            const auto& ta = a.entry(i, j);
            const auto& tb = b.entry(i, j);
            double sum = 0.0;
            for (int x = 0; x < size; ++x) {
                for (int y = 0; y < size; ++y) sum += w[x] * w[y] * std::abs(ta(x, y) - tb(x, y));
            }
            gap = std::max(gap, sum);
        }
    }
    return gap;
}

namespace {

void write_rows(std::ostream& os, const FredholmKernel& k, int first_x) {
    csv_precision(os);
    os << "i,j,x,y,value\n";
    const Grid& grid = k.grid();
    for (int i = 2; i <= k.m(); ++i) {
        for (int j = 1; j < i; ++j) {
            const auto& t = k.entry(i, j);
            for (int a = first_x; a < grid.size(); ++a) {
                for (int b = 0; b < grid.size(); ++b) {
                    os << i << ',' << j << ',' << grid.node(a) << ',' << grid.node(b) << ',' << t(a, b) << '\n';
                }
            }
        }
    }
}

}  // namespace

void write_kernel_csv(std::ostream& os, const FredholmKernel& k) { write_rows(os, k, 0); }

void write_kernel_trace_csv(std::ostream& os, const FredholmKernel& k) { write_rows(os, k, k.grid().cells()); }

}  // namespace hyperstab
