#pragma once

#include "hyperstab/error.hpp"
#include "hyperstab/kernels.hpp"
#include "hyperstab/simulator.hpp"
#include "hyperstab/system.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hyperstab {

enum class FeedbackKind { zero, riesz, fredholm };

/// Smooth cos^2 bump of the given height and full width centred at `center`.
struct BumpInit {
    double center = 0.5;
    double width = 0.5;
    double height = 1.0;
};

/// Independent uniform values in [-amplitude, amplitude] per node.
struct RandomInit {
    std::uint64_t seed = 0;
    double amplitude = 1.0;
};

using InitialProfile = std::variant<Profile, BumpInit, RandomInit>;

struct Tolerances {
    double vanish = 1e-2;       // relative sup norm counted as vanished
    double zero = 1e-12;        // exact-zero threshold in integer_shift runs
    double kernel = 0.05;       // closed form vs oracle node gap
    double roundtrip = 1e-12;   // relative inversion error
    double commutation = 0.05;  // relative to the initial sup norm
    int slack_steps = 5;        // allowed lag after T_opt, in time steps
};

/// A resolved configuration for one closed-loop experiment.
struct Scenario {
    std::string name = "scenario";
    HyperbolicSystem system;
    CascadeMatrix g{2, 1};
    int cells = 200;
    Scheme scheme = Scheme::upwind;
    std::optional<double> dt;
    double t_final = 1.0;
    Dynamics dynamics = Dynamics::gamma_target;
    FeedbackKind feedback = FeedbackKind::fredholm;
    std::vector<std::vector<Profile>> riesz;  // m x n, riesz feedback only
    std::vector<InitialProfile> initial;      // n entries
    Tolerances tol;
    int snapshot_stride = 10;
    std::uint64_t verify_seed = 1;
    int verify_samples = 10;

    Grid grid() const { return Grid(cells); }

    /// Time step for a grid of `cells` cells: the configured step scaled by
    /// this scenario's cell count over `cells`, or the scheme default.
    std::optional<double> dt_for(int cells) const;

    StateVector initial_state(const Grid& grid) const;
    FeedbackLaw feedback_law(const Grid& grid, std::shared_ptr<const IntegralOperator> op) const;
    ClosedLoopSpec closed_loop(const Grid& grid, std::shared_ptr<const IntegralOperator> op) const;
};

/// Parse or validation failure; `violations` holds one `line N: field: message`
/// or `field: message` entry per problem.
class ScenarioError : public Error {
public:
    explicit ScenarioError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Parses `key = value` lines. Relative table paths resolve against base_dir.
Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

/// Parses `constant:c`, `affine:a,b`, `poly:c0,..,c3` or `table:path`.
Profile parse_profile(const std::string& text, const std::filesystem::path& base_dir);

/// Uniform doubles in [0,1) from a 64-bit Mersenne twister, platform independent.
std::vector<double> uniform_samples(std::uint64_t seed, std::size_t count);

/// Random state with every component uniform in [-1,1].
StateVector random_state(int n, int m, const Grid& grid, std::uint64_t seed);

}  // namespace hyperstab
