#include <doctest.h>

#include "hyperstab/commands.hpp"
#include "hyperstab/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hyperstab;

namespace {

const std::filesystem::path kScenarios = HYPERSTAB_SCENARIO_DIR;

const char* kBase = R"(system.n = 3
system.m = 2
speeds.1 = constant:-2
speeds.2 = constant:-1
speeds.3 = constant:1
)";

std::vector<std::string> violations_of(const std::string& text) {
    std::istringstream in(text);
    try {
        parse_scenario(in, ".");
    } catch (const ScenarioError& e) {
        return e.violations();
    }
    return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
    for (const auto& s : v) {
        if (s.find(needle) != std::string::npos) return true;
    }
    return false;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("hyperstab_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("bundled reference scenario loads") {
    const auto sc = load_scenario(kScenarios / "s3.cfg");
    CHECK(sc.name == "s3");
    CHECK(sc.system.n == 3);
    CHECK(sc.system.m == 2);
    CHECK(sc.system.speed(1)(0.3) == -2.0);
    CHECK(sc.system.q[0] == std::vector<double>{1.0, 1.0});
    CHECK(sc.g.g(2, 1)(0.7) == 1.0);
    CHECK(sc.g.gplus(1, 2)(0.7) == 1.0);
    CHECK(sc.scheme == Scheme::integer_shift);
    CHECK(validate_system(sc.system, sc.grid()).valid());
}

TEST_CASE("schema violations") {
    CHECK(mentions(violations_of("system.n = 3\nsystem.m = 3\n"), "system.m"));
    CHECK(mentions(violations_of(std::string(kBase) + "scheme = integer_shift\n"), "dt"));
    CHECK(mentions(violations_of(std::string(kBase) + "speed.1 = constant:1\n"), "line 6: speed.1: unknown key"));
    CHECK(mentions(violations_of(std::string(kBase) + "grid.n = 4\n"), "grid.n"));
    CHECK(mentions(violations_of(std::string(kBase) + "g.1.2 = constant:1\n"), "g.1.2"));
    CHECK(mentions(violations_of(std::string(kBase) + "dt = 0.005\ndt = 0.01\n"), "duplicate"));
    CHECK(mentions(violations_of(std::string(kBase) + "this line has no equals\n"), "line 6"));
    CHECK(mentions(violations_of(std::string(kBase) + "initial.1 = wobble:1\n"), "initial.1"));
    CHECK(mentions(violations_of(std::string(kBase) + "scheme = integer_shift\ndt = 0.003\n"), "dt"));
    // sign violation reported with the component
    CHECK(mentions(violations_of("system.n = 3\nsystem.m = 2\nspeeds.1 = constant:-2\nspeeds.2 = constant:1\n"
                                 "speeds.3 = constant:2\n"),
                   "speeds.2"));
    CHECK(violations_of(std::string(kBase) + "# comment\nscheme = integer_shift  # inline\ndt = 0.005\n").empty());
}

TEST_CASE("profiles and initial data") {
    CHECK(parse_profile("poly:1,0,2", ".")(0.5) == 1.5);
    CHECK(parse_profile("affine:1, -1", ".")(0.25) == 0.75);
    CHECK_THROWS_AS(parse_profile("constant:1,2", "."), Error);
    CHECK_THROWS_AS(parse_profile("nonsense", "."), Error);

    const auto dir = fresh_dir("table");
    std::filesystem::create_directories(dir);
    {
        std::ofstream t(dir / "speed.csv");
        t << "x,value\n0,1\n0.5,2\n1,4\n";
    }
    const auto p = parse_profile("table:speed.csv", dir);
    CHECK(p(0.25) == doctest::Approx(1.5));
    CHECK(p(0.75) == doctest::Approx(3.0));

    std::istringstream in(std::string(kBase) + "initial.1 = bump:0.5,0.5,2\ninitial.2 = random:7,0.5\n");
    const auto sc = parse_scenario(in, ".");
    const Grid grid(40);
    const auto u = sc.initial_state(grid);
    CHECK(u(1, 20) == doctest::Approx(2.0));
    CHECK(u(1, 0) == 0.0);
    double worst = 0.0;
    for (double v : u.component(2)) worst = std::max(worst, std::abs(v));
    CHECK(worst <= 0.5);
    CHECK(worst > 0.0);
    CHECK(sup_distance(u, sc.initial_state(grid)) == 0.0);
}

TEST_CASE("random samples are reproducible") {
    const auto a = uniform_samples(42, 5);
    CHECK(a == uniform_samples(42, 5));
    CHECK(a != uniform_samples(43, 5));
    for (double v : a) CHECK((v >= 0.0 && v < 1.0));
    CHECK(sup_distance(random_state(3, 2, Grid(16), 5), random_state(3, 2, Grid(16), 5)) == 0.0);
}

TEST_CASE("synthesize writes the kernel artifacts") {
    auto sc = load_scenario(kScenarios / "s3.cfg");
    CommandOptions opts;
    opts.out_dir = fresh_dir("synth");
    opts.quiet = true;
    std::ostringstream log;
    cmd_synthesize(sc, opts, log);
    CHECK(log.str().find("T_opt=2 t_F=2.5") != std::string::npos);
    const auto kernel = slurp(scenario_dir(sc, opts) / "kernel.csv");
    CHECK(kernel.find("\n2,1,1,1,0.5\n") != std::string::npos);
    CHECK(kernel.find('\r') == std::string::npos);
    CHECK(std::filesystem::exists(scenario_dir(sc, opts) / "inverse_kernel.csv"));
    CHECK(std::filesystem::exists(scenario_dir(sc, opts) / "feedback_trace.csv"));

    sc.g = CascadeMatrix(3, 2);
    sc.g.set_gplus(1, 1, Profile::constant(1));
    const auto syn = cmd_synthesize(sc, opts, log);
    CHECK(syn.kernel.is_zero());
    CHECK(feedback_H(FredholmFeedback{syn.op}, random_state(3, 2, syn.kernel.grid(), 1)) ==
          std::vector<double>{0.0, 0.0});
}

TEST_CASE("identical scenarios give byte-identical outputs") {
    auto sc = load_scenario(kScenarios / "s3.cfg");
    sc.cells = 40;
    sc.dt = 0.025;
    sc.t_final = 1.0;
    CommandOptions a;
    a.out_dir = fresh_dir("det_a");
    a.quiet = true;
    CommandOptions b = a;
    b.out_dir = fresh_dir("det_b");
    std::ostringstream log;
    cmd_simulate(sc, a, log);
    cmd_simulate(sc, b, log);
    for (const char* f : {"trajectory.csv", "norms.csv"}) {
        const auto x = slurp(scenario_dir(sc, a) / f);
        CHECK(!x.empty());
        CHECK(x == slurp(scenario_dir(sc, b) / f));
    }
}

TEST_CASE("sweep") {
    auto sc = load_scenario(kScenarios / "s3.cfg");
    CommandOptions opts;
    opts.out_dir = fresh_dir("sweep");
    opts.quiet = true;
    std::ostringstream log;
    CHECK_THROWS_AS(cmd_sweep(sc, {100}, opts, log), Error);

    CHECK_FALSE(observed_order(0.0, 0.0, 100, 200));
    CHECK_FALSE(observed_order(0.1, 0.1, 100, 200));
    CHECK(*observed_order(0.4, 0.1, 100, 200) == doctest::Approx(2.0));

    // no cascade and no data: every metric is zero
    sc.g = CascadeMatrix(3, 2);
    sc.initial.assign(3, Profile::constant(0));
    sc.initial[2] = Profile::constant(1);
    const auto rows = cmd_sweep(sc, {40, 80}, opts, log);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].kernel_gap == 0.0);
    const auto csv = slurp(scenario_dir(sc, opts) / "sweep.csv");
    CHECK(csv.rfind("n,kernel_gap,kernel_gap_order,commutation,commutation_order,vanish_error,vanish_error_order\n", 0) ==
          0);
    CHECK(csv.find("80,0,n/a,") != std::string::npos);
}
