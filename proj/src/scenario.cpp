#include "hyperstab/scenario.hpp"

#include "hyperstab/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace hyperstab {

namespace {

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : "\n") + s;
    return out;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(trim(item));
    return out;
}

std::optional<double> to_double(const std::string& s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<long long> to_int(const std::string& s) {
    long long v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

std::vector<double> to_doubles(const std::string& s) {
    std::vector<double> out;
    for (const auto& item : split(s, ',')) {
        const auto v = to_double(item);
        if (!v) throw Error("'" + item + "' is not a number");
        out.push_back(*v);
    }
    return out;
}

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

class Reader {
public:
    std::map<std::string, Entry> entries;
    std::vector<std::string> problems;

    const Entry* find(const std::string& key) {
        auto it = entries.find(key);
        if (it == entries.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    void fail(const std::string& key, const std::string& msg) {
        auto it = entries.find(key);
        if (it != entries.end()) {
            problems.push_back("line " + std::to_string(it->second.line) + ": " + key + ": " + msg);
        } else {
            problems.push_back(key + ": " + msg);
        }
    }

    std::optional<double> number(const std::string& key) {
        const auto* e = find(key);
        if (e == nullptr) return std::nullopt;
        const auto v = to_double(e->value);
        if (!v) fail(key, "expected a number, got '" + e->value + "'");
        return v;
    }

    std::optional<long long> integer(const std::string& key) {
        const auto* e = find(key);
        if (e == nullptr) return std::nullopt;
        const auto v = to_int(e->value);
        if (!v) fail(key, "expected an integer, got '" + e->value + "'");
        return v;
    }

    std::optional<std::string> text(const std::string& key) {
        const auto* e = find(key);
        if (e == nullptr) return std::nullopt;
        return e->value;
    }

    std::optional<Profile> profile(const std::string& key, const std::filesystem::path& base) {
        const auto* e = find(key);
        if (e == nullptr) return std::nullopt;
        try {
            return parse_profile(e->value, base);
        } catch (const Error& err) {
            fail(key, err.what());
            return std::nullopt;
        }
    }
};

std::string key2(const std::string& head, int a, int b) {
    return head + "." + std::to_string(a) + "." + std::to_string(b);
}

InitialProfile parse_initial(const std::string& text, const std::filesystem::path& base) {
    const auto colon = text.find(':');
    const std::string kind = trim(text.substr(0, colon));
    const std::string args = colon == std::string::npos ? "" : trim(text.substr(colon + 1));
    if (kind == "bump") {
        const auto v = to_doubles(args);
        if (v.size() != 3 || v[1] <= 0.0) throw Error("bump takes center,width,height with width > 0");
        return BumpInit{v[0], v[1], v[2]};
    }
    if (kind == "random") {
        const auto parts = split(args, ',');
        if (parts.empty() || parts.size() > 2) throw Error("random takes seed[,amplitude]");
        const auto seed = to_int(parts[0]);
        if (!seed || *seed < 0) throw Error("random seed must be a non-negative integer");
        RandomInit r{static_cast<std::uint64_t>(*seed), 1.0};
        if (parts.size() == 2) {
            const auto a = to_double(parts[1]);
            if (!a) throw Error("random amplitude must be a number");
            r.amplitude = *a;
        }
        return r;
    }
    return parse_profile(text, base);
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> violations)
    : Error("invalid scenario:\n" + join(violations)), violations_(std::move(violations)) {}

Profile parse_profile(const std::string& text, const std::filesystem::path& base_dir) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw Error("expected kind:args, got '" + text + "'");
    const std::string kind = trim(text.substr(0, colon));
    const std::string args = trim(text.substr(colon + 1));
    if (kind == "constant") {
        const auto v = to_doubles(args);
        if (v.size() != 1) throw Error("constant takes one value");
        return Profile::constant(v[0]);
    }
    if (kind == "affine") {
        const auto v = to_doubles(args);
        if (v.size() != 2) throw Error("affine takes a,b");
        return Profile::affine(v[0], v[1]);
    }
    if (kind == "poly") return Profile::polynomial(to_doubles(args));
    if (kind == "table") {
        std::filesystem::path p(args);
        if (p.is_relative()) p = base_dir / p;
        return Profile::tabulated(read_samples_csv(p));
    }
    throw Error("unknown profile kind '" + kind + "'");
}

std::vector<double> uniform_samples(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 gen(seed);
    std::vector<double> out(count);
    for (auto& v : out) v = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return out;
}

StateVector random_state(int n, int m, const Grid& grid, std::uint64_t seed) {
    StateVector u(n, m, grid);
    const auto r = uniform_samples(seed, static_cast<std::size_t>(n) * grid.size());
    std::size_t idx = 0;
    for (int i = 1; i <= n; ++i) {
        for (auto& v : u.component(i)) v = 2.0 * r[idx++] - 1.0;
    }
    return u;
}

std::optional<double> Scenario::dt_for(int target_cells) const {
    if (!dt) return std::nullopt;
    return *dt * static_cast<double>(cells) / static_cast<double>(target_cells);
}

StateVector Scenario::initial_state(const Grid& grid) const {
    StateVector u(system.n, system.m, grid);
    for (int i = 1; i <= system.n; ++i) {
        auto c = u.component(i);
        const auto& init = initial.at(static_cast<std::size_t>(i - 1));
        if (const auto* p = std::get_if<Profile>(&init)) {
            for (int k = 0; k < grid.size(); ++k) c[k] = (*p)(grid.node(k));
        } else if (const auto* b = std::get_if<BumpInit>(&init)) {
            for (int k = 0; k < grid.size(); ++k) {
                const double d = (grid.node(k) - b->center) / b->width;
                const double cosv = std::cos(std::numbers::pi * d);
                c[k] = std::abs(d) < 0.5 ? b->height * cosv * cosv : 0.0;
            }
        } else {
            const auto& r = std::get<RandomInit>(init);
            const auto s = uniform_samples(r.seed + static_cast<std::uint64_t>(i), c.size());
            for (std::size_t k = 0; k < c.size(); ++k) c[k] = r.amplitude * (2.0 * s[k] - 1.0);
        }
    }
    return u;
}

FeedbackLaw Scenario::feedback_law(const Grid& grid, std::shared_ptr<const IntegralOperator> op) const {
    switch (feedback) {
        case FeedbackKind::zero:
            return ZeroFeedback{};
        case FeedbackKind::riesz:
            return RieszFeedback::from_profiles(riesz, grid);
        case FeedbackKind::fredholm:
            if (!op) throw ValidationError("fredholm feedback needs a synthesized operator");
            return FredholmFeedback{std::move(op)};
    }
    return ZeroFeedback{};
}

ClosedLoopSpec Scenario::closed_loop(const Grid& grid, std::shared_ptr<const IntegralOperator> op) const {
    switch (dynamics) {
        case Dynamics::plant:
            return ClosedLoopSpec::plant(system, feedback_law(grid, std::move(op)));
        case Dynamics::gamma_target:
            return ClosedLoopSpec::gamma_target(system, g, feedback_law(grid, std::move(op)));
        case Dynamics::z_target:
            return ClosedLoopSpec::z_target(system, g);
    }
    throw ValidationError("unknown dynamics");
}

Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir) {
    Reader rd;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            rd.problems.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty() || value.empty()) {
            rd.problems.push_back("line " + std::to_string(lineno) + ": empty key or value");
            continue;
        }
        if (rd.entries.count(key) != 0) {
            rd.problems.push_back("line " + std::to_string(lineno) + ": " + key + ": duplicate key");
            continue;
        }
        rd.entries[key] = Entry{value, lineno, false};
    }

    Scenario sc;
    if (auto v = rd.text("name")) sc.name = *v;

    const auto n = rd.integer("system.n");
    const auto m = rd.integer("system.m");
    if (!n) rd.fail("system.n", "missing");
    if (!m) rd.fail("system.m", "missing");
    if (n && *n < 2) rd.fail("system.n", "need n >= 2");
    if (n && m && (*m < 1 || *m > *n - 1)) rd.fail("system.m", "need 1 <= m <= n-1");
    if (!rd.problems.empty()) throw ScenarioError(rd.problems);

    const int nn = static_cast<int>(*n);
    const int mm = static_cast<int>(*m);
    HyperbolicSystem& sys = sc.system;
    sys.n = nn;
    sys.m = mm;
    sys.speeds.assign(static_cast<std::size_t>(nn), Profile::constant(0.0));
    sys.sigma.assign(static_cast<std::size_t>(nn), std::vector<Profile>(static_cast<std::size_t>(nn)));
    sys.q.assign(static_cast<std::size_t>(nn - mm), std::vector<double>(static_cast<std::size_t>(mm), 0.0));
    for (int i = 1; i <= nn; ++i) {
        const std::string key = "speeds." + std::to_string(i);
        if (auto p = rd.profile(key, base_dir)) {
            sys.speeds[i - 1] = *p;
        } else if (rd.entries.count(key) == 0) {
            rd.fail(key, "missing");
        }
        for (int j = 1; j <= nn; ++j) {
            if (auto p = rd.profile(key2("sigma", i, j), base_dir)) sys.sigma[i - 1][j - 1] = *p;
        }
    }
    for (int r = 1; r <= nn - mm; ++r) {
        for (int j = 1; j <= mm; ++j) {
            if (auto v = rd.number(key2("q", r, j))) sys.q[r - 1][j - 1] = *v;
        }
    }

    sc.g = CascadeMatrix(nn, mm);
    for (int i = 1; i <= mm; ++i) {
        for (int j = 1; j <= mm; ++j) {
            const std::string key = key2("g", i, j);
            if (rd.entries.count(key) == 0) continue;
            if (j >= i) {
                rd.find(key);
                rd.fail(key, "g_ij must vanish for j >= i (cascade structure)");
                continue;
            }
            if (auto p = rd.profile(key, base_dir)) sc.g.set_g(i, j, *p);
        }
    }
    for (int r = 1; r <= nn - mm; ++r) {
        for (int j = 1; j <= mm; ++j) {
            if (auto p = rd.profile(key2("gplus", r, j), base_dir)) sc.g.set_gplus(r, j, *p);
        }
    }

    if (auto v = rd.integer("grid.n")) {
        if (*v < Grid::kMinCells) {
            rd.fail("grid.n", "need at least " + std::to_string(Grid::kMinCells) + " cells");
        } else {
            sc.cells = static_cast<int>(*v);
        }
    }
    if (auto v = rd.text("scheme")) {
        if (*v == "upwind") {
            sc.scheme = Scheme::upwind;
        } else if (*v == "integer_shift") {
            sc.scheme = Scheme::integer_shift;
        } else {
            rd.fail("scheme", "expected upwind or integer_shift");
        }
    }
    if (auto v = rd.number("dt")) {
        if (*v <= 0.0) {
            rd.fail("dt", "must be positive");
        } else {
            sc.dt = *v;
        }
    }
    if (sc.scheme == Scheme::integer_shift && !sc.dt && rd.entries.count("dt") == 0) {
        rd.fail("dt", "required for scheme integer_shift");
    }
    if (auto v = rd.number("t_final")) {
        if (*v <= 0.0) {
            rd.fail("t_final", "must be positive");
        } else {
            sc.t_final = *v;
        }
    }
    if (auto v = rd.text("dynamics")) {
        if (*v == "plant") {
            sc.dynamics = Dynamics::plant;
        } else if (*v == "gamma_target") {
            sc.dynamics = Dynamics::gamma_target;
        } else if (*v == "z_target") {
            sc.dynamics = Dynamics::z_target;
        } else {
            rd.fail("dynamics", "expected plant, gamma_target or z_target");
        }
    }
    if (auto v = rd.text("feedback")) {
        if (*v == "zero") {
            sc.feedback = FeedbackKind::zero;
        } else if (*v == "riesz") {
            sc.feedback = FeedbackKind::riesz;
        } else if (*v == "fredholm") {
            sc.feedback = FeedbackKind::fredholm;
        } else {
            rd.fail("feedback", "expected zero, riesz or fredholm");
        }
    }
    if (sc.dynamics == Dynamics::z_target && sc.feedback == FeedbackKind::riesz) {
        rd.fail("feedback", "z_target dynamics have z_-(t,1) = 0; riesz feedback does not apply");
    }
    sc.riesz.assign(static_cast<std::size_t>(mm), std::vector<Profile>(static_cast<std::size_t>(nn)));
    for (int i = 1; i <= mm; ++i) {
        for (int j = 1; j <= nn; ++j) {
            if (auto p = rd.profile(key2("riesz", i, j), base_dir)) sc.riesz[i - 1][j - 1] = *p;
        }
    }

    sc.initial.assign(static_cast<std::size_t>(nn), Profile::constant(0.0));
    for (int i = 1; i <= nn; ++i) {
        const std::string key = "initial." + std::to_string(i);
        if (const auto* e = rd.find(key)) {
            try {
                sc.initial[i - 1] = parse_initial(e->value, base_dir);
            } catch (const Error& err) {
                rd.fail(key, err.what());
            }
        }
    }

    auto positive = [&](const std::string& key, double& slot) {
        if (auto v = rd.number(key)) {
            if (*v <= 0.0) {
                rd.fail(key, "must be positive");
            } else {
                slot = *v;
            }
        }
    };
    positive("tol.vanish", sc.tol.vanish);
    positive("tol.zero", sc.tol.zero);
    positive("tol.kernel", sc.tol.kernel);
    positive("tol.roundtrip", sc.tol.roundtrip);
    positive("tol.commutation", sc.tol.commutation);
    if (auto v = rd.integer("tol.slack_steps")) {
        if (*v < 0) {
            rd.fail("tol.slack_steps", "must be non-negative");
        } else {
            sc.tol.slack_steps = static_cast<int>(*v);
        }
    }
    if (auto v = rd.integer("output.stride")) {
        if (*v < 1) {
            rd.fail("output.stride", "must be >= 1");
        } else {
            sc.snapshot_stride = static_cast<int>(*v);
        }
    }
    if (auto v = rd.integer("verify.seed")) {
        if (*v < 0) {
            rd.fail("verify.seed", "must be non-negative");
        } else {
            sc.verify_seed = static_cast<std::uint64_t>(*v);
        }
    }
    if (auto v = rd.integer("verify.samples")) {
        if (*v < 1) {
            rd.fail("verify.samples", "must be >= 1");
        } else {
            sc.verify_samples = static_cast<int>(*v);
        }
    }

    for (const auto& [key, entry] : rd.entries) {
        if (!entry.used) {
            rd.problems.push_back("line " + std::to_string(entry.line) + ": " + key + ": unknown key");
        }
    }

    if (rd.problems.empty()) {
        const auto report = validate_system(sys, sc.grid());
        for (const auto& v : report.violations) {
            std::string field = v.field;
            if (v.component > 0) field += "." + std::to_string(v.component);
            std::string msg = v.message;
            if (v.node >= 0) msg += " at node " + std::to_string(v.node);
            if (v.other > 0) msg += " (vs component " + std::to_string(v.other) + ")";
            rd.problems.push_back(field + ": " + msg);
        }
    }
    if (rd.problems.empty() && sc.scheme == Scheme::integer_shift) {
        try {
            Stepper probe(ClosedLoopSpec::z_target(sys, sc.g), sc.grid(), sc.scheme, sc.dt);
        } catch (const StepError& err) {
            rd.fail("dt", err.what());
        }
    }
    if (!rd.problems.empty()) throw ScenarioError(rd.problems);
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError({path.string() + ": cannot open"});
    return parse_scenario(in, path.parent_path());
}

}  // namespace hyperstab
