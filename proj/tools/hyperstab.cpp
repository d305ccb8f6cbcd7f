// hyperstab: kernel synthesis, closed-loop simulation and finite-time
// vanishing checks for heterodirectional linear hyperbolic systems.

#include "hyperstab/commands.hpp"

#include <CLI11.hpp>

#include <future>
#include <iostream>
#include <sstream>

namespace {

enum class Command { synthesize, simulate, verify, sweep };

struct Outcome {
    int code = 0;
    std::string text;
};

Outcome run_one(Command cmd, const std::string& path, const hyperstab::CommandOptions& opts,
                const std::vector<int>& grids) {
    std::ostringstream log;
    Outcome out;
    hyperstab::Scenario sc;
    try {
        sc = hyperstab::load_scenario(path);
    } catch (const hyperstab::Error& e) {
        log << path << ": " << e.what() << '\n';
        return {2, log.str()};
    }
    try {
        switch (cmd) {
            case Command::synthesize:
                hyperstab::cmd_synthesize(sc, opts, log);
                break;
            case Command::simulate:
                hyperstab::cmd_simulate(sc, opts, log);
                break;
            case Command::verify:
                out.code = hyperstab::cmd_verify(sc, opts, log).all_pass() ? 0 : 1;
                break;
            case Command::sweep:
                hyperstab::cmd_sweep(sc, grids, opts, log);
                break;
        }
    } catch (const hyperstab::Error& e) {
        log << path << ": " << e.what() << '\n';
        out.code = 2;
    } catch (const std::exception& e) {
        log << path << ": " << e.what() << '\n';
        out.code = 2;
    }
    out.text = log.str();
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fredholm backstepping synthesis and finite-time vanishing checks"};
    app.require_subcommand(1);
    app.fallthrough();

    hyperstab::CommandOptions opts;
    std::string out_dir = "out";
    std::string feedback;
    std::vector<std::string> files;
    std::vector<int> grids;

    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_flag("--quiet", opts.quiet, "Only print summaries");

    auto* syn = app.add_subcommand("synthesize", "Tabulate kernel, inverse kernel and feedback trace");
    auto* sim = app.add_subcommand("simulate", "Simulate the configured closed loop");
    auto* ver = app.add_subcommand("verify", "Run the scenario checks (exit 0 pass, 1 fail, 2 config error)");
    auto* swp = app.add_subcommand("sweep", "Grid-refinement convergence table");
    for (auto* sub : {syn, sim, ver, swp}) {
        sub->add_option("config", files, "Scenario files")->required()->check(CLI::ExistingFile);
    }
    for (auto* sub : {sim, ver, swp}) {
        sub->add_option("--feedback", feedback, "Override the feedback law")
            ->check(CLI::IsMember({"zero", "riesz", "fredholm"}));
    }
    swp->add_option("--grids", grids, "Comma-separated cell counts")->delimiter(',')->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    opts.out_dir = out_dir;
    if (feedback == "zero") opts.feedback_override = hyperstab::FeedbackKind::zero;
    if (feedback == "riesz") opts.feedback_override = hyperstab::FeedbackKind::riesz;
    if (feedback == "fredholm") opts.feedback_override = hyperstab::FeedbackKind::fredholm;

    Command cmd = Command::synthesize;
    if (sim->parsed()) cmd = Command::simulate;
    if (ver->parsed()) cmd = Command::verify;
    if (swp->parsed()) cmd = Command::sweep;

    std::vector<std::future<Outcome>> jobs;
    for (const auto& f : files) {
        jobs.push_back(std::async(std::launch::async, run_one, cmd, f, opts, grids));
    }
    int code = 0;
    for (auto& j : jobs) {
        const auto result = j.get();
        std::cout << result.text;
        code = std::max(code, result.code);
    }
    return code;
}
