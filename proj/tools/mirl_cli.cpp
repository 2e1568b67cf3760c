// Command-line front end: demo / infer / irl / eval / run / replay.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "mirl/errors.hpp"
#include "mirl/workbench.hpp"

namespace {

struct Options {
    std::string config;
    std::string out;
    std::string condition;
    std::string mode;
    std::optional<std::uint64_t> seed;
    std::optional<int> epochs;
    std::optional<int> rollouts;
    std::optional<int> trajectories;
    unsigned threads = 1;
};

mirl::ExperimentConfig resolve(const Options& o) {
    mirl::ExperimentConfig c = o.config.empty() ? mirl::ExperimentConfig{} : mirl::load_experiment_config(o.config);
    if (o.seed) c.seed = *o.seed;
    if (!o.condition.empty()) mirl::set_condition(c, o.condition);
    if (o.mode == "known")
        c.mode = mirl::TeammateKnowledge::Known;
    else if (o.mode == "unknown")
        c.mode = mirl::TeammateKnowledge::Unknown;
    if (o.epochs) c.irl.max_epochs = *o.epochs;
    if (o.rollouts) c.irl.n_rollouts = *o.rollouts;
    if (o.trajectories) c.demo.n_trajectories = *o.trajectories;
    c.irl.threads = o.threads;
    return c;
}

std::string out_dir(const Options& o) {
    if (!o.out.empty()) return o.out;
    if (const char* env = std::getenv("MIRL_OUT_DIR"); env && *env) return env;
    return "mirl_out";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-agent IRL workbench for the search-and-rescue team task"};
    app.set_version_flag("--version", std::string(mirl::kToolVersion));
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "experiment config (JSON) or a previous manifest.json")
            ->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "output directory (default: $MIRL_OUT_DIR or ./mirl_out)");
        sub->add_option("--seed", opt.seed, "master seed");
        sub->add_option("--condition", opt.condition, "cond1_gt | cond2_op | cond3_gt_op_rd | cond4_rd_tk_sc | custom");
        sub->add_option("--mode", opt.mode, "teammate knowledge of the demonstrators")
            ->check(CLI::IsMember({"known", "unknown"}));
        sub->add_option("--epochs", opt.epochs, "maximum IRL epochs")->check(CLI::PositiveNumber);
        sub->add_option("--rollouts", opt.rollouts, "rollouts per IRL epoch")->check(CLI::PositiveNumber);
        sub->add_option("--trajectories", opt.trajectories, "number of demonstrations")->check(CLI::NonNegativeNumber);
        sub->add_option("--threads", opt.threads, "rollout worker threads (0 = all cores)");
    };

    struct Cmd {
        const char* name;
        const char* help;
        std::vector<mirl::Stage> stages;
    };
    const std::vector<Cmd> cmds{
        {"demo", "generate expert demonstrations", {mirl::Stage::Demo}},
        {"infer", "infer teammate models from demonstrations", {mirl::Stage::Infer}},
        {"irl", "learn reward weights", {mirl::Stage::Irl}},
        {"eval", "compare learned and baseline profiles", {mirl::Stage::Eval}},
        {"run", "all stages", {mirl::Stage::Demo, mirl::Stage::Infer, mirl::Stage::Irl, mirl::Stage::Eval}},
    };
    std::vector<CLI::App*> subs;
    for (const auto& c : cmds) {
        auto* s = app.add_subcommand(c.name, c.help);
        add_common(s);
        subs.push_back(s);
    }

    std::string replay_file;
    auto* rep = app.add_subcommand("replay", "render a trajectory file as grid snapshots");
    rep->add_option("file", replay_file, "trajectories .jsonl (default: <out>/demos.jsonl)");
    rep->add_option("--out", opt.out, "output directory holding demos.jsonl");

    CLI11_PARSE(app, argc, argv);

    try {
        if (rep->parsed()) {
            const std::string path = replay_file.empty() ? out_dir(opt) + "/demos.jsonl" : replay_file;
            std::ifstream in(path);
            if (!in) throw mirl::ConfigError("cannot open " + path);
            mirl::replay(in, std::cout);
            return 0;
        }
        for (std::size_t i = 0; i < cmds.size(); ++i) {
            if (!subs[i]->parsed()) continue;
            const auto config = resolve(opt);
            const auto dir = out_dir(opt);
            const auto manifest = mirl::run_stages(config, dir, cmds[i].stages);
            std::cout << "wrote " << manifest.artifacts.size() << " artifacts to " << dir << "\n";
            if (manifest.summary.contains("similarity"))
                std::cout << manifest.summary["similarity"].dump(2) << "\n";
            return 0;
        }
    } catch (const mirl::StageError& e) {
        std::cerr << "error in stage " << e.stage << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
