#include "mirl/workbench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "mirl/errors.hpp"
#include "mirl/metrics.hpp"
#include "mirl/seeding.hpp"

namespace mirl {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// seed-derivation tags, one per pipeline stage
constexpr std::uint64_t kDemoTag = 1;
constexpr std::uint64_t kIrlTag = 2;
constexpr std::uint64_t kEvalTag = 3;

const char* to_string(TeammateKnowledge m) { return m == TeammateKnowledge::Known ? "known" : "unknown"; }

TeammateKnowledge parse_knowledge(const std::string& s) {
    if (s == "known") return TeammateKnowledge::Known;
    if (s == "unknown") return TeammateKnowledge::Unknown;
    throw ConfigError("mode must be 'known' or 'unknown', got '" + s + "'");
}

ordered_json condition_to_json(const ConditionSpec& c) {
    ordered_json j;
    j["name"] = c.name;
    j["support"] = c.support;
    return j;
}

ConditionSpec condition_from_json(const json& j, const std::string& fallback_name = "custom") {
    ConditionSpec c;
    c.name = j.value("name", fallback_name);
    c.support = j.at("support").get<std::vector<std::string>>();
    if (c.support.empty()) throw ConfigError("condition '" + c.name + "' has an empty support");
    return c;
}

}  // namespace

const std::map<std::string, ConditionSpec>& builtin_conditions() {
    static const std::map<std::string, ConditionSpec> table{
        {"cond1_gt", {"cond1_gt", {"gt"}}},
        {"cond2_op", {"cond2_op", {"op"}}},
        {"cond3_gt_op_rd", {"cond3_gt_op_rd", {"gt", "op", "rd"}}},
        {"cond4_rd_tk_sc", {"cond4_rd_tk_sc", {"rd", "tk", "sc"}}},
    };
    return table;
}

void set_condition(ExperimentConfig& config, const std::string& name) {
    if (auto it = config.conditions.find(name); it != config.conditions.end()) {
        config.condition = it->second;
        return;
    }
    const auto& builtin = builtin_conditions();
    auto it = builtin.find(name);
    if (it == builtin.end()) throw ConfigError("unknown condition '" + name + "'");
    config.condition = it->second;
}

ordered_json to_json(const ExperimentConfig& c) {
    ordered_json j;
    j["schema"] = "mirl.experiment";
    j["schema_version"] = kSchemaVersion;
    j["environment"] = to_json(c.env);
    j["profiles_file"] = c.profiles_file;
    j["team"] = c.team;
    j["planner"] = {{"horizon", c.planner.horizon},
                    {"discount", c.planner.discount},
                    {"rationality", c.planner.rationality},
                    {"presence_prior", c.planner.presence_prior}};
    j["model_rationality"] = c.model_rationality;
    j["demo"] = {{"n_trajectories", c.demo.n_trajectories}, {"length", c.demo.length}};
    j["condition"] = condition_to_json(c.condition);
    ordered_json extra = ordered_json::object();
    for (const auto& [name, spec] : c.conditions) extra[name] = condition_to_json(spec);
    j["conditions"] = extra;
    j["mode"] = to_string(c.mode);
    j["unknown_prior"] = c.unknown_prior;
    j["irl"] = {{"max_epochs", c.irl.max_epochs},
                {"learning_rate", c.irl.learning_rate},
                {"lr_decay", c.irl.lr_decay},
                {"n_rollouts", c.irl.n_rollouts},
                {"rollout_length", c.irl.rollout_length},
                {"convergence_tol", c.irl.convergence_tol},
                {"convergence_patience", c.irl.convergence_patience},
                {"exact_expectation", c.irl.exact_expectation}};
    j["eval_rollouts"] = c.eval_rollouts;
    j["seed"] = c.seed;
    return j;
}

ExperimentConfig experiment_config_from_json(const json& doc) {
    const json& j = doc.contains("config") && doc.value("schema", "") == "mirl.manifest" ? doc.at("config") : doc;
    ExperimentConfig c;
    try {
        if (j.contains("schema_version") && j.at("schema_version").get<int>() != kSchemaVersion)
            throw SchemaVersionError("experiment config schema_version " +
                                     std::to_string(j.at("schema_version").get<int>()) + " is not supported");
        if (j.contains("environment")) c.env = env_config_from_json(j.at("environment"));
        c.profiles_file = j.value("profiles_file", c.profiles_file);
        if (j.contains("team")) c.team = j.at("team").get<std::vector<std::string>>();
        if (j.contains("planner")) {
            const auto& p = j.at("planner");
            c.planner.horizon = p.value("horizon", c.planner.horizon);
            c.planner.discount = p.value("discount", c.planner.discount);
            c.planner.rationality = p.value("rationality", c.planner.rationality);
            c.planner.presence_prior = p.value("presence_prior", c.planner.presence_prior);
        }
        c.model_rationality = j.value("model_rationality", c.model_rationality);
        if (j.contains("demo")) {
            c.demo.n_trajectories = j.at("demo").value("n_trajectories", c.demo.n_trajectories);
            c.demo.length = j.at("demo").value("length", c.demo.length);
        }
        if (j.contains("conditions"))
            for (const auto& [name, spec] : j.at("conditions").items())
                c.conditions[name] = condition_from_json(spec, name);
        if (j.contains("condition")) {
            const auto& cond = j.at("condition");
            if (cond.is_string())
                set_condition(c, cond.get<std::string>());
            else
                c.condition = condition_from_json(cond);
        }
        if (j.contains("mode")) c.mode = parse_knowledge(j.at("mode").get<std::string>());
        if (j.contains("unknown_prior")) c.unknown_prior = j.at("unknown_prior").get<std::vector<std::string>>();
        if (j.contains("irl")) {
            const auto& r = j.at("irl");
            c.irl.max_epochs = r.value("max_epochs", c.irl.max_epochs);
            c.irl.learning_rate = r.value("learning_rate", c.irl.learning_rate);
            c.irl.lr_decay = r.value("lr_decay", c.irl.lr_decay);
            c.irl.n_rollouts = r.value("n_rollouts", c.irl.n_rollouts);
            c.irl.rollout_length = r.value("rollout_length", c.irl.rollout_length);
            c.irl.convergence_tol = r.value("convergence_tol", c.irl.convergence_tol);
            c.irl.convergence_patience = r.value("convergence_patience", c.irl.convergence_patience);
            c.irl.exact_expectation = r.value("exact_expectation", c.irl.exact_expectation);
        }
        c.eval_rollouts = j.value("eval_rollouts", c.eval_rollouts);
        c.seed = j.value("seed", c.seed);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid experiment config: ") + e.what());
    }
    return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    try {
        return experiment_config_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed config " + path.string() + ": " + e.what());
    }
}

Experiment::Experiment(ExperimentConfig config)
    : config_(std::move(config)), profiles_(bundled_profiles()), planner_(World(config_.env)) {
    if (!config_.profiles_file.empty())
        for (auto& [name, p] : load_profiles(config_.profiles_file)) profiles_[name] = std::move(p);
    config_.planner.validate();
    config_.irl.validate();
    if (config_.model_rationality < 0.0) throw ConfigError("model_rationality must be non-negative");
    if (config_.demo.n_trajectories < 0 || config_.demo.length < 0)
        throw ConfigError("demo counts must be non-negative");
    if (config_.eval_rollouts < 1) throw ConfigError("eval_rollouts must be positive");
    if (static_cast<int>(config_.team.size()) != world().num_agents())
        throw ConfigError("team lists " + std::to_string(config_.team.size()) + " profiles for a roster of " +
                          std::to_string(world().num_agents()));
    for (AgentId k = 0; k < world().num_agents(); ++k) {
        const auto& p = find_profile(profiles_, config_.team[static_cast<std::size_t>(k)]);
        if (p.catalog != world().catalog_of(k))
            throw ConfigError("profile '" + p.name + "' does not fit the role of agent " + std::to_string(k));
    }
    if (config_.condition.support.empty()) throw ConfigError("condition support is empty");
    // resolve every support entry now so configuration errors surface early
    for (AgentId k = 0; k < world().num_agents(); ++k) {
        for (const auto& e : config_.condition.support) resolve_support_entry(e, world().role(k));
        for (const auto& e : config_.unknown_prior) resolve_support_entry(e, world().role(k));
    }
}

std::string Experiment::resolve_support_entry(const std::string& entry, Role role) const {
    const auto& cat = World::catalog(role);
    if (auto it = profiles_.find(entry); it != profiles_.end() && it->second.catalog == cat) return entry;
    const std::string qualified = entry + "_" + std::string(to_string(role));
    if (auto it = profiles_.find(qualified); it != profiles_.end() && it->second.catalog == cat) return qualified;
    throw ConfigError("support entry '" + entry + "' does not name a " + std::string(to_string(role)) + " profile");
}

const RewardProfile& Experiment::true_profile(AgentId agent) const {
    return find_profile(profiles_, config_.team.at(static_cast<std::size_t>(agent)));
}

RewardProfile Experiment::baseline(ProfileKind kind, AgentId agent) const {
    const Role role = world().role(agent);
    if (auto it = profiles_.find(profile_name(kind, role)); it != profiles_.end()) return it->second;
    return make_profile(kind, role);
}

MentalModel Experiment::model_of(const RewardProfile& profile) const {
    const double r = config_.model_rationality > 0.0 ? config_.model_rationality : config_.planner.rationality;
    return {profile, r, config_.planner.horizon};
}

TeamBeliefs Experiment::condition_prior(AgentId observer) const {
    TeamBeliefs out;
    for (AgentId j = 0; j < world().num_agents(); ++j) {
        if (j == observer) continue;
        std::vector<MentalModel> support;
        for (const auto& e : config_.condition.support)
            support.push_back(model_of(find_profile(profiles_, resolve_support_entry(e, world().role(j)))));
        out.emplace(j, ModelBelief::uniform(std::move(support)));
    }
    return out;
}

TeamBeliefs Experiment::demonstrator_prior(AgentId agent) const {
    TeamBeliefs out;
    for (AgentId j = 0; j < world().num_agents(); ++j) {
        if (j == agent) continue;
        if (config_.mode == TeammateKnowledge::Known) {
            out.emplace(j, ModelBelief::point_mass(model_of(true_profile(j))));
        } else {
            std::vector<MentalModel> support;
            for (const auto& e : config_.unknown_prior)
                support.push_back(model_of(find_profile(profiles_, resolve_support_entry(e, world().role(j)))));
            out.emplace(j, ModelBelief::uniform(std::move(support)));
        }
    }
    return out;
}

std::vector<Trajectory> Experiment::generate_demos(std::uint64_t stream, int count) const {
    const World& w = world();
    const int agents = w.num_agents();
    const int n = count > 0 ? count : config_.demo.n_trajectories;
    std::vector<Trajectory> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto idx = static_cast<std::uint64_t>(i);
        const auto layout = static_cast<std::uint64_t>(i % config_.demo.n_trajectories);
        auto [state, hidden] = w.init_world(derive_seed(config_.env.seed, {layout}));
        Trajectory traj;
        traj.hidden = hidden;
        traj.seed = derive_seed(config_.seed, {kDemoTag, stream, idx});
        SeedStream rng(traj.seed);

        std::vector<TeamBeliefs> beliefs;
        for (AgentId k = 0; k < agents; ++k) beliefs.push_back(demonstrator_prior(k));

        for (int t = 0; t < config_.demo.length; ++t) {
            JointAction joint(static_cast<std::size_t>(agents), Action::Wait);
            for (AgentId k = 0; k < agents; ++k)
                joint[static_cast<std::size_t>(k)] = sample_action(
                    planner_.softmax_policy(state, k, true_profile(k), beliefs[static_cast<std::size_t>(k)],
                                            config_.planner),
                    rng);
            // experts update their beliefs after acting, from the same step's actions
            for (AgentId k = 0; k < agents; ++k)
                for (auto& [j, b] : beliefs[static_cast<std::size_t>(k)])
                    if (b.size() > 1)
                        b = belief_update(planner_, b, state, joint[static_cast<std::size_t>(j)], j, config_.planner);
            traj.steps.push_back({state, joint});
            state = w.step(state, hidden, joint);
        }
        out.push_back(std::move(traj));
    }
    return out;
}

std::map<AgentId, std::vector<AugmentedTrajectory>> Experiment::infer(std::span<const Trajectory> demos) const {
    std::map<AgentId, std::vector<AugmentedTrajectory>> out;
    for (AgentId k = 0; k < world().num_agents(); ++k)
        out[k] = infer_models(planner_, demos, k, condition_prior(k), config_.planner);
    return out;
}

std::map<AgentId, TrainResult> Experiment::learn(
    std::span<const Trajectory> demos, const std::map<AgentId, std::vector<AugmentedTrajectory>>& augmented) const {
    std::map<AgentId, TrainResult> out;
    for (AgentId k = 0; k < world().num_agents(); ++k)
        out[k] = train(planner_, k, demos, augmented.at(k), config_.irl, config_.planner,
                       derive_seed(config_.seed, {kIrlTag, static_cast<std::uint64_t>(k)}));
    return out;
}

const SimilarityColumn& Experiment::AgentEvaluation::column(const std::string& name) const {
    for (const auto& c : columns)
        if (c.name == name) return c;
    throw std::out_of_range("no similarity column '" + name + "'");
}

std::map<AgentId, Experiment::AgentEvaluation> Experiment::evaluate(
    std::span<const Trajectory> demos, const std::map<AgentId, std::vector<AugmentedTrajectory>>& augmented,
    const std::map<AgentId, RewardProfile>& learned) const {
    const auto resample = generate_demos(1, config_.eval_rollouts);
    IrlConfig eval_cfg = config_.irl;
    eval_cfg.n_rollouts = config_.eval_rollouts;

    std::map<AgentId, AgentEvaluation> out;
    for (AgentId k = 0; k < world().num_agents(); ++k) {
        const auto tag = static_cast<std::uint64_t>(k);
        const auto& aug = augmented.at(k);
        const auto gt = baseline(ProfileKind::Gt, k);
        const auto op = baseline(ProfileKind::Op, k);
        const auto demo_fc = empirical_fc(world(), demos, k);

        auto column = [&](std::string name, const FeatureCounts& fc, double pi_div) {
            return SimilarityColumn{std::move(name), fc.values, fc_diff(fc, demo_fc), pi_div};
        };
        auto rollout = [&](const RewardProfile& theta, std::uint64_t which) {
            return estimated_fc(planner_, theta, aug, k, eval_cfg, config_.planner,
                                derive_seed(config_.seed, {kEvalTag, tag, which}));
        };

        AgentEvaluation ev;
        ev.catalog = demo_fc.catalog;
        ev.columns.push_back(column("demo", demo_fc, 0.0));
        ev.columns.push_back(column("gt_resample", empirical_fc(world(), resample, k), 0.0));
        ev.columns.push_back(column("gt_rollout", rollout(gt, 0), 0.0));
        ev.columns.push_back(
            column("op", rollout(op, 1), policy_divergence(planner_, op, gt, aug, k, config_.planner)));
        if (auto it = learned.find(k); it != learned.end())
            ev.columns.push_back(column("learned", rollout(it->second, 2),
                                        policy_divergence(planner_, it->second, gt, aug, k, config_.planner)));
        out.emplace(k, std::move(ev));
    }
    return out;
}

ordered_json RunManifest::to_json(bool include_timings) const {
    ordered_json j;
    j["schema"] = "mirl.manifest";
    j["schema_version"] = kSchemaVersion;
    j["tool_version"] = kToolVersion;
    j["config"] = config;
    j["seeds"] = seeds;
    j["artifacts"] = artifacts;
    if (include_timings) j["timings"] = timings;
    j["summary"] = summary;
    if (!failed_stage.empty()) j["failed_stage"] = failed_stage;
    return j;
}

namespace {

std::string agent_tag(const World& w, AgentId k) {
    const Role r = w.role(k);
    int same = 0;
    for (AgentId o = 0; o < w.num_agents(); ++o) same += w.role(o) == r;
    std::string tag(to_string(r));
    if (same > 1) tag += "_" + std::to_string(k);
    return tag;
}

template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    fn(out);
}

}  // namespace

RunManifest run_stages(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                       const std::vector<Stage>& stages) {
    RunManifest manifest;
    manifest.config = to_json(config);
    manifest.seeds["master"] = config.seed;
    manifest.seeds["environment"] = config.env.seed;
    std::filesystem::create_directories(out_dir);

    auto write_manifest = [&] {
        write_file(out_dir / "manifest.json", [&](std::ostream& o) { o << manifest.to_json().dump(2) << '\n'; });
    };

    std::optional<Experiment> experiment;
    std::vector<Trajectory> demos;
    std::map<AgentId, std::vector<AugmentedTrajectory>> augmented;
    std::map<AgentId, RewardProfile> learned;

    auto has = [&](Stage s) { return std::find(stages.begin(), stages.end(), s) != stages.end(); };

    auto run = [&](const std::string& name, const std::function<void()>& body) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            body();
        } catch (const std::exception& e) {
            manifest.failed_stage = name;
            write_manifest();
            throw StageError(name, e.what());
        }
        manifest.timings[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    run("setup", [&] { experiment.emplace(config); });
    const World& w = experiment->world();

    auto load_demos = [&] {
        if (!demos.empty() || config.demo.n_trajectories == 0) return;
        demos = read_trajectories(out_dir / "demos.jsonl").trajectories;
    };
    auto load_augmented = [&] {
        if (!augmented.empty()) return;
        for (AgentId k = 0; k < w.num_agents(); ++k)
            augmented[k] = read_augmented(out_dir / ("augmented_" + agent_tag(w, k) + ".jsonl"));
    };
    auto load_learned = [&] {
        if (!learned.empty()) return;
        const auto cat = load_profiles(out_dir / "learned_profiles.json");
        for (AgentId k = 0; k < w.num_agents(); ++k) learned[k] = find_profile(cat, "irl_" + agent_tag(w, k));
    };

    if (has(Stage::Demo))
        run("demo", [&] {
            demos = experiment->generate_demos();
            write_trajectories(out_dir / "demos.jsonl", config.env, demos);
            manifest.artifacts["demos"] = "demos.jsonl";
        });

    if (has(Stage::Infer))
        run("infer", [&] {
            load_demos();
            augmented = experiment->infer(demos);
            std::vector<AugmentedTrajectory> all;
            for (const auto& [k, augs] : augmented) {
                const auto file = "augmented_" + agent_tag(w, k) + ".jsonl";
                write_augmented(out_dir / file, augs);
                manifest.artifacts["augmented_" + agent_tag(w, k)] = file;
                all.insert(all.end(), augs.begin(), augs.end());
            }
            write_file(out_dir / "belief_curves.csv", [&](std::ostream& o) { write_belief_curves(o, all); });
            manifest.artifacts["belief_curves"] = "belief_curves.csv";

            ordered_json beliefs = ordered_json::object();
            for (const auto& [k, augs] : augmented) {
                if (augs.empty()) continue;
                for (const auto& [j, ref] : augs.front().final_beliefs) {
                    ordered_json e = ordered_json::object();
                    for (std::size_t m = 0; m < ref.size(); ++m) {
                        double mean = 0.0;
                        for (const auto& a : augs) mean += a.final_beliefs.at(j).probabilities[m];
                        e[ref.support[m].profile.name] = mean / static_cast<double>(augs.size());
                    }
                    beliefs[agent_tag(w, k) + "_about_" + agent_tag(w, j)] = e;
                }
            }
            manifest.summary["mean_final_beliefs"] = beliefs;
        });

    if (has(Stage::Irl))
        run("irl", [&] {
            load_demos();
            load_augmented();
            if (demos.empty()) throw ValidationError("IRL needs at least one demonstration");
            const auto results = experiment->learn(demos, augmented);
            ProfileCatalog out_profiles;
            ordered_json conv = ordered_json::object();
            for (const auto& [k, res] : results) {
                const auto tag = agent_tag(w, k);
                RewardProfile p = res.profile;
                p.name = "irl_" + tag;
                learned[k] = p;
                out_profiles[p.name] = p;
                write_file(out_dir / ("irl_trace_" + tag + ".csv"), [&](std::ostream& o) { write_irl_trace(o, res.trace); });
                manifest.artifacts["irl_trace_" + tag] = "irl_trace_" + tag + ".csv";
                conv[tag] = {{"converged", res.trace.converged},
                             {"converged_epoch", res.trace.converged_epoch},
                             {"epochs", res.trace.epochs.size()}};
            }
            save_profiles(out_dir / "learned_profiles.json", out_profiles);
            manifest.artifacts["learned_profiles"] = "learned_profiles.json";
            manifest.summary["irl"] = conv;
        });

    if (has(Stage::Eval))
        run("eval", [&] {
            load_demos();
            load_augmented();
            load_learned();
            if (demos.empty()) throw ValidationError("evaluation needs at least one demonstration");
            const auto evals = experiment->evaluate(demos, augmented, learned);
            ordered_json sim = ordered_json::object();
            for (const auto& [k, ev] : evals) {
                const auto tag = agent_tag(w, k);
                write_file(out_dir / ("similarity_" + tag + ".csv"),
                           [&](std::ostream& o) { write_similarity_table(o, ev.catalog, ev.columns); });
                manifest.artifacts["similarity_" + tag] = "similarity_" + tag + ".csv";
                ordered_json cols = ordered_json::object();
                for (const auto& c : ev.columns) cols[c.name] = {{"fc_diff", c.fc_diff}, {"pi_div", c.pi_div}};
                sim[tag] = cols;
            }
            manifest.summary["similarity"] = sim;
        });

    write_manifest();
    return manifest;
}

RunManifest run_condition(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    return run_stages(config, out_dir, {Stage::Demo, Stage::Infer, Stage::Irl, Stage::Eval});
}

void replay(std::istream& in, std::ostream& out) {
    const auto file = read_trajectories(in);
    const World world(file.env);
    const auto& g = world.grid();
    out << "# " << file.trajectories.size() << " trajectories on a " << g.width << "x" << g.height << " grid\n";
    out << "# legend: ? unknown  V found  R ready  C clear  . empty  * help beacon;";
    for (AgentId k = 0; k < world.num_agents(); ++k)
        out << "  " << k << " " << to_string(world.role(k));
    out << '\n';

    auto status_char = [](VictimStatus s) {
        switch (s) {
            case VictimStatus::Unknown: return '?';
            case VictimStatus::Found: return 'V';
            case VictimStatus::Ready: return 'R';
            case VictimStatus::Clear: return 'C';
            case VictimStatus::Empty: return '.';
        }
        return '?';
    };

    for (std::size_t i = 0; i < file.trajectories.size(); ++i) {
        const auto& t = file.trajectories[i];
        out << "== trajectory " << i << " (seed " << t.seed << ", victims at";
        for (int c = 0; c < g.cells(); ++c)
            if (t.hidden.present(c)) out << ' ' << c;
        out << ")\n";
        for (const auto& st : t.steps) {
            out << "-- t=" << st.state.time << "  actions:";
            for (AgentId k = 0; k < world.num_agents(); ++k)
                out << ' ' << to_string(world.role(k)) << '=' << to_string(st.joint[static_cast<std::size_t>(k)]);
            out << '\n';
            for (int r = 0; r < g.height; ++r) {
                for (int c = 0; c < g.width; ++c) {
                    const int cell = r * g.width + c;
                    std::string here;
                    here.push_back(status_char(st.state.statuses[static_cast<std::size_t>(cell)]));
                    here.push_back(st.state.help_beacon == cell ? '*' : ' ');
                    for (AgentId k = 0; k < world.num_agents(); ++k)
                        if (st.state.positions[static_cast<std::size_t>(k)] == cell)
                            here += static_cast<char>('0' + k % 10);
                    out << '[' << std::left << std::setw(2 + world.num_agents()) << here << ']';
                }
                out << '\n';
            }
        }
    }
}

}  // namespace mirl
