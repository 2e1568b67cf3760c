#pragma once

// Experiment orchestration: demonstration generation, the experimental
// conditions, end-to-end runs and report emission.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mirl/irl_trainer.hpp"
#include "mirl/model_inference.hpp"
#include "mirl/profiles.hpp"
#include "mirl/sar_env.hpp"
#include "mirl/serialization.hpp"
#include "mirl/tom_planner.hpp"

namespace mirl {

inline constexpr const char* kToolVersion = "1.0.0";

enum class TeammateKnowledge { Known, Unknown };

/// A named set of baseline profiles used as the model support for every
/// teammate. Entries are profile kinds ("gt") resolved per teammate role,
/// or full profile names ("gt_explorer").
struct ConditionSpec {
    std::string name;
    std::vector<std::string> support;
};

/// cond1_gt, cond2_op, cond3_gt_op_rd, cond4_rd_tk_sc.
const std::map<std::string, ConditionSpec>& builtin_conditions();

struct DemoSettings {
    int n_trajectories = 16;
    int length = 25;
};

struct ExperimentConfig {
    EnvConfig env;
    /// Empty: use the bundled profiles.
    std::string profiles_file;
    /// Profile name per agent (ground truth of the demonstrators).
    std::vector<std::string> team{"gt_medic", "gt_explorer"};
    PlannerConfig planner;
    /// Rationality of the mental models used for inference and teammate
    /// simulation; 0 means "same as planner.rationality".
    double model_rationality = 0.0;
    DemoSettings demo;
    ConditionSpec condition{"cond3_gt_op_rd", {"gt", "op", "rd"}};
    /// Extra named conditions (pure data, merged over the built-ins).
    std::map<std::string, ConditionSpec> conditions;
    TeammateKnowledge mode = TeammateKnowledge::Known;
    /// Support of the demonstrators' prior in unknown mode (uniform).
    std::vector<std::string> unknown_prior{"gt", "op", "rd"};
    IrlConfig irl;
    /// Rollouts used when evaluating learned / baseline policies.
    int eval_rollouts = 256;
    std::uint64_t seed = 0;
};

nlohmann::ordered_json to_json(const ExperimentConfig& config);
/// Accepts an experiment config document or a run manifest (uses its "config").
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Select a condition by name (built-in or from config.conditions).
void set_condition(ExperimentConfig& config, const std::string& name);

/// Everything a run needs, resolved once from an ExperimentConfig.
class Experiment {
public:
    explicit Experiment(ExperimentConfig config);

    const ExperimentConfig& config() const { return config_; }
    const World& world() const { return planner_.world(); }
    const Planner& planner() const { return planner_; }
    const ProfileCatalog& profiles() const { return profiles_; }

    const RewardProfile& true_profile(AgentId agent) const;
    RewardProfile baseline(ProfileKind kind, AgentId agent) const;
    MentalModel model_of(const RewardProfile& profile) const;

    /// Observer's prior about each teammate for the configured condition.
    TeamBeliefs condition_prior(AgentId observer) const;
    /// Demonstrator's belief about each teammate at episode start.
    TeamBeliefs demonstrator_prior(AgentId agent) const;

    /// Expert demonstrations; `stream` separates independent demo sets drawn
    /// from the same config (0 for the demonstrations themselves). A positive
    /// `count` overrides the trajectory number; trajectory i then reuses the
    /// layout of demo i mod n_trajectories.
    std::vector<Trajectory> generate_demos(std::uint64_t stream = 0, int count = 0) const;

    std::map<AgentId, std::vector<AugmentedTrajectory>> infer(std::span<const Trajectory> demos) const;

    std::map<AgentId, TrainResult> learn(std::span<const Trajectory> demos,
                                         const std::map<AgentId, std::vector<AugmentedTrajectory>>& augmented) const;

    struct AgentEvaluation {
        std::vector<std::string> catalog;
        std::vector<SimilarityColumn> columns;  // demo, gt_resample, gt_rollout, op, learned
        const SimilarityColumn& column(const std::string& name) const;
    };

    std::map<AgentId, AgentEvaluation> evaluate(
        std::span<const Trajectory> demos, const std::map<AgentId, std::vector<AugmentedTrajectory>>& augmented,
        const std::map<AgentId, RewardProfile>& learned) const;

private:
    std::string resolve_support_entry(const std::string& entry, Role role) const;

    ExperimentConfig config_;
    ProfileCatalog profiles_;
    Planner planner_;
};

/// Stage failure: carries the stage name.
struct StageError : std::runtime_error {
    StageError(std::string stage, const std::string& what)
        : std::runtime_error("stage '" + stage + "' failed: " + what), stage(std::move(stage)) {}
    std::string stage;
};

struct RunManifest {
    nlohmann::ordered_json config;
    std::map<std::string, std::uint64_t> seeds;
    std::map<std::string, std::string> artifacts;  // name -> path relative to the output directory
    std::map<std::string, double> timings;         // stage -> seconds
    nlohmann::ordered_json summary;
    std::string failed_stage;

    /// Full document; timings can be left out for reproducibility comparisons.
    nlohmann::ordered_json to_json(bool include_timings = true) const;
};

enum class Stage { Demo, Infer, Irl, Eval };

/// Runs the given stages in order, reading earlier stages' artifacts from
/// out_dir when they are not part of this invocation. Writes manifest.json.
RunManifest run_stages(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                       const std::vector<Stage>& stages);

/// All four stages.
RunManifest run_condition(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Human-readable rendering of a trajectory file: one grid snapshot per step.
void replay(std::istream& in, std::ostream& out);

}  // namespace mirl
