#pragma once

// Decentralized maximum-entropy IRL. Each learner's estimated feature counts
// come from Monte-Carlo rollouts of its soft-max best response against
// teammates simulated from the time-varying model beliefs of its augmented
// trajectories.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mirl/model_inference.hpp"
#include "mirl/tom_planner.hpp"

namespace mirl {

/// Per-trajectory mean of summed features, aligned with an agent's catalog.
struct FeatureCounts {
    std::vector<std::string> catalog;
    std::vector<double> values;
};

struct IrlConfig {
    int max_epochs = 30;
    double learning_rate = 0.05;
    double lr_decay = 0.9;
    int n_rollouts = 16;
    int rollout_length = 25;
    double convergence_tol = 5e-3;
    int convergence_patience = 3;
    /// Replace Monte-Carlo rollouts by the exact expectation over the joint
    /// policy's state distribution. Only tractable on tiny instances.
    bool exact_expectation = false;
    /// Rollout workers; 0 = hardware concurrency.
    unsigned threads = 1;

    void validate() const;
};

struct EpochRecord {
    int epoch = 0;
    /// Weights after this epoch's update.
    std::vector<double> theta;
    /// Estimated counts at the weights before the update.
    std::vector<double> phi_est;
    double gradient_norm = 0.0;
    double learning_rate = 0.0;
    /// ‖θ_new − θ_old‖∞ and the same divided by the learning rate.
    double delta_inf = 0.0;
    double delta_over_lr = 0.0;
};

struct IrlTrace {
    std::vector<std::string> catalog;
    std::vector<EpochRecord> epochs;
    bool converged = false;
    /// Epoch at which the convergence test first held, or -1.
    int converged_epoch = -1;
};

struct TrainResult {
    RewardProfile profile;
    IrlTrace trace;
};

FeatureCounts empirical_fc(const World& world, std::span<const Trajectory> trajectories, AgentId agent);

FeatureCounts estimated_fc(const Planner& planner, const RewardProfile& theta,
                           std::span<const AugmentedTrajectory> augmented, AgentId agent, const IrlConfig& config,
                           const PlannerConfig& planner_config, std::uint64_t seed);

/// Exact expected counts for the same rollout scheme (rollout r starts from
/// augmented[r mod count]); enumerates the reachable state distribution.
FeatureCounts exact_fc(const Planner& planner, const RewardProfile& theta,
                       std::span<const AugmentedTrajectory> augmented, AgentId agent, const IrlConfig& config,
                       const PlannerConfig& planner_config);

/// θ − lr·(φ_est − φ_emp), L1-normalized unless it is exactly zero.
std::vector<double> irl_step(std::span<const double> theta, std::span<const double> phi_emp,
                             std::span<const double> phi_est, double lr);

TrainResult train(const Planner& planner, AgentId agent, std::span<const Trajectory> trajectories,
                  std::span<const AugmentedTrajectory> augmented, const IrlConfig& config,
                  const PlannerConfig& planner_config, std::uint64_t seed);

/// Per-observer priors; a support of size one means fixed beliefs (no inference needed).
using TeamPriors = std::map<AgentId, TeamBeliefs>;

struct TeamResult {
    std::map<AgentId, std::vector<AugmentedTrajectory>> augmented;
    std::map<AgentId, TrainResult> learned;
};

/// Phase 1 (model inference per observer) then Phase 2 (IRL per agent).
/// Agents are independent; each uses derive_seed(seed, {agent}).
TeamResult train_team(const Planner& planner, std::span<const Trajectory> trajectories, const TeamPriors& priors,
                      const IrlConfig& config, const PlannerConfig& planner_config, std::uint64_t seed,
                      unsigned agent_threads = 1);

}  // namespace mirl
