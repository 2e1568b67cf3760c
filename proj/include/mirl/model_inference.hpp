#pragma once

// Bayesian inference of teammates' mental models from demonstrated team
// trajectories. Produces augmented trajectories carrying, at every step, the
// observer's belief over each teammate's model.

#include <cstdint>
#include <span>
#include <vector>

#include "mirl/sar_env.hpp"
#include "mirl/tom_planner.hpp"

namespace mirl {

struct TrajectoryStep {
    WorldState state;
    JointAction joint;

    bool operator==(const TrajectoryStep&) const = default;
};

/// A demonstration: (state, joint action) pairs; state[j+1] = step(state[j], hidden, joint[j]).
struct Trajectory {
    std::vector<TrajectoryStep> steps;
    HiddenConfig hidden;
    /// Provenance only.
    std::uint64_t seed = 0;

    std::size_t size() const { return steps.size(); }
    bool operator==(const Trajectory&) const = default;
};

struct AugmentedStep {
    WorldState state;
    JointAction joint;
    /// Observer's belief about each teammate before observing `joint`.
    TeamBeliefs beliefs;
};

struct AugmentedTrajectory {
    AgentId observer = 0;
    std::vector<AugmentedStep> steps;
    /// Beliefs after the last observed joint action.
    TeamBeliefs final_beliefs;
    HiddenConfig hidden;
    std::uint64_t seed = 0;

    std::size_t size() const { return steps.size(); }
};

/// Throws ValidationError naming the first step whose successor disagrees with the dynamics.
void validate_trajectory(const World& world, const Trajectory& trajectory);

/// Probability the model assigns to the observed action (level-0 soft-max policy).
double action_likelihood(const Planner& planner, const WorldState& state, Action observed, AgentId teammate,
                         const MentalModel& model, const PlannerConfig& config);

/// posterior(m) ∝ likelihood(m) × prior(m), computed in log space.
/// Throws NumericalError when every model's mass vanishes.
ModelBelief bayes_update(const ModelBelief& prior, std::span<const double> likelihoods);

ModelBelief belief_update(const Planner& planner, const ModelBelief& prior, const WorldState& state, Action observed,
                          AgentId teammate, const PlannerConfig& config);

/// Replays each trajectory from the prior, updating the observer's belief
/// about every teammate in `priors` after each observed action.
std::vector<AugmentedTrajectory> infer_models(const Planner& planner, std::span<const Trajectory> trajectories,
                                              AgentId observer, const TeamBeliefs& priors,
                                              const PlannerConfig& config);

/// Augmentation with beliefs held constant at `beliefs` (no inference).
AugmentedTrajectory fixed_beliefs(const Trajectory& trajectory, AgentId observer, const TeamBeliefs& beliefs);

}  // namespace mirl
