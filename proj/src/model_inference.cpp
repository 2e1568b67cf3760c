#include "mirl/model_inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mirl/errors.hpp"

namespace mirl {

void validate_trajectory(const World& world, const Trajectory& trajectory) {
    const auto& steps = trajectory.steps;
    if (!steps.empty() && trajectory.hidden.victim_present.size() != steps.front().state.statuses.size())
        throw ValidationError("trajectory hidden configuration does not match the grid");
    for (std::size_t j = 0; j < steps.size(); ++j) {
        try {
            world.validate(steps[j].state);
        } catch (const ValidationError& e) {
            throw ValidationError("trajectory step " + std::to_string(j) + ": " + e.what());
        }
        if (j + 1 == steps.size()) break;
        WorldState next;
        try {
            next = world.step(steps[j].state, trajectory.hidden, steps[j].joint);
        } catch (const std::exception& e) {
            throw ValidationError("trajectory step " + std::to_string(j) + ": " + e.what());
        }
        if (!(next == steps[j + 1].state))
            throw ValidationError("trajectory step " + std::to_string(j) +
                                  ": successor state is inconsistent with the dynamics");
    }
}

double action_likelihood(const Planner& planner, const WorldState& state, Action observed, AgentId teammate,
                         const MentalModel& model, const PlannerConfig& config) {
    if (!planner.world().is_legal(state, teammate, observed))
        throw ContractViolation("observed action '" + std::string(to_string(observed)) + "' is illegal for agent " +
                                std::to_string(teammate));
    return planner.model_policy(state, teammate, model, config).probability_of(observed);
}

ModelBelief bayes_update(const ModelBelief& prior, std::span<const double> likelihoods) {
    if (likelihoods.size() != prior.size()) throw ShapeError("one likelihood per model required");
    std::vector<double> log_post(prior.size());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < prior.size(); ++m) {
        log_post[m] = std::log(prior.probabilities[m]) + std::log(likelihoods[m]);
        top = std::max(top, log_post[m]);
    }
    if (!std::isfinite(top)) throw NumericalError("belief update: every model has vanishing posterior mass");
    double total = 0.0;
    for (double& v : log_post) {
        v = std::exp(v - top);
        total += v;
    }
    ModelBelief post{prior.support, {}};
    post.probabilities.reserve(log_post.size());
    for (double v : log_post) post.probabilities.push_back(v / total);
    return post;
}

ModelBelief belief_update(const Planner& planner, const ModelBelief& prior, const WorldState& state, Action observed,
                          AgentId teammate, const PlannerConfig& config) {
    prior.validate();
    std::vector<double> lik(prior.size());
    for (std::size_t m = 0; m < prior.size(); ++m)
        lik[m] = action_likelihood(planner, state, observed, teammate, prior.support[m], config);
    return bayes_update(prior, lik);
}

std::vector<AugmentedTrajectory> infer_models(const Planner& planner, std::span<const Trajectory> trajectories,
                                              AgentId observer, const TeamBeliefs& priors,
                                              const PlannerConfig& config) {
    const World& world = planner.world();
    if (observer < 0 || observer >= world.num_agents())
        throw std::out_of_range("unknown observer " + std::to_string(observer));
    for (const auto& [j, b] : priors) {
        if (j == observer || j < 0 || j >= world.num_agents())
            throw std::out_of_range("prior held about invalid teammate " + std::to_string(j));
        b.validate();
    }

    std::vector<AugmentedTrajectory> out;
    out.reserve(trajectories.size());
    for (const auto& traj : trajectories) {
        validate_trajectory(world, traj);
        AugmentedTrajectory aug;
        aug.observer = observer;
        aug.hidden = traj.hidden;
        aug.seed = traj.seed;
        TeamBeliefs current = priors;
        for (const auto& st : traj.steps) {
            aug.steps.push_back({st.state, st.joint, current});
            for (auto& [j, belief] : current) {
                if (belief.size() == 1) continue;  // a point mass never moves
                belief = belief_update(planner, belief, st.state, st.joint[static_cast<std::size_t>(j)], j, config);
            }
        }
        aug.final_beliefs = std::move(current);
        out.push_back(std::move(aug));
    }
    return out;
}

AugmentedTrajectory fixed_beliefs(const Trajectory& trajectory, AgentId observer, const TeamBeliefs& beliefs) {
    AugmentedTrajectory aug;
    aug.observer = observer;
    aug.hidden = trajectory.hidden;
    aug.seed = trajectory.seed;
    for (const auto& st : trajectory.steps) aug.steps.push_back({st.state, st.joint, beliefs});
    aug.final_beliefs = beliefs;
    return aug;
}

}  // namespace mirl
