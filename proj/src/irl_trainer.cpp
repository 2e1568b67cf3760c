#include "mirl/irl_trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "mirl/errors.hpp"
#include "mirl/parallel.hpp"
#include "mirl/profiles.hpp"
#include "mirl/seeding.hpp"

namespace mirl {

void IrlConfig::validate() const {
    if (max_epochs < 1) throw ConfigError("max_epochs must be positive");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw ConfigError("lr_decay must lie in (0, 1]");
    if (n_rollouts < 1) throw ConfigError("n_rollouts must be positive");
    if (rollout_length < 0) throw ConfigError("rollout_length must be non-negative");
    if (!(convergence_tol > 0.0)) throw ConfigError("convergence_tol must be positive");
    if (convergence_patience < 1) throw ConfigError("convergence_patience must be positive");
}

FeatureCounts empirical_fc(const World& world, std::span<const Trajectory> trajectories, AgentId agent) {
    if (trajectories.empty()) throw std::invalid_argument("empirical feature counts need at least one trajectory");
    FeatureCounts fc{world.catalog_of(agent), std::vector<double>(world.catalog_of(agent).size(), 0.0)};
    std::vector<double> phi(fc.values.size());
    for (const auto& traj : trajectories)
        for (const auto& st : traj.steps) {
            if (static_cast<int>(st.joint.size()) != world.num_agents())
                throw ValidationError("trajectory joint action does not cover the roster");
            world.features_into(st.state, st.joint, agent, phi.data());
            for (std::size_t i = 0; i < phi.size(); ++i) fc.values[i] += phi[i];
        }
    for (double& v : fc.values) v /= static_cast<double>(trajectories.size());
    return fc;
}

namespace {

void check_augmented(const World& world, std::span<const AugmentedTrajectory> augmented, AgentId agent) {
    if (augmented.empty()) throw ValidationError("estimated feature counts need augmented trajectories");
    for (std::size_t t = 0; t < augmented.size(); ++t) {
        const auto& aug = augmented[t];
        if (aug.observer != agent)
            throw ValidationError("augmented trajectory " + std::to_string(t) + " was inferred by agent " +
                                  std::to_string(aug.observer) + ", not learner " + std::to_string(agent));
        if (aug.steps.empty())
            throw ValidationError("augmented trajectory " + std::to_string(t) + " has no initial state");
        for (std::size_t j = 0; j < aug.steps.size(); ++j) {
            const auto& beliefs = aug.steps[j].beliefs;
            for (AgentId k = 0; k < world.num_agents(); ++k)
                if (k != agent && !beliefs.count(k))
                    throw ValidationError("augmented trajectory " + std::to_string(t) + " step " +
                                          std::to_string(j) + " lacks a belief about agent " + std::to_string(k));
            for (const auto& [k, b] : beliefs) {
                try {
                    b.validate();
                } catch (const ContractViolation& e) {
                    throw ValidationError("augmented trajectory " + std::to_string(t) + " step " +
                                          std::to_string(j) + ": " + e.what());
                }
            }
        }
    }
}

const TeamBeliefs& beliefs_at(const AugmentedTrajectory& aug, int step) {
    const auto j = std::min<std::size_t>(static_cast<std::size_t>(step), aug.steps.size() - 1);
    return aug.steps[j].beliefs;
}

}  // namespace

FeatureCounts estimated_fc(const Planner& planner, const RewardProfile& theta,
                           std::span<const AugmentedTrajectory> augmented, AgentId agent, const IrlConfig& config,
                           const PlannerConfig& planner_config, std::uint64_t seed) {
    if (config.exact_expectation) return exact_fc(planner, theta, augmented, agent, config, planner_config);
    const World& world = planner.world();
    check_augmented(world, augmented, agent);
    const std::size_t n_features = world.catalog_of(agent).size();

    std::vector<std::vector<double>> sums(static_cast<std::size_t>(config.n_rollouts),
                                          std::vector<double>(n_features, 0.0));
    parallel_for(sums.size(), config.threads, [&](std::size_t r) {
        const auto& aug = augmented[r % augmented.size()];
        SeedStream rng(derive_seed(seed, {r}));
        WorldState state = aug.steps.front().state;
        std::vector<double> phi(n_features);
        for (int j = 0; j < config.rollout_length; ++j) {
            const auto& beliefs = beliefs_at(aug, j);
            JointAction joint(static_cast<std::size_t>(world.num_agents()), Action::Wait);
            joint[static_cast<std::size_t>(agent)] =
                sample_action(planner.softmax_policy(state, agent, theta, beliefs, planner_config), rng);
            for (AgentId k = 0; k < world.num_agents(); ++k) {
                if (k == agent) continue;
                joint[static_cast<std::size_t>(k)] =
                    sample_action(planner.predict_teammate(state, k, beliefs.at(k), planner_config), rng);
            }
            world.features_into(state, joint, agent, phi.data());
            for (std::size_t i = 0; i < n_features; ++i) sums[r][i] += phi[i];
            state = world.step(state, aug.hidden, joint);
        }
    });

    FeatureCounts fc{world.catalog_of(agent), std::vector<double>(n_features, 0.0)};
    for (const auto& s : sums)
        for (std::size_t i = 0; i < n_features; ++i) fc.values[i] += s[i];
    for (double& v : fc.values) v /= static_cast<double>(config.n_rollouts);
    return fc;
}

FeatureCounts exact_fc(const Planner& planner, const RewardProfile& theta,
                       std::span<const AugmentedTrajectory> augmented, AgentId agent, const IrlConfig& config,
                       const PlannerConfig& planner_config) {
    const World& world = planner.world();
    check_augmented(world, augmented, agent);
    const std::size_t n_features = world.catalog_of(agent).size();
    FeatureCounts fc{world.catalog_of(agent), std::vector<double>(n_features, 0.0)};

    // rollout r uses augmented[r mod count]; weight each source by its share of rollouts
    std::vector<double> share(augmented.size(), 0.0);
    for (int r = 0; r < config.n_rollouts; ++r) share[static_cast<std::size_t>(r) % augmented.size()] += 1.0;

    std::vector<double> phi(n_features);
    for (std::size_t t = 0; t < augmented.size(); ++t) {
        if (share[t] == 0.0) continue;
        const auto& aug = augmented[t];
        const double weight = share[t] / static_cast<double>(config.n_rollouts);
        std::unordered_map<std::string, std::pair<WorldState, double>> dist;
        dist.emplace(aug.steps.front().state.key(), std::make_pair(aug.steps.front().state, 1.0));
        for (int j = 0; j < config.rollout_length; ++j) {
            const auto& beliefs = beliefs_at(aug, j);
            std::unordered_map<std::string, std::pair<WorldState, double>> next_dist;
            for (const auto& [key, entry] : dist) {
                const auto& [state, p_state] = entry;
                // joint distribution: learner's policy times teammates' predictions
                std::vector<std::pair<double, JointAction>> joints{
                    {p_state, JointAction(static_cast<std::size_t>(world.num_agents()), Action::Wait)}};
                for (AgentId k = 0; k < world.num_agents(); ++k) {
                    const auto pol = k == agent ? planner.softmax_policy(state, agent, theta, beliefs, planner_config)
                                                : planner.predict_teammate(state, k, beliefs.at(k), planner_config);
                    std::vector<std::pair<double, JointAction>> grown;
                    for (const auto& [p, joint] : joints)
                        for (std::size_t a = 0; a < pol.actions.size(); ++a) {
                            JointAction ja = joint;
                            ja[static_cast<std::size_t>(k)] = pol.actions[a];
                            grown.emplace_back(p * pol.probabilities[a], std::move(ja));
                        }
                    joints = std::move(grown);
                }
                for (const auto& [p, joint] : joints) {
                    world.features_into(state, joint, agent, phi.data());
                    for (std::size_t i = 0; i < n_features; ++i) fc.values[i] += weight * p * phi[i];
                    auto next = world.step(state, aug.hidden, joint);
                    auto nkey = next.key();
                    auto [it, inserted] = next_dist.try_emplace(std::move(nkey), std::move(next), 0.0);
                    it->second.second += p;
                }
            }
            dist = std::move(next_dist);
        }
    }
    return fc;
}

std::vector<double> irl_step(std::span<const double> theta, std::span<const double> phi_emp,
                             std::span<const double> phi_est, double lr) {
    if (theta.size() != phi_emp.size() || theta.size() != phi_est.size())
        throw ShapeError("irl_step: weight and feature-count vectors differ in length");
    std::vector<double> next(theta.size());
    double l1 = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        next[i] = theta[i] - lr * (phi_est[i] - phi_emp[i]);
        l1 += std::abs(next[i]);
    }
    if (l1 > 0.0)
        for (double& v : next) v /= l1;
    return next;
}

TrainResult train(const Planner& planner, AgentId agent, std::span<const Trajectory> trajectories,
                  std::span<const AugmentedTrajectory> augmented, const IrlConfig& config,
                  const PlannerConfig& planner_config, std::uint64_t seed) {
    config.validate();
    planner_config.validate();
    const World& world = planner.world();
    const Role role = world.role(agent);

    const auto emp = empirical_fc(world, trajectories, agent);
    TrainResult result{zero_profile(role, "irl_" + std::string(to_string(role))), {}};
    result.trace.catalog = world.catalog_of(agent);

    int calm = 0;
    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        const double lr = config.learning_rate * std::pow(config.lr_decay, epoch);
        const auto est = estimated_fc(planner, result.profile, augmented, agent, config, planner_config,
                                      derive_seed(seed, {static_cast<std::uint64_t>(epoch)}));
        auto next = irl_step(result.profile.weights, emp.values, est.values, lr);

        EpochRecord rec;
        rec.epoch = epoch;
        rec.phi_est = est.values;
        rec.learning_rate = lr;
        double g2 = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            const double g = est.values[i] - emp.values[i];
            g2 += g * g;
            rec.delta_inf = std::max(rec.delta_inf, std::abs(next[i] - result.profile.weights[i]));
        }
        rec.gradient_norm = std::sqrt(g2);
        rec.delta_over_lr = rec.delta_inf / lr;
        rec.theta = next;
        result.profile.weights = std::move(next);
        result.trace.epochs.push_back(std::move(rec));

        calm = result.trace.epochs.back().delta_inf < config.convergence_tol ? calm + 1 : 0;
        if (calm >= config.convergence_patience) {
            result.trace.converged = true;
            result.trace.converged_epoch = epoch;
            break;
        }
    }
    return result;
}

TeamResult train_team(const Planner& planner, std::span<const Trajectory> trajectories, const TeamPriors& priors,
                      const IrlConfig& config, const PlannerConfig& planner_config, std::uint64_t seed,
                      unsigned agent_threads) {
    const World& world = planner.world();
    TeamResult out;
    std::vector<AgentId> agents;
    for (AgentId k = 0; k < world.num_agents(); ++k) {
        agents.push_back(k);
        auto it = priors.find(k);
        const TeamBeliefs empty;
        out.augmented[k] = infer_models(planner, trajectories, k, it == priors.end() ? empty : it->second,
                                        planner_config);
        out.learned[k];
    }
    parallel_for(agents.size(), agent_threads, [&](std::size_t i) {
        const AgentId k = agents[i];
        out.learned.at(k) = train(planner, k, trajectories, out.augmented.at(k), config, planner_config,
                                  derive_seed(seed, {static_cast<std::uint64_t>(k)}));
    });
    return out;
}

}  // namespace mirl
