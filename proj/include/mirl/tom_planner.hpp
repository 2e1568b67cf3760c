#pragma once

// Finite-horizon soft-max planning with level-1 theory of mind.
//
// A planning agent evaluates its actions by cumulative discounted reward,
// predicting each teammate as a soft-max reward maximizer under a belief
// over mental models. Modeled teammates (level 0) treat everybody else as
// uniformly random.

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mirl/sar_env.hpp"
#include "mirl/seeding.hpp"

namespace mirl {

struct MentalModel {
    RewardProfile profile;
    double rationality = 60.0;
    int horizon = 2;

    bool operator==(const MentalModel&) const = default;
};

/// Distribution over a teammate's mental models.
struct ModelBelief {
    std::vector<MentalModel> support;
    std::vector<double> probabilities;

    static ModelBelief point_mass(MentalModel model);
    static ModelBelief uniform(std::vector<MentalModel> support);

    std::size_t size() const { return support.size(); }
    /// Throws ContractViolation unless normalized within 1e-9 with matching lengths.
    void validate() const;
    std::vector<std::string> names() const;
    /// Same support (by profile name and parameters), possibly different probabilities.
    bool same_support(const ModelBelief& other) const;
};

/// Belief of one observer about each of its teammates. A teammate without an
/// entry is treated as uniformly random.
using TeamBeliefs = std::map<AgentId, ModelBelief>;

struct PlannerConfig {
    int horizon = 2;
    double discount = 0.9;
    double rationality = 60.0;
    /// Prior probability that an Unknown cell holds a victim.
    double presence_prior = 0.5;

    void validate() const;
    bool operator==(const PlannerConfig&) const = default;
};

struct PolicyDistribution {
    std::vector<Action> actions;
    std::vector<double> probabilities;

    double probability_of(Action a) const;
};

/// probabilities ∝ exp(rationality · q), computed with max subtraction.
PolicyDistribution softmax(std::vector<Action> actions, std::span<const double> q, double rationality);

/// Inverse-CDF draw; consumes exactly one uniform from the stream.
Action sample_action(const PolicyDistribution& policy, SeedStream& rng);

class Planner {
public:
    explicit Planner(World world);
    ~Planner();
    Planner(const Planner&) = delete;
    Planner& operator=(const Planner&) = delete;

    const World& world() const { return world_; }

    /// Level-0 soft-max policy of agent under a mental model: others uniform.
    /// Results are memoized; the cache is shared and thread-safe.
    PolicyDistribution model_policy(const WorldState& state, AgentId agent, const MentalModel& model,
                                    const PlannerConfig& config) const;

    /// Belief-weighted mixture of the teammate's level-0 policies.
    PolicyDistribution predict_teammate(const WorldState& state, AgentId teammate, const ModelBelief& belief,
                                        const PlannerConfig& config) const;

    /// Q values over legal_actions(state, agent) in that order.
    std::vector<double> q_values(const WorldState& state, AgentId agent, const RewardProfile& profile,
                                 const TeamBeliefs& beliefs, const PlannerConfig& config) const;

    PolicyDistribution softmax_policy(const WorldState& state, AgentId agent, const RewardProfile& profile,
                                      const TeamBeliefs& beliefs, const PlannerConfig& config) const;

    /// Number of memoized level-0 policies and level-1 q vectors.
    std::size_t cache_size() const;
    void clear_cache();

private:
    struct ModelCache;

    World world_;
    mutable std::shared_mutex mutex_;
    mutable std::unordered_map<std::string, std::unique_ptr<ModelCache>> models_;
    // level-1 q vectors keyed by (agent, weights, beliefs, config, state)
    mutable std::mutex responses_mutex_;
    mutable std::unordered_map<std::string, std::vector<double>> responses_;
};

}  // namespace mirl
