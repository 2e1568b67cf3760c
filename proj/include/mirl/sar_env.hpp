#pragma once

// Search-and-rescue gridworld: two (or more) agents with designated roles
// search a grid for hidden victims, triage them and evacuate them jointly.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mirl {

using AgentId = int;

enum class VictimStatus : std::uint8_t { Unknown, Found, Ready, Clear, Empty };

enum class Action : std::uint8_t { Up, Down, Left, Right, Wait, Search, Triage, Evacuate, Call };

enum class Role : std::uint8_t { Medic, Explorer };

inline constexpr int kNumActions = 9;

std::string_view to_string(VictimStatus s);
std::string_view to_string(Action a);
std::string_view to_string(Role r);
VictimStatus parse_status(std::string_view s);
Action parse_action(std::string_view s);
Role parse_role(std::string_view s);

struct GridSpec {
    int width = 3;
    int height = 3;

    int cells() const { return width * height; }
    /// Largest Manhattan distance on the grid.
    int max_distance() const { return width + height - 2; }
    int row(int cell) const { return cell / width; }
    int col(int cell) const { return cell % width; }
    int manhattan(int a, int b) const;

    bool operator==(const GridSpec&) const = default;
};

/// Declarative environment description. Round-trips through JSON (see serialization.hpp).
struct EnvConfig {
    GridSpec grid;
    int n_victims = 3;
    std::vector<Role> roster{Role::Medic, Role::Explorer};
    /// Empty means "opposite corners" (agent 0 at cell 0, agent 1 at the last cell, ...).
    std::vector<int> start_cells;
    /// Clear the help beacon once every agent stands on it. Off: the beacon
    /// stays until its cell is resolved (Clear/Empty) or a new Call moves it.
    bool beacon_clears_on_meeting = false;
    std::uint64_t seed = 0;

    bool operator==(const EnvConfig&) const = default;
};

/// True victim occupancy; fixed for the lifetime of an episode.
struct HiddenConfig {
    std::vector<std::uint8_t> victim_present;

    bool present(int cell) const { return victim_present.at(static_cast<std::size_t>(cell)) != 0; }
    bool operator==(const HiddenConfig&) const = default;
};

struct WorldState {
    std::vector<int> positions;
    std::vector<VictimStatus> statuses;
    std::optional<int> help_beacon;
    int time = 0;

    bool operator==(const WorldState&) const = default;

    /// Compact byte key over everything that affects dynamics and rewards
    /// (positions, statuses, beacon). Time is deliberately excluded.
    std::string key() const;
};

using JointAction = std::vector<Action>;

using FeatureVector = std::vector<double>;

/// Named reward weight vector over a role's feature catalog.
struct RewardProfile {
    std::string name;
    std::vector<std::string> catalog;
    std::vector<double> weights;

    bool operator==(const RewardProfile&) const = default;
};

/// Static description of the task: grid, roster and start cells.
/// All member functions are const and free of shared mutable state.
class World {
public:
    explicit World(EnvConfig config);

    const EnvConfig& config() const { return config_; }
    const GridSpec& grid() const { return config_.grid; }
    int num_agents() const { return static_cast<int>(config_.roster.size()); }
    Role role(AgentId agent) const;

    /// Fresh episode: all cells Unknown, no beacon, agents at their start
    /// cells, and exactly n_victims present cells drawn without replacement.
    std::pair<WorldState, HiddenConfig> init_world(std::uint64_t seed) const;
    /// Same, with an explicit victim count (overrides the configured one).
    std::pair<WorldState, HiddenConfig> init_world(int n_victims, std::uint64_t seed) const;

    const std::vector<Action>& legal_actions(const WorldState& state, AgentId agent) const;
    bool is_legal(const WorldState& state, AgentId agent, Action a) const;

    /// Ground-truth transition using the hidden victim configuration.
    WorldState step(const WorldState& state, const HiddenConfig& hidden, const JointAction& joint) const;

    /// Transition as seen by an agent that only holds a presence prior for
    /// Unknown cells: each Unknown cell searched this step branches into
    /// Found (prob. presence_prior) and Empty. Returns (probability, state) pairs.
    std::vector<std::pair<double, WorldState>> expand(const WorldState& state, const JointAction& joint,
                                                      double presence_prior) const;
    /// Same as expand, reusing the storage of `out`.
    void expand_into(const WorldState& state, const JointAction& joint, double presence_prior,
                     std::vector<std::pair<double, WorldState>>& out) const;

    static const std::vector<std::string>& catalog(Role role);
    const std::vector<std::string>& catalog_of(AgentId agent) const { return catalog(role(agent)); }

    FeatureVector feature_vector(const WorldState& state, const JointAction& joint, AgentId agent) const;
    /// Allocation-free variant for hot loops; out must hold catalog_of(agent).size() entries.
    /// False when the agent's features at `state` cannot depend on the
    /// other agents' actions (only a joint evacuation couples them).
    bool features_coupled(const WorldState& state, AgentId agent) const;
    void features_into(const WorldState& state, const JointAction& joint, AgentId agent, double* out) const;
    double reward(const WorldState& state, const JointAction& joint, AgentId agent,
                  const RewardProfile& profile) const;

    /// Throws ValidationError when a state is malformed for this world.
    void validate(const WorldState& state) const;

private:
    void check_agent(AgentId agent) const;
    void check_joint(const WorldState& state, const JointAction& joint) const;
    /// Shared transition core; outcome decides what an Unknown search reveals.
    template <typename Outcome>
    void apply(const WorldState& state, const JointAction& joint, Outcome&& outcome, WorldState& next) const;

    EnvConfig config_;
    // [role][cell] -> legal actions
    std::array<std::vector<std::vector<Action>>, 2> legal_;
};

}  // namespace mirl
