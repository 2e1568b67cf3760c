#include "mirl/sar_env.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <numeric>

#include "mirl/errors.hpp"
#include "mirl/seeding.hpp"

namespace mirl {

namespace {

constexpr std::array<std::string_view, 5> kStatusNames{"unknown", "found", "ready", "clear", "empty"};
constexpr std::array<std::string_view, kNumActions> kActionNames{
    "up", "down", "left", "right", "wait", "search", "triage", "evacuate", "call"};
constexpr std::array<std::string_view, 2> kRoleNames{"medic", "explorer"};

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::array<std::string_view, N>& names, const char* what) {
    for (std::size_t i = 0; i < N; ++i)
        if (names[i] == s) return static_cast<Enum>(i);
    throw ValidationError(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

}  // namespace

std::string_view to_string(VictimStatus s) { return kStatusNames[static_cast<std::size_t>(s)]; }
std::string_view to_string(Action a) { return kActionNames[static_cast<std::size_t>(a)]; }
std::string_view to_string(Role r) { return kRoleNames[static_cast<std::size_t>(r)]; }
VictimStatus parse_status(std::string_view s) { return parse_enum<VictimStatus>(s, kStatusNames, "victim status"); }
Action parse_action(std::string_view s) { return parse_enum<Action>(s, kActionNames, "action"); }
Role parse_role(std::string_view s) { return parse_enum<Role>(s, kRoleNames, "role"); }

int GridSpec::manhattan(int a, int b) const {
    return std::abs(row(a) - row(b)) + std::abs(col(a) - col(b));
}

std::string WorldState::key() const {
    // one byte per index when every index fits, else two; the two layouts
    // differ in length so they cannot collide
    const int beacon = help_beacon ? *help_beacon : -1;
    bool narrow = beacon < 0xff;
    for (int p : positions) narrow = narrow && p < 0xff;
    const std::size_t width = narrow ? 1 : 2;
    std::string k(width * (positions.size() + 1) + statuses.size(), '\0');
    char* out = k.data();
    auto put = [&out, narrow](int v) {
        if (narrow) {
            *out++ = static_cast<char>(v < 0 ? 0xff : v);
        } else {
            const int u = v < 0 ? 0xffff : v;
            *out++ = static_cast<char>(u & 0xff);
            *out++ = static_cast<char>((u >> 8) & 0xff);
        }
    };
    for (int p : positions) put(p);
    for (auto st : statuses) *out++ = static_cast<char>(st);
    put(beacon);
    return k;
}

World::World(EnvConfig config) : config_(std::move(config)) {
    const auto& g = config_.grid;
    if (g.width < 1 || g.height < 1) throw ConfigError("grid dimensions must be positive");
    if (g.cells() < 2) throw ConfigError("grid needs at least 2 cells so two agents can occupy distinct cells");
    if (g.cells() > 0xfffe) throw ConfigError("grid too large");
    if (config_.roster.empty()) throw ConfigError("roster is empty");
    if (config_.n_victims < 0 || config_.n_victims > g.cells())
        throw ConfigError("victim count must be in [0, cells]");
    if (config_.start_cells.empty()) {
        const int n = g.cells();
        const std::array<int, 4> corners{0, n - 1, g.width - 1, n - g.width};
        if (config_.roster.size() > corners.size())
            throw ConfigError("start cells must be given explicitly for more than 4 agents");
        for (std::size_t i = 0; i < config_.roster.size(); ++i) config_.start_cells.push_back(corners[i]);
    }
    if (config_.start_cells.size() != config_.roster.size())
        throw ConfigError("one start cell per agent required");
    for (int c : config_.start_cells)
        if (c < 0 || c >= g.cells()) throw ConfigError("start cell out of range");

    for (Role r : {Role::Medic, Role::Explorer}) {
        auto& table = legal_[static_cast<std::size_t>(r)];
        for (int cell = 0; cell < g.cells(); ++cell) {
            std::vector<Action> out;
            if (g.row(cell) > 0) out.push_back(Action::Up);
            if (g.row(cell) < g.height - 1) out.push_back(Action::Down);
            if (g.col(cell) > 0) out.push_back(Action::Left);
            if (g.col(cell) < g.width - 1) out.push_back(Action::Right);
            if (r == Role::Medic) out.push_back(Action::Wait);
            out.push_back(Action::Search);
            if (r == Role::Medic) out.push_back(Action::Triage);
            out.push_back(Action::Evacuate);
            if (r == Role::Medic) out.push_back(Action::Call);
            table.push_back(std::move(out));
        }
    }
}

Role World::role(AgentId agent) const {
    check_agent(agent);
    return config_.roster[static_cast<std::size_t>(agent)];
}

void World::check_agent(AgentId agent) const {
    if (agent < 0 || agent >= num_agents())
        throw std::out_of_range("unknown agent id " + std::to_string(agent));
}

std::pair<WorldState, HiddenConfig> World::init_world(std::uint64_t seed) const {
    return init_world(config_.n_victims, seed);
}

std::pair<WorldState, HiddenConfig> World::init_world(int n_victims, std::uint64_t seed) const {
    const int n = grid().cells();
    if (n_victims < 0 || n_victims > n) throw ConfigError("victim count must be in [0, cells]");

    WorldState state;
    state.positions = config_.start_cells;
    state.statuses.assign(static_cast<std::size_t>(n), VictimStatus::Unknown);

    // partial Fisher-Yates: first n_victims entries are the sampled cells
    std::vector<int> cells(static_cast<std::size_t>(n));
    std::iota(cells.begin(), cells.end(), 0);
    SeedStream rng(seed);
    HiddenConfig hidden;
    hidden.victim_present.assign(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n_victims; ++i) {
        auto j = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(n - i));
        std::swap(cells[static_cast<std::size_t>(i)], cells[j]);
        hidden.victim_present[static_cast<std::size_t>(cells[static_cast<std::size_t>(i)])] = 1;
    }
    return {std::move(state), std::move(hidden)};
}

const std::vector<Action>& World::legal_actions(const WorldState& state, AgentId agent) const {
    const Role r = role(agent);
    const int cell = state.positions.at(static_cast<std::size_t>(agent));
    if (cell < 0 || cell >= grid().cells()) throw ValidationError("agent position out of range");
    return legal_[static_cast<std::size_t>(r)][static_cast<std::size_t>(cell)];
}

bool World::is_legal(const WorldState& state, AgentId agent, Action a) const {
    const auto& legal = legal_actions(state, agent);
    return std::find(legal.begin(), legal.end(), a) != legal.end();
}

void World::check_joint(const WorldState& state, const JointAction& joint) const {
    if (static_cast<int>(joint.size()) != num_agents())
        throw ContractViolation("joint action must hold exactly one action per agent");
    for (AgentId k = 0; k < num_agents(); ++k)
        if (!is_legal(state, k, joint[static_cast<std::size_t>(k)]))
            throw ContractViolation("illegal action '" + std::string(to_string(joint[static_cast<std::size_t>(k)])) +
                                    "' for agent " + std::to_string(k));
}

template <typename Outcome>
void World::apply(const WorldState& state, const JointAction& joint, Outcome&& outcome, WorldState& next) const {
    const auto& g = grid();
    const int agents = num_agents();
    next = state;

    for (AgentId k = 0; k < agents; ++k) {
        int& pos = next.positions[static_cast<std::size_t>(k)];
        switch (joint[static_cast<std::size_t>(k)]) {
            case Action::Up: pos -= g.width; break;
            case Action::Down: pos += g.width; break;
            case Action::Left: pos -= 1; break;
            case Action::Right: pos += 1; break;
            default: break;
        }
    }

    // Victim actions act on the pre-step status; each status admits exactly
    // one kind of transition so simultaneous actions cannot conflict.
    std::optional<int> called;
    for (AgentId k = 0; k < agents; ++k) {
        const Action a = joint[static_cast<std::size_t>(k)];
        const int cell = state.positions[static_cast<std::size_t>(k)];
        const auto c = static_cast<std::size_t>(cell);
        const VictimStatus before = state.statuses[c];
        if (a == Action::Search && before == VictimStatus::Unknown) {
            next.statuses[c] = outcome(cell) ? VictimStatus::Found : VictimStatus::Empty;
        } else if (a == Action::Triage && before == VictimStatus::Found) {
            next.statuses[c] = VictimStatus::Ready;
        } else if (a == Action::Evacuate && before == VictimStatus::Ready) {
            bool all = true;
            for (AgentId o = 0; o < agents && all; ++o)
                all = state.positions[static_cast<std::size_t>(o)] == cell &&
                      joint[static_cast<std::size_t>(o)] == Action::Evacuate;
            if (all) next.statuses[c] = VictimStatus::Clear;
        } else if (a == Action::Call && !called) {
            called = cell;
        }
    }

    if (called) {
        next.help_beacon = called;
    } else if (next.help_beacon && config_.beacon_clears_on_meeting) {
        const int b = *next.help_beacon;
        const bool together = std::all_of(next.positions.begin(), next.positions.end(),
                                          [b](int p) { return p == b; });
        if (together) next.help_beacon.reset();
    }
    if (next.help_beacon) {
        const auto s = next.statuses[static_cast<std::size_t>(*next.help_beacon)];
        if (s == VictimStatus::Clear || s == VictimStatus::Empty) next.help_beacon.reset();
    }
    ++next.time;
}

WorldState World::step(const WorldState& state, const HiddenConfig& hidden, const JointAction& joint) const {
    check_joint(state, joint);
    if (hidden.victim_present.size() != state.statuses.size())
        throw ShapeError("hidden configuration does not match the grid");
    WorldState next;
    apply(state, joint, [&hidden](int cell) { return hidden.present(cell); }, next);
    return next;
}

std::vector<std::pair<double, WorldState>> World::expand(const WorldState& state, const JointAction& joint,
                                                         double presence_prior) const {
    std::vector<std::pair<double, WorldState>> out;
    expand_into(state, joint, presence_prior, out);
    return out;
}

void World::expand_into(const WorldState& state, const JointAction& joint, double presence_prior,
                        std::vector<std::pair<double, WorldState>>& out) const {
    // Unknown cells searched this step, deduplicated.
    std::array<int, 8> searched{};
    std::size_t n = 0;
    std::vector<int> overflow;
    for (std::size_t k = 0; k < joint.size(); ++k) {
        const int cell = state.positions[k];
        if (joint[k] != Action::Search || state.statuses[static_cast<std::size_t>(cell)] != VictimStatus::Unknown)
            continue;
        if (std::find(searched.begin(), searched.begin() + static_cast<std::ptrdiff_t>(n), cell) !=
            searched.begin() + static_cast<std::ptrdiff_t>(n))
            continue;
        if (n == searched.size()) throw ContractViolation("too many simultaneous searches to enumerate");
        searched[n++] = cell;
    }
    const std::size_t branches = std::size_t{1} << n;
    std::size_t used = 0;
    if (out.size() < branches) out.resize(branches);
    for (std::size_t mask = 0; mask < branches; ++mask) {
        double p = 1.0;
        for (std::size_t i = 0; i < n; ++i) p *= (mask >> i & 1U) ? presence_prior : 1.0 - presence_prior;
        if (p == 0.0) continue;
        auto& slot = out[used++];
        slot.first = p;
        apply(
            state, joint,
            [&](int cell) {
                const auto i = static_cast<std::size_t>(
                    std::find(searched.begin(), searched.begin() + static_cast<std::ptrdiff_t>(n), cell) -
                    searched.begin());
                return (mask >> i & 1U) != 0;
            },
            slot.second);
    }
    out.resize(used);
}

const std::vector<std::string>& World::catalog(Role role) {
    static const std::vector<std::string> medic{"Dist2Vic", "Search", "Triage", "Evacuate", "Wait", "Call"};
    static const std::vector<std::string> explorer{"Dist2Help", "Search", "Evacuate"};
    return role == Role::Medic ? medic : explorer;
}

FeatureVector World::feature_vector(const WorldState& state, const JointAction& joint, AgentId agent) const {
    check_agent(agent);
    if (static_cast<int>(joint.size()) != num_agents() || static_cast<int>(state.positions.size()) != num_agents())
        throw ShapeError("joint action and state must cover every agent");
    FeatureVector phi(catalog_of(agent).size());
    features_into(state, joint, agent, phi.data());
    return phi;
}

bool World::features_coupled(const WorldState& state, AgentId agent) const {
    const int cell = state.positions[static_cast<std::size_t>(agent)];
    if (state.statuses[static_cast<std::size_t>(cell)] != VictimStatus::Ready) return false;
    return std::all_of(state.positions.begin(), state.positions.end(), [cell](int p) { return p == cell; });
}

void World::features_into(const WorldState& state, const JointAction& joint, AgentId agent, double* out) const {
    const Role r = config_.roster[static_cast<std::size_t>(agent)];
    const auto& g = grid();
    const int cell = state.positions[static_cast<std::size_t>(agent)];
    const Action a = joint[static_cast<std::size_t>(agent)];
    const VictimStatus here = state.statuses[static_cast<std::size_t>(cell)];
    const double d_max = g.max_distance();

    auto closeness = [&](int target) { return 1.0 - g.manhattan(cell, target) / d_max; };

    const double search = (a == Action::Search && here == VictimStatus::Unknown) ? 1.0 : 0.0;
    // Evacuation only counts when it succeeds: everyone on this Ready cell evacuating.
    double evacuate = 0.0;
    if (a == Action::Evacuate && here == VictimStatus::Ready) {
        evacuate = 1.0;
        for (std::size_t o = 0; o < joint.size(); ++o)
            if (state.positions[o] != cell || joint[o] != Action::Evacuate) evacuate = 0.0;
    }

    if (r == Role::Medic) {
        double dist2vic = 0.0;
        for (int c = 0; c < g.cells(); ++c)
            if (state.statuses[static_cast<std::size_t>(c)] == VictimStatus::Found)
                dist2vic = std::max(dist2vic, closeness(c));
        out[0] = dist2vic;
        out[1] = search;
        out[2] = (a == Action::Triage && here == VictimStatus::Found) ? 1.0 : 0.0;
        out[3] = evacuate;
        out[4] = a == Action::Wait ? 1.0 : 0.0;
        out[5] = (a == Action::Call && here == VictimStatus::Ready) ? 1.0 : 0.0;
        return;
    }
    out[0] = state.help_beacon ? closeness(*state.help_beacon) : 0.0;
    out[1] = search;
    out[2] = evacuate;
}

double World::reward(const WorldState& state, const JointAction& joint, AgentId agent,
                     const RewardProfile& profile) const {
    if (profile.catalog != catalog_of(agent) || profile.weights.size() != profile.catalog.size())
        throw ShapeError("profile '" + profile.name + "' does not match the feature catalog of agent " +
                         std::to_string(agent));
    const auto phi = feature_vector(state, joint, agent);
    return std::inner_product(phi.begin(), phi.end(), profile.weights.begin(), 0.0);
}

void World::validate(const WorldState& state) const {
    const int n = grid().cells();
    if (static_cast<int>(state.positions.size()) != num_agents())
        throw ValidationError("state has " + std::to_string(state.positions.size()) + " positions, expected " +
                              std::to_string(num_agents()));
    if (static_cast<int>(state.statuses.size()) != n)
        throw ValidationError("state has " + std::to_string(state.statuses.size()) + " statuses, expected " +
                              std::to_string(n));
    for (int p : state.positions)
        if (p < 0 || p >= n) throw ValidationError("agent position out of range");
    if (state.help_beacon && (*state.help_beacon < 0 || *state.help_beacon >= n))
        throw ValidationError("help beacon out of range");
    if (state.time < 0) throw ValidationError("negative time");
}

}  // namespace mirl
