#include "mirl/tom_planner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <functional>
#include <mutex>
#include <numeric>

#include "mirl/errors.hpp"

namespace mirl {

ModelBelief ModelBelief::point_mass(MentalModel model) {
    ModelBelief b;
    b.support.push_back(std::move(model));
    b.probabilities.push_back(1.0);
    return b;
}

ModelBelief ModelBelief::uniform(std::vector<MentalModel> support) {
    ModelBelief b;
    const double p = support.empty() ? 0.0 : 1.0 / static_cast<double>(support.size());
    b.probabilities.assign(support.size(), p);
    b.support = std::move(support);
    return b;
}

void ModelBelief::validate() const {
    if (support.empty()) throw ContractViolation("model belief has an empty support");
    if (support.size() != probabilities.size())
        throw ContractViolation("model belief support and probability vector differ in length");
    double total = 0.0;
    for (double p : probabilities) {
        if (!(p >= 0.0)) throw ContractViolation("model belief has a negative or NaN probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ContractViolation("model belief is not normalized");
    for (const auto& m : support)
        if (!(m.rationality > 0.0) || m.horizon < 0) throw ContractViolation("invalid mental model parameters");
}

std::vector<std::string> ModelBelief::names() const {
    std::vector<std::string> out;
    out.reserve(support.size());
    for (const auto& m : support) out.push_back(m.profile.name);
    return out;
}

bool ModelBelief::same_support(const ModelBelief& other) const { return support == other.support; }

void PlannerConfig::validate() const {
    if (horizon < 0) throw ConfigError("planner horizon must be non-negative");
    if (!(discount >= 0.0 && discount < 1.0)) throw ConfigError("discount must lie in [0, 1)");
    if (!(rationality > 0.0)) throw ConfigError("rationality must be positive");
    if (!(presence_prior >= 0.0 && presence_prior <= 1.0)) throw ConfigError("presence prior must lie in [0, 1]");
}

double PolicyDistribution::probability_of(Action a) const {
    for (std::size_t i = 0; i < actions.size(); ++i)
        if (actions[i] == a) return probabilities[i];
    return 0.0;
}

PolicyDistribution softmax(std::vector<Action> actions, std::span<const double> q, double rationality) {
    if (actions.size() != q.size()) throw ShapeError("softmax: action and value vectors differ in length");
    PolicyDistribution out;
    out.actions = std::move(actions);
    out.probabilities.resize(q.size());
    if (q.empty()) return out;
    const double top = *std::max_element(q.begin(), q.end());
    double total = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        out.probabilities[i] = std::exp(rationality * (q[i] - top));
        total += out.probabilities[i];
    }
    for (double& p : out.probabilities) p /= total;
    return out;
}

Action sample_action(const PolicyDistribution& policy, SeedStream& rng) {
    if (policy.actions.empty()) throw ContractViolation("cannot sample from an empty policy");
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < policy.actions.size(); ++i) {
        acc += policy.probabilities[i];
        if (u < acc) return policy.actions[i];
    }
    // rounding left u above the accumulated mass; take the last action with support
    for (std::size_t i = policy.actions.size(); i-- > 0;)
        if (policy.probabilities[i] > 0.0) return policy.actions[i];
    return policy.actions.back();
}

namespace {

struct Outcome {
    double probability;
    JointAction joint;  // planning agent's slot is overwritten per action
};

/// Distribution over the planning agent's teammates' joint action at a state.
using TeammateModel = std::function<std::vector<PolicyDistribution>(const WorldState&)>;

}  // namespace

/// Memo tables of one evaluation context: values per (state, remaining
/// depth) and teammate joint-action distributions per state.
struct EvalMemo {
    std::unordered_map<std::string, double> values;
    std::unordered_map<std::string, std::vector<Outcome>> outcomes;
};

/// Level-0 memo for one mental model; shared by every call that models it.
struct Planner::ModelCache {
    std::mutex mutex;
    EvalMemo memo;
    std::unordered_map<std::string, std::vector<double>> policies;
};

namespace {

/// Expectimax over the agent's own soft-max policy and the teammates'
/// predicted policies; values memoized per (state, remaining depth).
class Evaluator {
public:
    Evaluator(const World& world, AgentId agent, std::span<const double> weights, TeammateModel teammates,
              double rationality, double discount, double presence_prior, EvalMemo& memo,
              bool memo_outcomes)
        : world_(world),
          agent_(agent),
          weights_(weights),
          teammates_(std::move(teammates)),
          rationality_(rationality),
          discount_(discount),
          prior_(presence_prior),
          values_(memo.values),
          outcomes_(memo.outcomes),
          memo_outcomes_(memo_outcomes) {}

    std::vector<double> q(const WorldState& s, int depth) {
        const auto d = static_cast<std::size_t>(depth);
        if (successors_.size() <= d) successors_.resize(d + 1);
        const auto& legal = world_.legal_actions(s, agent_);
        const auto& others = outcomes(s, depth);
        std::vector<double> q(legal.size(), 0.0);
        std::array<double, 8> phi{};
        JointAction joint;
        if (depth == 0 && !others.empty() && !world_.features_coupled(s, agent_)) {
            // immediate reward does not depend on the teammates' actions
            joint = others.front().joint;
            for (std::size_t i = 0; i < legal.size(); ++i) {
                joint[static_cast<std::size_t>(agent_)] = legal[i];
                world_.features_into(s, joint, agent_, phi.data());
                for (std::size_t f = 0; f < weights_.size(); ++f) q[i] += weights_[f] * phi[f];
            }
            return q;
        }
        for (std::size_t i = 0; i < legal.size(); ++i) {
            double total = 0.0;
            for (const auto& o : others) {
                joint = o.joint;
                joint[static_cast<std::size_t>(agent_)] = legal[i];
                world_.features_into(s, joint, agent_, phi.data());
                double r = 0.0;
                for (std::size_t f = 0; f < weights_.size(); ++f) r += weights_[f] * phi[f];
                double cont = 0.0;
                if (depth > 0) {
                    auto& next = successors_[d];
                    world_.expand_into(s, joint, prior_, next);
                    for (const auto& [p, n] : next) cont += p * value(n, depth - 1);
                }
                total += o.probability * (r + discount_ * cont);
            }
            q[i] = total;
        }
        return q;
    }

    double value(const WorldState& s, int depth) {
        std::string key = s.key();
        key.push_back(static_cast<char>(depth));
        if (auto it = values_.find(key); it != values_.end()) return it->second;
        const auto qs = q(s, depth);
        // soft-max weighted mean of q
        const double top = *std::max_element(qs.begin(), qs.end());
        double num = 0.0, den = 0.0;
        for (double x : qs) {
            const double w = std::exp(rationality_ * (x - top));
            num += w * x;
            den += w;
        }
        const double v = num / den;
        values_.emplace(std::move(key), v);
        return v;
    }

private:
    // Product of the teammates' distributions, last teammate varying
    // fastest; entries of `out` are overwritten in place to keep their storage.
    void build_outcomes(const WorldState& s, std::vector<Outcome>& out) {
        const auto agents = static_cast<std::size_t>(world_.num_agents());
        if (teammates_) {
            dists_ = teammates_(s);
        } else {
            dists_.resize(agents);
            for (AgentId j = 0; j < world_.num_agents(); ++j) {
                if (j == agent_) continue;
                auto& d = dists_[static_cast<std::size_t>(j)];
                d.actions = world_.legal_actions(s, j);
                d.probabilities.assign(d.actions.size(), 1.0 / static_cast<double>(d.actions.size()));
            }
        }
        // support of each teammate (zero-probability actions dropped)
        support_.resize(agents);
        pick_.resize(agents);
        std::size_t total = 1;
        for (std::size_t j = 0; j < agents; ++j) {
            auto& sup = support_[j];
            sup.clear();
            if (static_cast<AgentId>(j) == agent_) continue;
            const auto& d = dists_[j];
            for (std::size_t a = 0; a < d.actions.size(); ++a)
                if (d.probabilities[a] != 0.0) sup.push_back(a);
            total *= sup.size();
        }
        out.resize(total);
        for (std::size_t n = 0; n < total; ++n) {
            Outcome& o = out[n];
            o.joint.resize(agents);
            o.joint[static_cast<std::size_t>(agent_)] = Action::Wait;
            o.probability = 1.0;
            std::size_t rest = n;
            for (std::size_t j = agents; j-- > 0;) {
                if (static_cast<AgentId>(j) == agent_) continue;
                const auto& sup = support_[j];
                pick_[j] = sup[rest % sup.size()];
                rest /= sup.size();
                o.joint[j] = dists_[j].actions[pick_[j]];
            }
            for (std::size_t j = 0; j < agents; ++j)
                if (static_cast<AgentId>(j) != agent_) o.probability *= dists_[j].probabilities[pick_[j]];
        }
    }

    // Without a memo the table lives in a per-depth scratch slot, which stays
    // valid for the whole q() call at that depth.
    const std::vector<Outcome>& outcomes(const WorldState& s, int depth) {
        if (!memo_outcomes_) {
            if (scratch_.size() <= static_cast<std::size_t>(depth)) scratch_.resize(static_cast<std::size_t>(depth) + 1);
            auto& slot = scratch_[static_cast<std::size_t>(depth)];
            build_outcomes(s, slot);
            return slot;
        }
        std::string key = s.key();
        if (auto it = outcomes_.find(key); it != outcomes_.end()) return it->second;
        std::vector<Outcome> out;
        build_outcomes(s, out);
        return outcomes_.emplace(std::move(key), std::move(out)).first->second;
    }

    const World& world_;
    AgentId agent_;
    std::span<const double> weights_;
    TeammateModel teammates_;
    double rationality_;
    double discount_;
    double prior_;
    std::unordered_map<std::string, double>& values_;
    std::unordered_map<std::string, std::vector<Outcome>>& outcomes_;
    bool memo_outcomes_;
    std::vector<std::vector<Outcome>> scratch_;
    std::vector<PolicyDistribution> dists_;
    std::vector<std::vector<std::size_t>> support_;
    std::vector<std::size_t> pick_;
    // successor buffers per depth; recursion only ever descends, so a
    // buffer is never reused while an outer frame iterates it
    std::vector<std::vector<std::pair<double, WorldState>>> successors_;
};

PolicyDistribution uniform_policy(std::vector<Action> actions) {
    PolicyDistribution d;
    d.probabilities.assign(actions.size(), 1.0 / static_cast<double>(actions.size()));
    d.actions = std::move(actions);
    return d;
}

void check_profile(const World& world, AgentId agent, const RewardProfile& profile) {
    if (profile.catalog != world.catalog_of(agent) || profile.weights.size() != profile.catalog.size())
        throw ShapeError("profile '" + profile.name + "' does not match the feature catalog of agent " +
                         std::to_string(agent));
}

constexpr std::size_t kMaxMemoEntries = 2000000;
// level-1 entries carry a belief fingerprint, so keep fewer
constexpr std::size_t kMaxResponseEntries = 200000;

template <typename T>
void append_bytes(std::string& out, const T& v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

}  // namespace

Planner::Planner(World world) : world_(std::move(world)) {}

PolicyDistribution Planner::model_policy(const WorldState& state, AgentId agent, const MentalModel& model,
                                         const PlannerConfig& config) const {
    check_profile(world_, agent, model.profile);
    if (!(model.rationality > 0.0) || model.horizon < 0) throw ContractViolation("invalid mental model parameters");

    std::string fingerprint;
    fingerprint.reserve(64);
    fingerprint.append(model.profile.name);
    fingerprint.push_back('\0');
    for (double w : model.profile.weights) append_bytes(fingerprint, w);
    append_bytes(fingerprint, model.rationality);
    append_bytes(fingerprint, model.horizon);
    append_bytes(fingerprint, config.discount);
    append_bytes(fingerprint, config.presence_prior);
    append_bytes(fingerprint, agent);

    ModelCache* cache = nullptr;
    {
        std::shared_lock lock(mutex_);
        if (auto it = models_.find(fingerprint); it != models_.end()) cache = it->second.get();
    }
    if (!cache) {
        std::unique_lock lock(mutex_);
        auto& slot = models_[fingerprint];
        if (!slot) slot = std::make_unique<ModelCache>();
        cache = slot.get();
    }

    std::vector<Action> legal = world_.legal_actions(state, agent);
    std::string key = state.key();
    // Level-0 evaluation never re-enters model_policy, so holding the
    // per-model lock for the whole computation cannot deadlock.
    std::lock_guard lock(cache->mutex);
    if (auto it = cache->policies.find(key); it != cache->policies.end()) return {std::move(legal), it->second};

    Evaluator ev(world_, agent, model.profile.weights, nullptr,
                 model.rationality, config.discount, config.presence_prior, cache->memo, false);
    auto policy = softmax(std::move(legal), ev.q(state, model.horizon), model.rationality);
    // pure caches: dropping them only costs recomputation
    if (cache->memo.values.size() > kMaxMemoEntries) cache->memo.values = {};
    if (cache->policies.size() > kMaxMemoEntries) cache->policies = {};
    cache->policies.emplace(std::move(key), policy.probabilities);
    return policy;
}

PolicyDistribution Planner::predict_teammate(const WorldState& state, AgentId teammate, const ModelBelief& belief,
                                             const PlannerConfig& config) const {
    if (belief.support.empty()) throw ContractViolation("cannot predict a teammate from an empty belief");
    belief.validate();
    PolicyDistribution mix;
    mix.actions = world_.legal_actions(state, teammate);
    mix.probabilities.assign(mix.actions.size(), 0.0);
    for (std::size_t m = 0; m < belief.size(); ++m) {
        const double weight = belief.probabilities[m];
        if (weight == 0.0) continue;
        const auto p = model_policy(state, teammate, belief.support[m], config);
        for (std::size_t i = 0; i < p.probabilities.size(); ++i) mix.probabilities[i] += weight * p.probabilities[i];
    }
    return mix;
}

std::vector<double> Planner::q_values(const WorldState& state, AgentId agent, const RewardProfile& profile,
                                      const TeamBeliefs& beliefs, const PlannerConfig& config) const {
    config.validate();
    check_profile(world_, agent, profile);
    for (const auto& [j, b] : beliefs) {
        if (j == agent || j < 0 || j >= world_.num_agents())
            throw std::out_of_range("belief held about invalid teammate " + std::to_string(j));
        b.validate();
    }

    std::string key;
    key.reserve(256);
    append_bytes(key, agent);
    for (double w : profile.weights) append_bytes(key, w);
    append_bytes(key, config.horizon);
    append_bytes(key, config.discount);
    append_bytes(key, config.rationality);
    append_bytes(key, config.presence_prior);
    for (const auto& [j, b] : beliefs) {
        append_bytes(key, j);
        for (std::size_t m = 0; m < b.size(); ++m) {
            key.append(b.support[m].profile.name);
            key.push_back('\0');
            for (double w : b.support[m].profile.weights) append_bytes(key, w);
            append_bytes(key, b.support[m].rationality);
            append_bytes(key, b.support[m].horizon);
            append_bytes(key, b.probabilities[m]);
        }
        key.push_back('|');
    }
    key.append(state.key());
    {
        std::lock_guard lock(responses_mutex_);
        if (auto it = responses_.find(key); it != responses_.end()) return it->second;
    }

    EvalMemo memo;
    Evaluator ev(
        world_, agent, profile.weights,
        [this, agent, &beliefs, &config](const WorldState& s) {
            std::vector<PolicyDistribution> out(static_cast<std::size_t>(world_.num_agents()));
            for (AgentId j = 0; j < world_.num_agents(); ++j) {
                if (j == agent) continue;
                auto it = beliefs.find(j);
                out[static_cast<std::size_t>(j)] = it == beliefs.end()
                                                       ? uniform_policy(world_.legal_actions(s, j))
                                                       : predict_teammate(s, j, it->second, config);
            }
            return out;
        },
        config.rationality, config.discount, config.presence_prior, memo, true);
    auto q = ev.q(state, config.horizon);
    std::lock_guard lock(responses_mutex_);
    if (responses_.size() > kMaxResponseEntries) responses_ = {};
    responses_.emplace(std::move(key), q);
    return q;
}

PolicyDistribution Planner::softmax_policy(const WorldState& state, AgentId agent, const RewardProfile& profile,
                                           const TeamBeliefs& beliefs, const PlannerConfig& config) const {
    const auto q = q_values(state, agent, profile, beliefs, config);
    return softmax(world_.legal_actions(state, agent), q, config.rationality);
}

Planner::~Planner() = default;

std::size_t Planner::cache_size() const {
    std::shared_lock lock(mutex_);
    std::size_t n = 0;
    for (const auto& [k, c] : models_) {
        std::lock_guard inner(c->mutex);
        n += c->policies.size();
    }
    std::lock_guard inner(responses_mutex_);
    return n + responses_.size();
}

void Planner::clear_cache() {
    std::unique_lock lock(mutex_);
    models_.clear();
    std::lock_guard inner(responses_mutex_);
    responses_.clear();
}

}  // namespace mirl
