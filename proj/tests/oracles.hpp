#pragma once

// Reference implementations used by the tests. They follow the written
// definitions directly (plain recursion, explicit enumeration) and share
// nothing with the planner beyond the World's dynamics and features.

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mirl/sar_env.hpp"
#include "mirl/seeding.hpp"
#include "mirl/tom_planner.hpp"

namespace oracle {

using namespace mirl;

struct Dist {
    std::vector<Action> actions;
    std::vector<double> probs;
};

inline Dist softmax_dist(const std::vector<Action>& actions, const std::vector<double>& q, double beta) {
    Dist d{actions, {}};
    double top = q.empty() ? 0.0 : q[0];
    for (double v : q) top = std::max(top, v);
    double z = 0.0;
    for (double v : q) z += std::exp(beta * (v - top));
    for (double v : q) d.probs.push_back(std::exp(beta * (v - top)) / z);
    return d;
}

inline Dist uniform_dist(const std::vector<Action>& actions) {
    return {actions, std::vector<double>(actions.size(), 1.0 / static_cast<double>(actions.size()))};
}

/// Successor distribution by enumerating every presence assignment of the
/// Unknown cells searched this step and running the ground-truth step.
inline std::vector<std::pair<double, WorldState>> successors(const World& w, const WorldState& s,
                                                             const JointAction& joint, double prior) {
    std::vector<int> cells;
    for (std::size_t k = 0; k < joint.size(); ++k) {
        const int c = s.positions[k];
        if (joint[k] == Action::Search && s.statuses[static_cast<std::size_t>(c)] == VictimStatus::Unknown) {
            bool seen = false;
            for (int x : cells) seen = seen || x == c;
            if (!seen) cells.push_back(c);
        }
    }
    std::vector<std::pair<double, WorldState>> out;
    for (unsigned mask = 0; mask < (1U << cells.size()); ++mask) {
        HiddenConfig h;
        h.victim_present.assign(s.statuses.size(), 0);
        double p = 1.0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const bool present = (mask >> i) & 1U;
            h.victim_present[static_cast<std::size_t>(cells[i])] = present ? 1 : 0;
            p *= present ? prior : 1.0 - prior;
        }
        if (p == 0.0) continue;
        out.emplace_back(p, w.step(s, h, joint));
    }
    return out;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double r = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) r += a[i] * b[i];
    return r;
}

/// Teammate policies as a function of the state: entry j for every agent j != agent.
using Others = std::function<std::map<AgentId, Dist>(const WorldState&)>;

/// Expectimax: Q_h(s,a) = sum over teammate joint actions of
/// P * [ r + discount * sum_s' p(s') V_{h-1}(s') ], V = soft-max weighted Q.
class Expectimax {
public:
    Expectimax(const World& w, AgentId agent, std::vector<double> weights, double beta, double discount,
               double prior, Others others)
        : w_(w), agent_(agent), weights_(std::move(weights)), beta_(beta), discount_(discount), prior_(prior),
          others_(std::move(others)) {}

    std::vector<double> q(const WorldState& s, int h) const {
        const auto legal = w_.legal_actions(s, agent_);
        const auto teammates = others_(s);
        // enumerate teammates' joint actions
        std::vector<std::pair<double, JointAction>> joints{
            {1.0, JointAction(static_cast<std::size_t>(w_.num_agents()), Action::Wait)}};
        for (const auto& [j, d] : teammates) {
            std::vector<std::pair<double, JointAction>> next;
            for (const auto& [p, ja] : joints)
                for (std::size_t a = 0; a < d.actions.size(); ++a) {
                    auto copy = ja;
                    copy[static_cast<std::size_t>(j)] = d.actions[a];
                    next.emplace_back(p * d.probs[a], copy);
                }
            joints = next;
        }
        std::vector<double> out;
        for (Action a : legal) {
            double total = 0.0;
            for (auto [p, ja] : joints) {
                ja[static_cast<std::size_t>(agent_)] = a;
                double r = dot(weights_, w_.feature_vector(s, ja, agent_));
                double cont = 0.0;
                if (h > 0)
                    for (const auto& [ps, next] : successors(w_, s, ja, prior_)) cont += ps * v(next, h - 1);
                total += p * (r + discount_ * cont);
            }
            out.push_back(total);
        }
        return out;
    }

    double v(const WorldState& s, int h) const {
        const auto key = s.key() + "/" + std::to_string(h);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        const auto qs = q(s, h);
        const auto d = softmax_dist(w_.legal_actions(s, agent_), qs, beta_);
        double r = 0.0;
        for (std::size_t i = 0; i < qs.size(); ++i) r += d.probs[i] * qs[i];
        memo_[key] = r;
        return r;
    }

private:
    const World& w_;
    AgentId agent_;
    std::vector<double> weights_;
    double beta_, discount_, prior_;
    Others others_;
    mutable std::map<std::string, double> memo_;
};

/// Level-0 policy of `agent` under a mental model: everyone else uniform.
inline Dist level0_policy(const World& w, const WorldState& s, AgentId agent, const MentalModel& m,
                          const PlannerConfig& cfg) {
    Others uniform = [&w, agent](const WorldState& st) {
        std::map<AgentId, Dist> out;
        for (AgentId j = 0; j < w.num_agents(); ++j)
            if (j != agent) out[j] = uniform_dist(w.legal_actions(st, j));
        return out;
    };
    Expectimax ex(w, agent, m.profile.weights, m.rationality, cfg.discount, cfg.presence_prior, uniform);
    return softmax_dist(w.legal_actions(s, agent), ex.q(s, m.horizon), m.rationality);
}

/// Level-1 Q of `agent`: teammates follow belief-weighted level-0 policies
/// (uniform when no belief is held). Level-0 policies are memoized per state.
inline std::vector<double> level1_q(const World& w, const WorldState& s, AgentId agent, const RewardProfile& theta,
                                    const TeamBeliefs& beliefs, const PlannerConfig& cfg) {
    auto memo = std::make_shared<std::map<std::string, std::map<AgentId, Dist>>>();
    Others others = [&w, agent, &beliefs, &cfg, memo](const WorldState& st) {
        const auto key = st.key();
        if (auto it = memo->find(key); it != memo->end()) return it->second;
        std::map<AgentId, Dist> out;
        for (AgentId j = 0; j < w.num_agents(); ++j) {
            if (j == agent) continue;
            auto it = beliefs.find(j);
            if (it == beliefs.end()) {
                out[j] = uniform_dist(w.legal_actions(st, j));
                continue;
            }
            Dist mix{w.legal_actions(st, j), std::vector<double>(w.legal_actions(st, j).size(), 0.0)};
            for (std::size_t m = 0; m < it->second.size(); ++m) {
                const auto d = level0_policy(w, st, j, it->second.support[m], cfg);
                for (std::size_t a = 0; a < d.probs.size(); ++a) mix.probs[a] += it->second.probabilities[m] * d.probs[a];
            }
            out[j] = mix;
        }
        (*memo)[key] = out;
        return out;
    };
    Expectimax ex(w, agent, theta.weights, cfg.rationality, cfg.discount, cfg.presence_prior, others);
    return ex.q(s, cfg.horizon);
}

/// Posterior after a whole action sequence: prior times the product of the
/// per-step likelihoods, normalized once at the end (log domain).
inline std::vector<double> product_posterior(const std::vector<double>& prior,
                                             const std::vector<std::vector<double>>& likelihoods_per_step) {
    std::vector<double> logp(prior.size());
    for (std::size_t m = 0; m < prior.size(); ++m) {
        logp[m] = std::log(prior[m]);
        for (const auto& step : likelihoods_per_step) logp[m] += std::log(step[m]);
    }
    double top = logp[0];
    for (double v : logp) top = std::max(top, v);
    double z = 0.0;
    for (double v : logp) z += std::exp(v - top);
    std::vector<double> out;
    for (double v : logp) out.push_back(std::exp(v - top) / z);
    return out;
}

/// Jensen-Shannon divergence written as entropy of the mixture minus mean entropy.
inline double jsd_entropy_form(const std::vector<double>& p, const std::vector<double>& q) {
    auto h = [](const std::vector<double>& x) {
        double r = 0.0;
        for (double v : x)
            if (v > 0.0) r -= v * std::log2(v);
        return r;
    };
    std::vector<double> m(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
    return h(m) - 0.5 * (h(p) + h(q));
}

/// Arbitrary well-formed state: random positions, statuses and beacon.
inline WorldState random_state(const World& w, SeedStream& rng) {
    const auto n = static_cast<std::uint64_t>(w.grid().cells());
    WorldState s;
    for (AgentId k = 0; k < w.num_agents(); ++k) s.positions.push_back(static_cast<int>(rng.below(n)));
    for (std::uint64_t c = 0; c < n; ++c) s.statuses.push_back(static_cast<VictimStatus>(rng.below(5)));
    if (rng.below(2) == 1) s.help_beacon = static_cast<int>(rng.below(n));
    return s;
}

}  // namespace oracle
