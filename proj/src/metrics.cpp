#include "mirl/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "mirl/errors.hpp"

namespace mirl {

double fc_diff(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("fc_diff: feature count vectors differ in length");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    return d;
}

double fc_diff(const FeatureCounts& a, const FeatureCounts& b) {
    if (a.catalog != b.catalog) throw ShapeError("fc_diff: feature catalogs differ");
    return fc_diff(a.values, b.values);
}

double jsd(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw ShapeError("jsd: distributions differ in length");
    auto term = [](double x, double m) { return x > 0.0 ? x * std::log2(x / m) : 0.0; };
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        d += 0.5 * (term(p[i], m) + term(q[i], m));
    }
    return std::clamp(d, 0.0, 1.0);
}

double jsd(const PolicyDistribution& p, const PolicyDistribution& q) {
    if (p.actions != q.actions) throw ShapeError("jsd: policies have different supports");
    return jsd(p.probabilities, q.probabilities);
}

double policy_divergence(const Planner& planner, const RewardProfile& theta_a, const RewardProfile& theta_b,
                         std::span<const AugmentedTrajectory> trajectories, AgentId agent,
                         const PlannerConfig& config) {
    std::vector<double> values;
    for (const auto& traj : trajectories)
        for (const auto& st : traj.steps) {
            const auto pa = planner.softmax_policy(st.state, agent, theta_a, st.beliefs, config);
            const auto pb = planner.softmax_policy(st.state, agent, theta_b, st.beliefs, config);
            values.push_back(jsd(pa, pb));
        }
    if (values.empty()) return 0.0;
    // summing in sorted order makes the mean independent of trajectory order
    std::sort(values.begin(), values.end());
    double total = 0.0;
    for (double v : values) total += v;
    return total / static_cast<double>(values.size());
}

SimilarityReport similarity(const FeatureCounts& learned, const FeatureCounts& demo, double pi_div) {
    return {learned.catalog, learned.values, demo.values, fc_diff(learned, demo), pi_div};
}

}  // namespace mirl
