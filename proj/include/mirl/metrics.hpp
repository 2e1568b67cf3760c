#pragma once

// Behavior-similarity metrics between learned and demonstrated policies.

#include <span>
#include <string>
#include <vector>

#include "mirl/irl_trainer.hpp"
#include "mirl/model_inference.hpp"
#include "mirl/tom_planner.hpp"

namespace mirl {

struct SimilarityReport {
    std::vector<std::string> catalog;
    std::vector<double> learned_counts;
    std::vector<double> demo_counts;
    double fc_diff = 0.0;
    double pi_div = 0.0;
};

/// L1 distance between aligned feature counts.
double fc_diff(const FeatureCounts& a, const FeatureCounts& b);
double fc_diff(std::span<const double> a, std::span<const double> b);

/// Base-2 Jensen-Shannon divergence; 0 iff p = q, at most 1.
double jsd(const PolicyDistribution& p, const PolicyDistribution& q);
double jsd(std::span<const double> p, std::span<const double> q);

/// Mean JSD between the two soft-max policies at every visited state, with
/// teammate beliefs taken from each step's augmentation.
double policy_divergence(const Planner& planner, const RewardProfile& theta_a, const RewardProfile& theta_b,
                         std::span<const AugmentedTrajectory> trajectories, AgentId agent,
                         const PlannerConfig& config);

SimilarityReport similarity(const FeatureCounts& learned, const FeatureCounts& demo, double pi_div);

}  // namespace mirl
