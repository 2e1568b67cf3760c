#pragma once

// Ground-truth and baseline reward profiles for the two roles, plus the
// profile catalog file format.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mirl/sar_env.hpp"

namespace mirl {

/// Baseline profile kinds: ground truth, opposite goals, no goals,
/// task-only and social-only.
enum class ProfileKind { Gt, Op, Rd, Tk, Sc };

std::string_view to_string(ProfileKind k);
ProfileKind parse_profile_kind(std::string_view s);

/// Ground-truth weights for a role, aligned with World::catalog(role).
const std::vector<double>& ground_truth_weights(Role role);

/// true for role-related task features, false for social/helping ones.
const std::vector<bool>& task_feature_mask(Role role);

/// Canonical name, e.g. "gt_medic".
std::string profile_name(ProfileKind kind, Role role);

RewardProfile make_profile(ProfileKind kind, Role role);
RewardProfile zero_profile(Role role, std::string name);

/// Name-indexed set of profiles.
using ProfileCatalog = std::map<std::string, RewardProfile>;

/// Every kind for both roles (10 profiles).
ProfileCatalog bundled_profiles();

ProfileCatalog load_profiles(const std::filesystem::path& path);
void save_profiles(const std::filesystem::path& path, const ProfileCatalog& profiles);

/// Resolve a profile by name; throws ConfigError naming the missing entry.
const RewardProfile& find_profile(const ProfileCatalog& catalog, const std::string& name);

}  // namespace mirl
