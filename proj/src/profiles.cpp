#include "mirl/profiles.hpp"

#include <array>
#include <fstream>

#include "json.hpp"
#include "mirl/errors.hpp"

namespace mirl {

namespace {
constexpr std::array<std::string_view, 5> kKindNames{"gt", "op", "rd", "tk", "sc"};
}

std::string_view to_string(ProfileKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

ProfileKind parse_profile_kind(std::string_view s) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i)
        if (kKindNames[i] == s) return static_cast<ProfileKind>(i);
    throw ConfigError("unknown profile kind '" + std::string(s) + "'");
}

const std::vector<double>& ground_truth_weights(Role role) {
    // Dist2Vic, Search, Triage, Evacuate, Wait, Call
    static const std::vector<double> medic{0.06, 0.06, 0.19, 0.63, 0.03, 0.03};
    // Dist2Help, Search, Evacuate
    static const std::vector<double> explorer{0.25, 0.25, 0.50};
    return role == Role::Medic ? medic : explorer;
}

const std::vector<bool>& task_feature_mask(Role role) {
    static const std::vector<bool> medic{true, false, true, true, false, false};
    static const std::vector<bool> explorer{false, true, false};
    return role == Role::Medic ? medic : explorer;
}

std::string profile_name(ProfileKind kind, Role role) {
    return std::string(to_string(kind)) + "_" + std::string(to_string(role));
}

RewardProfile zero_profile(Role role, std::string name) {
    const auto& cat = World::catalog(role);
    return {std::move(name), cat, std::vector<double>(cat.size(), 0.0)};
}

RewardProfile make_profile(ProfileKind kind, Role role) {
    RewardProfile p = zero_profile(role, profile_name(kind, role));
    const auto& gt = ground_truth_weights(role);
    const auto& task = task_feature_mask(role);
    for (std::size_t i = 0; i < gt.size(); ++i) {
        switch (kind) {
            case ProfileKind::Gt: p.weights[i] = gt[i]; break;
            case ProfileKind::Op: p.weights[i] = -gt[i]; break;
            case ProfileKind::Rd: break;
            case ProfileKind::Tk: p.weights[i] = task[i] ? gt[i] : 0.0; break;
            case ProfileKind::Sc: p.weights[i] = task[i] ? 0.0 : gt[i]; break;
        }
    }
    return p;
}

ProfileCatalog bundled_profiles() {
    ProfileCatalog out;
    for (Role role : {Role::Medic, Role::Explorer})
        for (auto kind : {ProfileKind::Gt, ProfileKind::Op, ProfileKind::Rd, ProfileKind::Tk, ProfileKind::Sc}) {
            auto p = make_profile(kind, role);
            out.emplace(p.name, std::move(p));
        }
    return out;
}

ProfileCatalog load_profiles(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open profile file " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed profile file " + path.string() + ": " + e.what());
    }
    ProfileCatalog out;
    try {
        for (const auto& entry : doc.at("profiles")) {
            RewardProfile p;
            p.name = entry.at("name").get<std::string>();
            for (const auto& f : entry.at("features")) {
                p.catalog.push_back(f.at("name").get<std::string>());
                p.weights.push_back(f.at("weight").get<double>());
            }
            out.emplace(p.name, std::move(p));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid profile file " + path.string() + ": " + e.what());
    }
    return out;
}

void save_profiles(const std::filesystem::path& path, const ProfileCatalog& profiles) {
    nlohmann::json doc;
    doc["schema_version"] = 1;
    doc["profiles"] = nlohmann::json::array();
    for (const auto& [name, p] : profiles) {
        nlohmann::json entry;
        entry["name"] = name;
        entry["features"] = nlohmann::json::array();
        for (std::size_t i = 0; i < p.catalog.size(); ++i)
            entry["features"].push_back({{"name", p.catalog[i]}, {"weight", p.weights[i]}});
        doc["profiles"].push_back(std::move(entry));
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write profile file " + path.string());
    out << doc.dump(2) << '\n';
}

const RewardProfile& find_profile(const ProfileCatalog& catalog, const std::string& name) {
    auto it = catalog.find(name);
    if (it == catalog.end()) throw ConfigError("unknown profile '" + name + "'");
    return it->second;
}

}  // namespace mirl
