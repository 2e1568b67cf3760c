#pragma once

// File formats. Record files are line-delimited JSON whose first line is a
// header carrying "schema" and "schema_version"; anything chartable is CSV.
//
//   trajectories   header {schema:"mirl.trajectories", schema_version, env}
//                  {type:"trajectory", index, seed, hidden:[0/1...], length}
//                  {type:"step", trajectory, t, positions, statuses, beacon, time, joint}
//   augmented      header {schema:"mirl.augmented", schema_version, observer, models:[...]}
//                  {type:"trajectory", index, seed, hidden, length}
//                  {type:"step", trajectory, t, positions, statuses, beacon, time, joint, beliefs}
//                  {type:"final", trajectory, beliefs}
//   beliefs        [{teammate, models:[name...], probabilities:[...]}]

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "mirl/irl_trainer.hpp"
#include "mirl/metrics.hpp"
#include "mirl/model_inference.hpp"
#include "mirl/sar_env.hpp"

namespace mirl {

inline constexpr int kSchemaVersion = 1;

nlohmann::ordered_json to_json(const EnvConfig& config);
EnvConfig env_config_from_json(const nlohmann::json& j);
EnvConfig load_env_config(const std::filesystem::path& path);
void save_env_config(const std::filesystem::path& path, const EnvConfig& config);

nlohmann::ordered_json to_json(const WorldState& state);
WorldState state_from_json(const nlohmann::json& j);

void write_trajectories(std::ostream& out, const EnvConfig& env, std::span<const Trajectory> trajectories);
void write_trajectories(const std::filesystem::path& path, const EnvConfig& env,
                        std::span<const Trajectory> trajectories);

struct TrajectoryFile {
    EnvConfig env;
    std::vector<Trajectory> trajectories;
};

/// Throws SchemaVersionError on a version mismatch and ValidationError
/// naming the line number for any malformed record.
TrajectoryFile read_trajectories(std::istream& in);
TrajectoryFile read_trajectories(const std::filesystem::path& path);

void write_augmented(std::ostream& out, std::span<const AugmentedTrajectory> augmented);
void write_augmented(const std::filesystem::path& path, std::span<const AugmentedTrajectory> augmented);
std::vector<AugmentedTrajectory> read_augmented(std::istream& in);
std::vector<AugmentedTrajectory> read_augmented(const std::filesystem::path& path);

/// Mean and standard deviation of each model's probability per timestep
/// across trajectories (timestep = number of actions observed so far).
/// Columns: observer,teammate,timestep,model,mean_probability,std_dev
void write_belief_curves(std::ostream& out, std::span<const AugmentedTrajectory> augmented);

/// Columns: epoch,feature,weight,gradient_norm,lr,phi_est,delta_inf,delta_over_lr
void write_irl_trace(std::ostream& out, const IrlTrace& trace);

/// One column of a similarity table (counts, FC Diff, Pi Div).
struct SimilarityColumn {
    std::string name;
    std::vector<double> counts;
    double fc_diff = 0.0;
    double pi_div = 0.0;
};

/// Feature rows followed by "FC Diff" and "Pi Div" rows; one column per entry.
void write_similarity_table(std::ostream& out, const std::vector<std::string>& catalog,
                            std::span<const SimilarityColumn> columns);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace mirl
