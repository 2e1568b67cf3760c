#include "mirl/serialization.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "mirl/errors.hpp"

namespace mirl {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    return in;
}

ordered_json joint_to_json(const JointAction& joint) {
    ordered_json a = ordered_json::array();
    for (auto x : joint) a.push_back(std::string(to_string(x)));
    return a;
}

JointAction joint_from_json(const json& j) {
    JointAction out;
    for (const auto& x : j) out.push_back(parse_action(x.get<std::string>()));
    return out;
}

ordered_json hidden_to_json(const HiddenConfig& h) {
    ordered_json a = ordered_json::array();
    for (auto v : h.victim_present) a.push_back(static_cast<int>(v));
    return a;
}

HiddenConfig hidden_from_json(const json& j) {
    HiddenConfig h;
    for (const auto& v : j) {
        const int x = v.get<int>();
        if (x != 0 && x != 1) throw ValidationError("hidden flags must be 0 or 1");
        h.victim_present.push_back(static_cast<std::uint8_t>(x));
    }
    return h;
}

/// Reads JSONL records, tracking line numbers for error messages.
class RecordReader {
public:
    explicit RecordReader(std::istream& in) : in_(in) {}

    bool next(json& record) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (line.empty()) continue;
            try {
                record = json::parse(line);
            } catch (const json::exception& e) {
                fail(std::string("malformed JSON: ") + e.what());
            }
            if (!record.is_object()) fail("record is not an object");
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ValidationError("line " + std::to_string(line_no_) + ": " + what);
    }

    int line() const { return line_no_; }

    /// Parses the header line and checks schema name and version.
    json header(const std::string& schema) {
        json h;
        if (!next(h)) throw ValidationError("line 1: missing header");
        if (!h.contains("schema") || h["schema"] != schema)
            fail("expected schema '" + schema + "'");
        if (!h.contains("schema_version") || !h["schema_version"].is_number_integer())
            fail("header lacks schema_version");
        const int v = h["schema_version"].get<int>();
        if (v != kSchemaVersion)
            throw SchemaVersionError("line " + std::to_string(line_no_) + ": schema_version " + std::to_string(v) +
                                     " is not supported (expected " + std::to_string(kSchemaVersion) + ")");
        return h;
    }

private:
    std::istream& in_;
    int line_no_ = 0;
};

std::string model_id(const MentalModel& m) {
    std::ostringstream os;
    os << m.profile.name << "@r" << format_double(m.rationality) << "h" << m.horizon;
    for (double w : m.profile.weights) os << ':' << format_double(w);
    return os.str();
}

}  // namespace

ordered_json to_json(const EnvConfig& c) {
    ordered_json j;
    j["width"] = c.grid.width;
    j["height"] = c.grid.height;
    j["n_victims"] = c.n_victims;
    ordered_json roster = ordered_json::array();
    for (auto r : c.roster) roster.push_back(std::string(to_string(r)));
    j["roster"] = roster;
    j["start_cells"] = c.start_cells;
    j["beacon_clears_on_meeting"] = c.beacon_clears_on_meeting;
    j["seed"] = c.seed;
    return j;
}

EnvConfig env_config_from_json(const json& j) {
    EnvConfig c;
    try {
        c.grid.width = j.value("width", c.grid.width);
        c.grid.height = j.value("height", c.grid.height);
        c.n_victims = j.value("n_victims", c.n_victims);
        if (j.contains("roster")) {
            c.roster.clear();
            for (const auto& r : j.at("roster")) c.roster.push_back(parse_role(r.get<std::string>()));
        }
        if (j.contains("start_cells")) c.start_cells = j.at("start_cells").get<std::vector<int>>();
        c.beacon_clears_on_meeting = j.value("beacon_clears_on_meeting", c.beacon_clears_on_meeting);
        c.seed = j.value("seed", c.seed);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid environment config: ") + e.what());
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("invalid environment config: ") + e.what());
    }
    return c;
}

EnvConfig load_env_config(const std::filesystem::path& path) {
    auto in = open_in(path);
    try {
        return env_config_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw ConfigError("malformed environment config " + path.string() + ": " + e.what());
    }
}

void save_env_config(const std::filesystem::path& path, const EnvConfig& config) {
    auto out = open_out(path);
    out << to_json(config).dump(2) << '\n';
}

ordered_json to_json(const WorldState& s) {
    ordered_json j;
    j["positions"] = s.positions;
    ordered_json st = ordered_json::array();
    for (auto v : s.statuses) st.push_back(std::string(to_string(v)));
    j["statuses"] = st;
    j["beacon"] = s.help_beacon ? ordered_json(*s.help_beacon) : ordered_json(nullptr);
    j["time"] = s.time;
    return j;
}

WorldState state_from_json(const json& j) {
    WorldState s;
    s.positions = j.at("positions").get<std::vector<int>>();
    for (const auto& v : j.at("statuses")) s.statuses.push_back(parse_status(v.get<std::string>()));
    if (!j.at("beacon").is_null()) s.help_beacon = j.at("beacon").get<int>();
    s.time = j.at("time").get<int>();
    return s;
}

void write_trajectories(std::ostream& out, const EnvConfig& env, std::span<const Trajectory> trajectories) {
    ordered_json header;
    header["schema"] = "mirl.trajectories";
    header["schema_version"] = kSchemaVersion;
    header["env"] = to_json(env);
    header["count"] = trajectories.size();
    out << header.dump() << '\n';
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        const auto& t = trajectories[i];
        ordered_json rec;
        rec["type"] = "trajectory";
        rec["index"] = i;
        rec["seed"] = t.seed;
        rec["hidden"] = hidden_to_json(t.hidden);
        rec["length"] = t.steps.size();
        out << rec.dump() << '\n';
        for (std::size_t j = 0; j < t.steps.size(); ++j) {
            ordered_json step;
            step["type"] = "step";
            step["trajectory"] = i;
            step["t"] = j;
            const auto st = to_json(t.steps[j].state);
            for (auto& [k, v] : st.items()) step[k] = v;
            step["joint"] = joint_to_json(t.steps[j].joint);
            out << step.dump() << '\n';
        }
    }
}

void write_trajectories(const std::filesystem::path& path, const EnvConfig& env,
                        std::span<const Trajectory> trajectories) {
    auto out = open_out(path);
    write_trajectories(out, env, trajectories);
}

TrajectoryFile read_trajectories(std::istream& in) {
    RecordReader reader(in);
    TrajectoryFile file;
    json header = reader.header("mirl.trajectories");
    try {
        file.env = env_config_from_json(header.at("env"));
    } catch (const std::exception& e) {
        reader.fail(e.what());
    }
    json rec;
    std::size_t expected_steps = 0;
    while (reader.next(rec)) {
        try {
            const auto type = rec.at("type").get<std::string>();
            if (type == "trajectory") {
                if (!file.trajectories.empty() && file.trajectories.back().steps.size() != expected_steps)
                    reader.fail("previous trajectory is truncated");
                if (rec.at("index").get<std::size_t>() != file.trajectories.size())
                    reader.fail("trajectory index out of sequence");
                Trajectory t;
                t.seed = rec.at("seed").get<std::uint64_t>();
                t.hidden = hidden_from_json(rec.at("hidden"));
                expected_steps = rec.at("length").get<std::size_t>();
                file.trajectories.push_back(std::move(t));
            } else if (type == "step") {
                if (file.trajectories.empty()) reader.fail("step before any trajectory record");
                auto& t = file.trajectories.back();
                if (rec.at("trajectory").get<std::size_t>() != file.trajectories.size() - 1 ||
                    rec.at("t").get<std::size_t>() != t.steps.size())
                    reader.fail("step out of sequence");
                t.steps.push_back({state_from_json(rec), joint_from_json(rec.at("joint"))});
            } else {
                reader.fail("unknown record type '" + type + "'");
            }
        } catch (const json::exception& e) {
            reader.fail(e.what());
        } catch (const SchemaVersionError&) {
            throw;
        } catch (const ValidationError& e) {
            const std::string what = e.what();
            if (what.rfind("line ", 0) == 0) throw;
            reader.fail(what);
        }
    }
    if (!file.trajectories.empty() && file.trajectories.back().steps.size() != expected_steps)
        throw ValidationError("line " + std::to_string(reader.line()) + ": last trajectory is truncated");
    return file;
}

TrajectoryFile read_trajectories(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_trajectories(in);
}

namespace {

ordered_json beliefs_to_json(const TeamBeliefs& beliefs, std::map<std::string, const MentalModel*>& registry,
                             bool register_only) {
    ordered_json arr = ordered_json::array();
    for (const auto& [teammate, b] : beliefs) {
        ordered_json e;
        e["teammate"] = teammate;
        ordered_json models = ordered_json::array();
        for (const auto& m : b.support) {
            auto id = model_id(m);
            registry.emplace(id, &m);
            models.push_back(id);
        }
        if (register_only) continue;
        e["models"] = models;
        e["probabilities"] = b.probabilities;
        arr.push_back(std::move(e));
    }
    return arr;
}

TeamBeliefs beliefs_from_json(const json& arr, const std::map<std::string, MentalModel>& models) {
    TeamBeliefs out;
    for (const auto& e : arr) {
        ModelBelief b;
        for (const auto& id : e.at("models")) {
            auto it = models.find(id.get<std::string>());
            if (it == models.end()) throw ValidationError("unknown model id '" + id.get<std::string>() + "'");
            b.support.push_back(it->second);
        }
        b.probabilities = e.at("probabilities").get<std::vector<double>>();
        if (b.probabilities.size() != b.support.size()) throw ValidationError("belief length mismatch");
        out.emplace(e.at("teammate").get<AgentId>(), std::move(b));
    }
    return out;
}

}  // namespace

void write_augmented(std::ostream& out, std::span<const AugmentedTrajectory> augmented) {
    std::map<std::string, const MentalModel*> registry;
    for (const auto& a : augmented) {
        for (const auto& st : a.steps) beliefs_to_json(st.beliefs, registry, true);
        beliefs_to_json(a.final_beliefs, registry, true);
    }
    ordered_json header;
    header["schema"] = "mirl.augmented";
    header["schema_version"] = kSchemaVersion;
    header["count"] = augmented.size();
    ordered_json models = ordered_json::array();
    for (const auto& [id, m] : registry) {
        ordered_json e;
        e["id"] = id;
        e["profile"] = m->profile.name;
        e["catalog"] = m->profile.catalog;
        e["weights"] = m->profile.weights;
        e["rationality"] = m->rationality;
        e["horizon"] = m->horizon;
        models.push_back(std::move(e));
    }
    header["models"] = models;
    out << header.dump() << '\n';

    for (std::size_t i = 0; i < augmented.size(); ++i) {
        const auto& a = augmented[i];
        ordered_json rec;
        rec["type"] = "trajectory";
        rec["index"] = i;
        rec["observer"] = a.observer;
        rec["seed"] = a.seed;
        rec["hidden"] = hidden_to_json(a.hidden);
        rec["length"] = a.steps.size();
        out << rec.dump() << '\n';
        for (std::size_t j = 0; j < a.steps.size(); ++j) {
            ordered_json step;
            step["type"] = "step";
            step["trajectory"] = i;
            step["t"] = j;
            const auto st = to_json(a.steps[j].state);
            for (auto& [k, v] : st.items()) step[k] = v;
            step["joint"] = joint_to_json(a.steps[j].joint);
            step["beliefs"] = beliefs_to_json(a.steps[j].beliefs, registry, false);
            out << step.dump() << '\n';
        }
        ordered_json fin;
        fin["type"] = "final";
        fin["trajectory"] = i;
        fin["beliefs"] = beliefs_to_json(a.final_beliefs, registry, false);
        out << fin.dump() << '\n';
    }
}

void write_augmented(const std::filesystem::path& path, std::span<const AugmentedTrajectory> augmented) {
    auto out = open_out(path);
    write_augmented(out, augmented);
}

std::vector<AugmentedTrajectory> read_augmented(std::istream& in) {
    RecordReader reader(in);
    json header = reader.header("mirl.augmented");
    std::map<std::string, MentalModel> models;
    try {
        for (const auto& e : header.at("models")) {
            MentalModel m;
            m.profile.name = e.at("profile").get<std::string>();
            m.profile.catalog = e.at("catalog").get<std::vector<std::string>>();
            m.profile.weights = e.at("weights").get<std::vector<double>>();
            m.rationality = e.at("rationality").get<double>();
            m.horizon = e.at("horizon").get<int>();
            models.emplace(e.at("id").get<std::string>(), std::move(m));
        }
    } catch (const json::exception& e) {
        reader.fail(e.what());
    }

    std::vector<AugmentedTrajectory> out;
    std::size_t expected_steps = 0;
    bool finalized = true;
    json rec;
    while (reader.next(rec)) {
        try {
            const auto type = rec.at("type").get<std::string>();
            if (type == "trajectory") {
                if (!finalized) reader.fail("previous trajectory lacks its final record");
                if (rec.at("index").get<std::size_t>() != out.size()) reader.fail("trajectory index out of sequence");
                AugmentedTrajectory a;
                a.observer = rec.at("observer").get<AgentId>();
                a.seed = rec.at("seed").get<std::uint64_t>();
                a.hidden = hidden_from_json(rec.at("hidden"));
                expected_steps = rec.at("length").get<std::size_t>();
                out.push_back(std::move(a));
                finalized = false;
            } else if (type == "step") {
                if (out.empty() || finalized) reader.fail("step outside a trajectory");
                auto& a = out.back();
                if (rec.at("trajectory").get<std::size_t>() != out.size() - 1 ||
                    rec.at("t").get<std::size_t>() != a.steps.size())
                    reader.fail("step out of sequence");
                a.steps.push_back(
                    {state_from_json(rec), joint_from_json(rec.at("joint")), beliefs_from_json(rec.at("beliefs"), models)});
            } else if (type == "final") {
                if (out.empty() || finalized) reader.fail("final record outside a trajectory");
                if (out.back().steps.size() != expected_steps) reader.fail("trajectory is truncated");
                out.back().final_beliefs = beliefs_from_json(rec.at("beliefs"), models);
                finalized = true;
            } else {
                reader.fail("unknown record type '" + type + "'");
            }
        } catch (const json::exception& e) {
            reader.fail(e.what());
        } catch (const SchemaVersionError&) {
            throw;
        } catch (const ValidationError& e) {
            const std::string what = e.what();
            if (what.rfind("line ", 0) == 0) throw;
            reader.fail(what);
        }
    }
    if (!finalized) throw ValidationError("line " + std::to_string(reader.line()) + ": last trajectory is truncated");
    return out;
}

std::vector<AugmentedTrajectory> read_augmented(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_augmented(in);
}

void write_belief_curves(std::ostream& out, std::span<const AugmentedTrajectory> augmented) {
    out << "observer,teammate,timestep,model,mean_probability,std_dev\n";
    if (augmented.empty()) return;
    // group by observer, keep first-seen order
    std::map<AgentId, std::vector<const AugmentedTrajectory*>> by_observer;
    for (const auto& a : augmented) by_observer[a.observer].push_back(&a);

    for (const auto& [observer, trajs] : by_observer) {
        std::size_t horizon = 0;
        for (auto* a : trajs) horizon = std::max(horizon, a->steps.size());
        const TeamBeliefs& reference = trajs.front()->final_beliefs;
        for (const auto& [teammate, ref_belief] : reference) {
            for (std::size_t t = 0; t <= horizon; ++t) {
                for (std::size_t m = 0; m < ref_belief.size(); ++m) {
                    double sum = 0.0, sum_sq = 0.0;
                    std::size_t n = 0;
                    for (auto* a : trajs) {
                        // beliefs after t observed actions; trajectories that ended keep their final belief
                        const TeamBeliefs& b = t < a->steps.size() ? a->steps[t].beliefs : a->final_beliefs;
                        const double p = b.at(teammate).probabilities.at(m);
                        sum += p;
                        sum_sq += p * p;
                        ++n;
                    }
                    const double mean = sum / static_cast<double>(n);
                    const double var = std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);
                    out << observer << ',' << teammate << ',' << t << ',' << ref_belief.support[m].profile.name << ','
                        << format_double(mean) << ',' << format_double(std::sqrt(var)) << '\n';
                }
            }
        }
    }
}

void write_irl_trace(std::ostream& out, const IrlTrace& trace) {
    out << "epoch,feature,weight,gradient_norm,lr,phi_est,delta_inf,delta_over_lr\n";
    for (const auto& rec : trace.epochs)
        for (std::size_t i = 0; i < trace.catalog.size(); ++i)
            out << rec.epoch << ',' << trace.catalog[i] << ',' << format_double(rec.theta[i]) << ','
                << format_double(rec.gradient_norm) << ',' << format_double(rec.learning_rate) << ','
                << format_double(rec.phi_est[i]) << ',' << format_double(rec.delta_inf) << ','
                << format_double(rec.delta_over_lr) << '\n';
}

void write_similarity_table(std::ostream& out, const std::vector<std::string>& catalog,
                            std::span<const SimilarityColumn> columns) {
    out << "feature";
    for (const auto& c : columns) out << ',' << c.name;
    out << '\n';
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        out << catalog[i];
        for (const auto& c : columns) out << ',' << format_double(c.counts.at(i));
        out << '\n';
    }
    out << "FC Diff";
    for (const auto& c : columns) out << ',' << format_double(c.fc_diff);
    out << "\nPi Div";
    for (const auto& c : columns) out << ',' << format_double(c.pi_div);
    out << '\n';
}

}  // namespace mirl
