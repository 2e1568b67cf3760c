#include <algorithm>

#include "doctest.h"
#include "mirl/errors.hpp"
#include "mirl/profiles.hpp"
#include "mirl/sar_env.hpp"

using namespace mirl;

namespace {

World default_world() { return World(EnvConfig{}); }

WorldState blank(const World& w, std::vector<int> positions) {
    WorldState s;
    s.positions = std::move(positions);
    s.statuses.assign(static_cast<std::size_t>(w.grid().cells()), VictimStatus::Unknown);
    return s;
}

HiddenConfig victims(const World& w, std::vector<int> cells) {
    HiddenConfig h;
    h.victim_present.assign(static_cast<std::size_t>(w.grid().cells()), 0);
    for (int c : cells) h.victim_present[static_cast<std::size_t>(c)] = 1;
    return h;
}

bool contains(const std::vector<Action>& v, Action a) { return std::find(v.begin(), v.end(), a) != v.end(); }

}  // namespace

TEST_CASE("init_world with no victims leaves everything unknown") {
    EnvConfig cfg;
    cfg.grid = {2, 2};
    cfg.n_victims = 0;
    World w(cfg);
    auto [s, h] = w.init_world(123);
    for (auto st : s.statuses) CHECK(st == VictimStatus::Unknown);
    for (auto f : h.victim_present) CHECK(f == 0);
    CHECK_FALSE(s.help_beacon.has_value());
    CHECK(s.time == 0);
}

TEST_CASE("init_world is deterministic and places the requested count") {
    World w = default_world();
    auto [s1, h1] = w.init_world(3, 7);
    auto [s2, h2] = w.init_world(3, 7);
    CHECK(h1 == h2);
    CHECK(s1 == s2);
    CHECK(std::count(h1.victim_present.begin(), h1.victim_present.end(), 1) == 3);
    CHECK(s1.positions == std::vector<int>{0, 8});

    int differing = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
        if (w.init_world(3, seed).second != h1) ++differing;
    CHECK(differing > 0);
}

TEST_CASE("invalid configurations are rejected") {
    EnvConfig one;
    one.grid = {1, 1};
    CHECK_THROWS_AS(World{one}, ConfigError);

    EnvConfig many;
    many.grid = {2, 2};
    many.n_victims = 5;
    CHECK_THROWS_AS(World{many}, ConfigError);

    World w = default_world();
    CHECK_THROWS_AS(w.init_world(10, 1), ConfigError);
    CHECK_THROWS_AS(w.init_world(-1, 1), ConfigError);
}

TEST_CASE("legal actions by role and position") {
    World w = default_world();
    auto s = blank(w, {4, 4});
    CHECK(w.legal_actions(s, 0).size() == 9);

    for (int cell = 0; cell < 9; ++cell) {
        auto st = blank(w, {0, cell});
        const auto& ex = w.legal_actions(st, 1);
        CHECK_FALSE(contains(ex, Action::Wait));
        CHECK_FALSE(contains(ex, Action::Triage));
        CHECK_FALSE(contains(ex, Action::Call));
        CHECK(contains(ex, Action::Search));
        CHECK(contains(ex, Action::Evacuate));
    }

    auto corner = blank(w, {0, 0});
    for (AgentId k : {0, 1}) {
        const auto& a = w.legal_actions(corner, k);
        CHECK_FALSE(contains(a, Action::Up));
        CHECK_FALSE(contains(a, Action::Left));
        CHECK(contains(a, Action::Down));
        CHECK(contains(a, Action::Right));
    }
    CHECK_THROWS_AS(w.legal_actions(s, 2), std::out_of_range);
    CHECK_THROWS_AS(w.legal_actions(s, -1), std::out_of_range);
}

TEST_CASE("search reveals presence, moving alone does not") {
    World w = default_world();
    auto h = victims(w, {1, 5, 7});
    auto s = blank(w, {1, 8});
    auto n = w.step(s, h, {Action::Search, Action::Search});
    CHECK(n.statuses[1] == VictimStatus::Found);
    CHECK(n.statuses[8] == VictimStatus::Empty);
    CHECK(n.time == 1);

    auto moved = w.step(s, h, {Action::Right, Action::Up});
    CHECK(moved.positions == std::vector<int>{2, 5});
    CHECK(moved.statuses[5] == VictimStatus::Unknown);
}

TEST_CASE("triage then joint evacuation") {
    World w = default_world();
    auto h = victims(w, {4});
    auto s = blank(w, {4, 4});
    s.statuses[4] = VictimStatus::Found;
    auto ready = w.step(s, h, {Action::Triage, Action::Search});
    CHECK(ready.statuses[4] == VictimStatus::Ready);

    auto alone = w.step(ready, h, {Action::Evacuate, Action::Left});
    CHECK(alone.statuses[4] == VictimStatus::Ready);

    auto clear = w.step(ready, h, {Action::Evacuate, Action::Evacuate});
    CHECK(clear.statuses[4] == VictimStatus::Clear);

    auto apart = ready;
    apart.positions = {4, 5};
    auto still = w.step(apart, h, {Action::Evacuate, Action::Evacuate});
    CHECK(still.statuses[4] == VictimStatus::Ready);
}

TEST_CASE("help beacon follows calls and clears with the victim") {
    World w = default_world();
    auto h = victims(w, {4});
    auto s = blank(w, {4, 0});
    s.statuses[4] = VictimStatus::Ready;
    auto called = w.step(s, h, {Action::Call, Action::Right});
    REQUIRE(called.help_beacon.has_value());
    CHECK(*called.help_beacon == 4);

    // meeting on the beacon keeps it by default
    auto st = called;
    st.positions = {4, 4};
    auto met = w.step(st, h, {Action::Wait, Action::Search});
    CHECK(met.help_beacon == std::optional<int>(4));

    auto done = w.step(st, h, {Action::Evacuate, Action::Evacuate});
    CHECK(done.statuses[4] == VictimStatus::Clear);
    CHECK_FALSE(done.help_beacon.has_value());

    EnvConfig cfg;
    cfg.beacon_clears_on_meeting = true;
    World w2(cfg);
    auto met2 = w2.step(st, h, {Action::Wait, Action::Search});
    CHECK_FALSE(met2.help_beacon.has_value());
}

TEST_CASE("illegal and malformed joint actions") {
    World w = default_world();
    auto h = victims(w, {});
    auto s = blank(w, {0, 8});
    CHECK_THROWS_AS(w.step(s, h, {Action::Up, Action::Search}), ContractViolation);
    CHECK_THROWS_AS(w.step(s, h, {Action::Wait, Action::Wait}), ContractViolation);
    CHECK_THROWS_AS(w.step(s, h, {Action::Wait}), ContractViolation);
    HiddenConfig bad{{0, 1}};
    CHECK_THROWS_AS(w.step(s, bad, {Action::Wait, Action::Search}), ShapeError);
}

TEST_CASE("expand branches each searched unknown cell") {
    World w = default_world();
    auto s = blank(w, {1, 8});
    auto out = w.expand(s, {Action::Search, Action::Search}, 0.3);
    REQUIRE(out.size() == 4);
    double total = 0.0;
    for (auto& [p, n] : out) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w.expand(s, {Action::Search, Action::Search}, 0.0).size() == 1);

    auto same = blank(w, {4, 4});
    CHECK(w.expand(same, {Action::Search, Action::Search}, 0.5).size() == 2);
    CHECK(w.expand(same, {Action::Wait, Action::Up}, 0.5).size() == 1);
}

TEST_CASE("medic features") {
    World w = default_world();
    auto s = blank(w, {4, 4});
    auto phi = w.feature_vector(s, {Action::Wait, Action::Search}, 0);
    CHECK(phi[0] == 0.0);
    CHECK(phi[4] == 1.0);

    s.statuses[5] = VictimStatus::Found;
    phi = w.feature_vector(s, {Action::Wait, Action::Search}, 0);
    CHECK(phi[0] == doctest::Approx(0.75));

    s.statuses[4] = VictimStatus::Ready;
    phi = w.feature_vector(s, {Action::Evacuate, Action::Evacuate}, 0);
    CHECK(phi[3] == 1.0);
    const auto gt = make_profile(ProfileKind::Gt, Role::Medic);
    CHECK(w.reward(s, {Action::Evacuate, Action::Evacuate}, 0, gt) ==
          doctest::Approx(0.63 + 0.06 * 0.75));

    phi = w.feature_vector(s, {Action::Call, Action::Search}, 0);
    CHECK(phi[5] == 1.0);
    s.statuses[4] = VictimStatus::Found;
    phi = w.feature_vector(s, {Action::Call, Action::Search}, 0);
    CHECK(phi[5] == 0.0);
    phi = w.feature_vector(s, {Action::Triage, Action::Search}, 0);
    CHECK(phi[2] == 1.0);
}

TEST_CASE("explorer features") {
    World w = default_world();
    auto s = blank(w, {0, 8});
    auto phi = w.feature_vector(s, {Action::Wait, Action::Search}, 1);
    CHECK(phi == FeatureVector{0.0, 1.0, 0.0});
    s.help_beacon = 0;
    phi = w.feature_vector(s, {Action::Wait, Action::Up}, 1);
    CHECK(phi[0] == doctest::Approx(0.0));
    s.help_beacon = 7;
    phi = w.feature_vector(s, {Action::Wait, Action::Up}, 1);
    CHECK(phi[0] == doctest::Approx(0.75));
}

TEST_CASE("rewards are linear in the weights") {
    World w = default_world();
    auto s = blank(w, {4, 4});
    s.statuses[4] = VictimStatus::Found;
    const JointAction joint{Action::Triage, Action::Search};
    CHECK(w.reward(s, joint, 0, zero_profile(Role::Medic, "zero")) == 0.0);

    auto triage_only = blank(w, {4, 4});
    triage_only.statuses[4] = VictimStatus::Found;
    // no other Found cell is needed: Dist2Vic here is 1 (the agent's own cell)
    const auto gt = make_profile(ProfileKind::Gt, Role::Medic);
    CHECK(w.reward(triage_only, joint, 0, gt) == doctest::Approx(0.19 + 0.06));

    const auto op = make_profile(ProfileKind::Op, Role::Medic);
    for (AgentId k : {0, 1}) {
        const auto g = make_profile(ProfileKind::Gt, w.role(k));
        const auto o = make_profile(ProfileKind::Op, w.role(k));
        CHECK(w.reward(s, joint, k, o) == -w.reward(s, joint, k, g));
    }
    CHECK_THROWS_AS(w.reward(s, joint, 1, op), ShapeError);
}

TEST_CASE("state keys distinguish states and ignore time") {
    World w = default_world();
    auto a = blank(w, {0, 8});
    auto b = a;
    b.time = 5;
    CHECK(a.key() == b.key());
    b.help_beacon = 0;
    CHECK(a.key() != b.key());
    auto c = a;
    c.statuses[3] = VictimStatus::Found;
    CHECK(a.key() != c.key());
    auto d = a;
    d.positions = {8, 0};
    CHECK(a.key() != d.key());
}

TEST_CASE("validate catches malformed states") {
    World w = default_world();
    auto s = blank(w, {0, 8});
    CHECK_NOTHROW(w.validate(s));
    auto bad = s;
    bad.positions = {0};
    CHECK_THROWS_AS(w.validate(bad), ValidationError);
    bad = s;
    bad.positions[1] = 9;
    CHECK_THROWS_AS(w.validate(bad), ValidationError);
    bad = s;
    bad.help_beacon = 12;
    CHECK_THROWS_AS(w.validate(bad), ValidationError);
}

TEST_CASE("string conversions round-trip") {
    for (int i = 0; i < kNumActions; ++i) {
        auto a = static_cast<Action>(i);
        CHECK(parse_action(to_string(a)) == a);
    }
    for (auto s : {VictimStatus::Unknown, VictimStatus::Found, VictimStatus::Ready, VictimStatus::Clear,
                   VictimStatus::Empty})
        CHECK(parse_status(to_string(s)) == s);
    CHECK(parse_role("medic") == Role::Medic);
    CHECK_THROWS_AS(parse_action("fly"), ValidationError);
}
