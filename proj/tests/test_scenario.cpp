#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sacbf/errors.hpp"
#include "sacbf/scenario.hpp"

#include <numbers>
#include <string>

using namespace sacbf;

namespace {

const std::string kScenarios = std::string(SACBF_SOURCE_DIR) + "/scenarios/";

const ChainDecl& find(const ScenarioConfig& c, const std::string& id) {
  for (const auto& d : c.chains)
    if (d.id == id) return d;
  FAIL("missing chain " << id);
  return c.chains.front();
}

const char* kMinimal = R"(
[scenario]
initial_state = -3 0 0 1
dt = 0.1
horizon = 1
input_lower = -1 -1
input_upper = 1 1
)";

const char* kDisc = "[safety a]\ncenter = 0 0\nradius = 1\nlambda = 2\n";

}  // namespace

TEST_CASE("bundled first case") {
  const ScenarioConfig c = load_scenario(kScenarios + "case1.cfg");
  CHECK(c.model == "unicycle");
  CHECK(c.dt == 0.1);
  CHECK(c.horizon == 5.0);
  CHECK(c.initial_state(0) == -3.0);
  CHECK(c.initial_state(1) == 0.0);
  CHECK(c.initial_state(3) == 1.0);
  CHECK(c.input_box.lower(0) == -10.0);
  CHECK(c.input_box.upper(1) == 10.0);
  CHECK(c.bound.nodes == 5);
  CHECK(c.bound.safety_factor == 1.5);
  CHECK(c.effective_substep() == doctest::Approx(0.001));
  REQUIRE(c.chains.size() == 2);
  const ChainDecl& obs = find(c, "obstacle");
  CHECK(obs.tag == ChainTag::kSafety);
  CHECK(obs.center(0) == 0.0);
  CHECK(obs.radius == 1.0);
  CHECK(obs.weight == 200.0);
  for (const auto& a : obs.alphas) {
    CHECK(a.lambda == 2.0);
    CHECK(a.eta == 1.0);
  }
  const ChainDecl& tgt = find(c, "target");
  CHECK(tgt.tag == ChainTag::kReach);
  CHECK(tgt.reach.center(0) == 3.0);
  CHECK(tgt.reach.eps_d == 1.0);
  CHECK(tgt.reach.t_reach == 5.0);
  CHECK(tgt.weight == 200.0);
}

TEST_CASE("bundled second case") {
  const ScenarioConfig c = load_scenario(kScenarios + "case2.cfg");
  CHECK(c.horizon == 22.0);
  CHECK(c.initial_state(2) == doctest::Approx(std::numbers::pi / 6));
  struct Disc {
    const char* id;
    double x, y, r;
  };
  for (const Disc& d : {Disc{"obstacle1", 0, 0, 1}, Disc{"obstacle2", 8, 0, 2}, Disc{"obstacle3", 3, 3, 1.5}}) {
    const ChainDecl& o = find(c, d.id);
    CHECK(o.center(0) == d.x);
    CHECK(o.center(1) == d.y);
    CHECK(o.radius == d.r);
    CHECK(o.weight == 1.0);
  }
  const ChainDecl& r1 = find(c, "region1");
  CHECK(r1.reach.t_start == 0.0);
  CHECK(r1.reach.t_reach == 5.0);
  REQUIRE(r1.reach.t_remain.has_value());
  CHECK(*r1.reach.t_remain == 12.0);
  CHECK(find(c, "region2").reach.t_start == 12.0);
  CHECK(find(c, "region2").reach.t_reach == 18.0);
  CHECK(find(c, "region3").reach.t_start == 18.0);
  CHECK(find(c, "region3").reach.t_reach == 22.0);
}

TEST_CASE("defaults") {
  const ScenarioConfig c = parse_scenario(std::string(kMinimal) + kDisc);
  CHECK(c.bound.nodes == 5);
  CHECK(c.bound.safety_factor == 1.5);
  CHECK(c.audit_substep == doctest::Approx(0.001));
  CHECK(c.controller == ControllerKind::kRelaxedSacbf);
  CHECK(c.policy == InfeasibilityPolicy::kHoldPrevious);
  CHECK(c.chains.front().weight == 1.0);
  CHECK(c.chains.front().alphas.front().eta == 1.0);
}

TEST_CASE("parse errors name the problem") {
  CHECK_THROWS_AS(parse_scenario(""), ParseError);
  CHECK_THROWS_AS(parse_scenario("# only a comment\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "colour = red\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "[weather]\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "dt = 0.2\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario("[scenario]\ndt = 0.1\nhorizon = 1\ninput_lower = 0\ninput_upper = 0\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "[safety a]\ncenter = 0 0\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "[safety a]\ncenter = 0 0\nradius = 1\n[safety a]\ncenter = 1 1\nradius = 1\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "[bound]\nnodes = 9\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "[bound]\nnodes = three\n"), ParseError);
  try {
    parse_scenario("[scenario]\ninitial_state = 0 0 0 0\nhorizon = 1\ninput_lower = 0 0\ninput_upper = 0 0\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("dt") != std::string::npos);
  }
}

TEST_CASE("eta within 1e-12 of one is normalized") {
  const ScenarioConfig c =
      parse_scenario(std::string(kMinimal) + "[safety a]\ncenter = 0 0\nradius = 1\nlambda = 2\neta = 1.0000000000001\n");
  for (const auto& a : c.chains.front().alphas) CHECK(a.eta == 1.0);
}

TEST_CASE("per-level lambda and eta lists") {
  const ScenarioConfig c =
      parse_scenario(std::string(kMinimal) + "[safety a]\ncenter = 0 0\nradius = 1\nlambda = 1 3\neta = 1 2\n");
  REQUIRE(c.chains.front().alphas.size() == 2);
  CHECK(c.chains.front().alphas[1].lambda == 3.0);
  CHECK(c.chains.front().alphas[1].eta == 2.0);
  CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "[safety a]\ncenter = 0 0\nradius = 1\nlambda = 1 2 3\n"),
                  ParseError);
}

TEST_CASE("round trip") {
  for (const char* name : {"case1.cfg", "case2.cfg"}) {
    const ScenarioConfig c = load_scenario(kScenarios + name);
    const ScenarioConfig again = parse_scenario(serialize_scenario(c));
    CHECK(again == c);
    CHECK(serialize_scenario(again) == serialize_scenario(c));
  }
  ScenarioConfig odd = parse_scenario(std::string(kMinimal) + R"(
policy = zero-input
controller = hocbf
audit_substep = 0.0005
integrator_tolerance = 1e-11

[bound]
nodes = 3
safety_factor = 2.25
lipschitz_samples = 16
seed = 99
cache_fraction = 0.2
input_variation = held-input
candidate_inputs = applied-input
certify_iterations = 4
certify_margin = 0.05

[reach r]
center = 1 2
eps0 = 3
eps_d = 0.5
t_start = 0.2
t_reach = 0.9
t_remain = 1.0
norm_order = 3
schedule = linear-radius
form = literal
lambda = 0.7 1.9
eta = 1 1.5
weight = 4
)");
  odd.initial_state(2) = 0.1 + 0.2;  // a value without a short decimal form
  CHECK(parse_scenario(serialize_scenario(odd)) == odd);
  ScenarioConfig changed = odd;
  changed.bound.seed = 100;
  CHECK_FALSE(changed == odd);
}

TEST_CASE("missing file") { CHECK_THROWS_AS(load_scenario(kScenarios + "does-not-exist.cfg"), ParseError); }
