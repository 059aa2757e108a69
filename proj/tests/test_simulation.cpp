#include <cmath>
#include <sstream>

#include "doctest.h"
#include "dptool/rng.hpp"
#include "dptool/simulation.hpp"
#include "helpers.hpp"

using namespace dptool;

namespace {

bool close(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

} // namespace

TEST_CASE("agent validation") {
  auto p = fixtures::judge_problem();
  AgentSpec agent;
  CHECK(validate_agent(agent, p).valid());

  SUBCASE("prior override shape and mass") {
    agent.prior_override = Belief{{0.5}};
    CHECK(validate_agent(agent, p).has("AGENT_PRIOR_SHAPE_MISMATCH"));
    agent.prior_override = Belief{{0.7, 0.7}};
    CHECK(validate_agent(agent, p).has("AGENT_PRIOR_NOT_NORMALIZED"));
    agent.prior_override = Belief{{1.5, -0.5}};
    CHECK(validate_agent(agent, p).has("AGENT_PRIOR_NEGATIVE_ENTRY"));
  }

  SUBCASE("garbling rows are signal distributions") {
    agent.garbling = Matrix{{1.0, 0.0}};
    CHECK(validate_agent(agent, p).has("AGENT_GARBLING_SHAPE_MISMATCH"));
    agent.garbling = Matrix{{0.9, 0.2}, {0.0, 1.0}};
    CHECK(validate_agent(agent, p).has("AGENT_GARBLING_ROW_NOT_NORMALIZED"));
    agent.garbling = Matrix{{1.1, -0.1}, {0.0, 1.0}};
    CHECK(validate_agent(agent, p).has("AGENT_GARBLING_NEGATIVE_ENTRY"));
  }

  SUBCASE("scalar parameter ranges") {
    agent = AgentSpec{};
    agent.updating_exponent = -0.1;
    CHECK(validate_agent(agent, p).has("AGENT_LAMBDA_OUT_OF_RANGE"));
    agent = AgentSpec{};
    agent.softmax_temperature = -1.0;
    CHECK(validate_agent(agent, p).has("AGENT_TAU_OUT_OF_RANGE"));
    agent = AgentSpec{};
    agent.lapse_rate = 1.5;
    CHECK(validate_agent(agent, p).has("AGENT_LAPSE_OUT_OF_RANGE"));
  }

  SUBCASE("build_policy rejects invalid specs") {
    agent = AgentSpec{};
    agent.lapse_rate = 2.0;
    CHECK_THROWS_AS(build_policy(p, agent), DomainError);
  }
}

TEST_CASE("lossless agent reproduces the rational benchmark exactly") {
  auto p = fixtures::judge_problem();
  auto policy = build_policy(p, AgentSpec{});
  auto metrics = exact_metrics(p, policy);
  CHECK(close(metrics.B, 0.35));
  CHECK(close(metrics.C, 0.35));

  // deterministic policy: each signal row is a point mass on the optimum
  CHECK(policy.rho[0][0] == 1.0);
  CHECK(policy.rho[1][1] == 1.0);
}

TEST_CASE("loss parameters hit their closed-form scores") {
  auto p = fixtures::judge_problem();

  SUBCASE("ignoring the signal falls back to the prior optimum") {
    AgentSpec agent;
    agent.updating_exponent = 0.0;
    auto metrics = exact_metrics(p, build_policy(p, agent));
    CHECK(close(metrics.B, 0.0)); // prior plays release everywhere
    CHECK(close(metrics.C, 0.0));
  }

  SUBCASE("lapse mixes linearly toward the uniform score") {
    for (auto [eps, expected] :
         {std::pair{0.0, 0.35}, std::pair{0.5, 0.1125}, std::pair{1.0, -0.125}}) {
      AgentSpec agent;
      agent.lapse_rate = eps;
      auto metrics = exact_metrics(p, build_policy(p, agent));
      CHECK(close(metrics.B, expected));
    }
  }

  SUBCASE("extreme temperature approaches the uniform score") {
    AgentSpec agent;
    agent.softmax_temperature = 1e9;
    auto metrics = exact_metrics(p, build_policy(p, agent));
    CHECK(close(metrics.B, -0.125, 1e-6));
  }

  SUBCASE("an overconfident prior override washes out a noisy signal") {
    auto noisy = fixtures::noisy_judge_problem();
    AgentSpec agent;
    agent.prior_override = Belief{{0.99, 0.01}};
    auto metrics = exact_metrics(noisy, build_policy(noisy, agent));
    CHECK(close(metrics.B, 0.0)); // releases on both signals
  }
}

TEST_CASE("garbling degrades the policy, identity garbling does not") {
  auto noisy = fixtures::noisy_judge_problem();

  AgentSpec plain;
  AgentSpec identity;
  identity.garbling = Matrix{{1.0, 0.0}, {0.0, 1.0}};
  auto rho_plain = build_policy(noisy, plain).rho;
  auto rho_id = build_policy(noisy, identity).rho;
  CHECK(rho_plain == rho_id);

  AgentSpec confusion;
  confusion.garbling = Matrix{{0.5, 0.5}, {0.5, 0.5}};
  auto metrics = exact_metrics(noisy, build_policy(noisy, confusion));
  CHECK(close(metrics.B, -0.125)); // every signal acts like a coin flip
}

TEST_CASE("zero-mass perceived signals") {
  auto p = fixtures::judge_problem();
  p.info.joint = {{0.5, 0.5}, {0.0, 0.0}};

  AgentSpec agent;
  agent.garbling = Matrix{{0.5, 0.5}, {0.0, 1.0}}; // routes mass onto the dead signal
  CHECK_THROWS_AS(build_policy(p, agent), ZeroMassPerceivedSignal);

  // exponent zero never consults the likelihood (0^0 = 1), so the update
  // stays at the base belief
  agent.updating_exponent = 0.0;
  CHECK_NOTHROW(build_policy(p, agent));
}

TEST_CASE("sampling determinism and convergence") {
  auto p = fixtures::judge_problem();
  auto policy = build_policy(p, AgentSpec{});

  auto ds1 = sample_dataset(p, policy, 200, 42);
  auto ds2 = sample_dataset(p, policy, 200, 42);
  REQUIRE(ds1.records.size() == 200);
  std::ostringstream a, b;
  write_csv(a, ds1);
  write_csv(b, ds2);
  CHECK(a.str() == b.str());

  auto ds3 = sample_dataset(p, policy, 200, 43);
  std::ostringstream c;
  write_csv(c, ds3);
  CHECK(a.str() != c.str());

  auto big = sample_dataset(p, policy, 20000, 7);
  CHECK(close(behavioral_score(big), 0.35, 0.02));

  // sampled draws respect the joint: the perfect signal never pairs a
  // prediction with the other state
  for (const auto& r : big.records) CHECK(r.signal == r.state);
}

TEST_CASE("substream derivation decouples parallel and serial sweeps") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(123, 45) == derive_seed(123, 45));

  auto p = fixtures::judge_problem();
  std::vector<AgentSpec> agents;
  for (double eps : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    AgentSpec a;
    a.lapse_rate = eps;
    agents.push_back(a);
  }

  SweepSettings serial;
  serial.mode = SweepMode::Sampled;
  serial.n_trials = 400;
  serial.seed = 11;
  serial.parallel = false;
  SweepSettings parallel = serial;
  parallel.parallel = true;

  auto rows_s = design_sweep(p, agents, serial);
  auto rows_p = design_sweep(p, agents, parallel);
  REQUIRE(rows_s.size() == rows_p.size());
  for (std::size_t i = 0; i < rows_s.size(); ++i) {
    CHECK(rows_s[i].B == rows_p[i].B);
    CHECK(rows_s[i].C == rows_p[i].C);
  }
}

TEST_CASE("design sweeps carry losses only when information has value") {
  std::vector<AgentSpec> agents(1);

  auto p = fixtures::judge_problem();
  auto rows = design_sweep(p, agents);
  REQUIRE(rows.size() == 1);
  CHECK(close(rows[0].B, 0.35));
  REQUIRE(rows[0].total_loss.has_value());
  CHECK(close(*rows[0].total_loss, 0.0));

  auto flat = fixtures::turnout_problem();
  auto flat_rows = design_sweep(flat, agents);
  CHECK_FALSE(flat_rows[0].total_loss.has_value());
}

TEST_CASE("learning agent converges on a revealing problem") {
  auto p = fixtures::judge_problem(); // discloses feedback

  auto run = run_learning_agent(p, uniform_counts(p), 300, 11, AgentSpec{});
  REQUIRE(run.curve.size() == 300);
  for (double v : run.curve) CHECK(v <= 0.35 + 1e-12);
  double tail = 0.0;
  for (std::size_t i = 250; i < 300; ++i) tail += run.curve[i];
  CHECK(tail / 50.0 > 0.3);

  // final pseudo-counts absorbed one observation per trial
  double total = 0.0;
  for (const auto& row : run.final_state.pseudo_counts)
    for (double x : row) total += x;
  CHECK(close(total, 4.0 + 300.0));

  SUBCASE("no feedback, no learning run") {
    auto turnout = fixtures::turnout_problem();
    CHECK_THROWS_AS(run_learning_agent(turnout, uniform_counts(turnout), 10, 0, AgentSpec{}),
                    DomainError);
  }

  SUBCASE("the curve is deterministic under the seed") {
    auto again = run_learning_agent(p, uniform_counts(p), 300, 11, AgentSpec{});
    CHECK(run.curve == again.curve);
  }
}
