#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dctc/cloning.hpp"
#include "dctc/qmath.hpp"
#include "dctc/rng.hpp"

using namespace dctc;

TEST_CASE("sample-complexity helpers match hand-evaluated values", "[cloning][bounds]") {
  // 2 exp(-2 * 1000 * 0.05^2) = 2 exp(-5)
  CHECK(hoeffding_bound(1000, 0.05) == 0.013475893998170934);
  CHECK(hoeffding_bound(1, 0.1) == 1.0);  // clipped: 2 exp(-0.02) > 1

  CHECK(required_n(0.05, 0.01) == 1060);
  CHECK(required_n(0.05, 2.0) == 1);  // vacuous failure budget
  CHECK(required_n(0.01, 0.01) == 26492);

  // The returned n actually satisfies the bound, and n - 1 does not.
  const long long n = required_n(0.05, 0.01);
  CHECK(hoeffding_bound(n, 0.05) <= 0.01);
  CHECK(hoeffding_bound(n - 1, 0.05) > 0.01);

  CHECK_THROWS_AS(hoeffding_bound(0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(hoeffding_bound(10, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(required_n(0.0, 0.1), std::invalid_argument);
}

TEST_CASE("multinomial sampling is normalized and seed-deterministic", "[cloning][sampling]") {
  RealVector probs(4);
  probs << 0.1, 0.2, 0.3, 0.4;
  Rng a(8), b(8), c(9);
  const RealVector fa = empirical_frequencies(probs, 5000, a);
  const RealVector fb = empirical_frequencies(probs, 5000, b);
  const RealVector fc = empirical_frequencies(probs, 5000, c);
  CHECK(fa.sum() == Catch::Approx(1.0));
  CHECK((fa - fb).cwiseAbs().maxCoeff() == 0.0);
  CHECK((fa - fc).cwiseAbs().maxCoeff() > 0.0);
  // Law of large numbers sanity: 5000 samples pin each frequency loosely.
  CHECK((fa - probs).cwiseAbs().maxCoeff() < 0.05);

  Rng d(8);
  CHECK_THROWS_AS(empirical_frequencies(probs, 0, d), std::invalid_argument);
}

TEST_CASE("povm factory enforces the qubit-only symmetric frame", "[cloning][config]") {
  CHECK_NOTHROW(make_povm(2, PovmChoice::sic, 0));
  CHECK_THROWS_AS(make_povm(3, PovmChoice::sic, 0), std::invalid_argument);
  CHECK(make_povm(3, PovmChoice::random_ic, 4).d_out() == 9);
}

TEST_CASE("protocol runs are deterministic in the seed", "[cloning][protocol]") {
  const DensityOperator rho = bloch_state(0.3, -0.2, 0.5);
  CloneRunConfig cfg;
  cfg.n = 2000;
  cfg.seed = 77;

  const CloneRunResult a = run_protocol(rho, cfg);
  const CloneRunResult b = run_protocol(rho, cfg);
  CHECK((a.frequencies - b.frequencies).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.rho_hat.matrix() - b.rho_hat.matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.fidelity == b.fidelity);

  cfg.seed = 78;
  const CloneRunResult c = run_protocol(rho, cfg);
  CHECK((a.frequencies - c.frequencies).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("protocol output quality and bookkeeping", "[cloning][protocol]") {
  const DensityOperator rho = bloch_state(0.1, 0.6, -0.3);
  CloneRunConfig cfg;
  cfg.n = 200000;
  cfg.seed = 5;

  const CloneRunResult run = run_protocol(rho, cfg);
  CHECK(run.n == cfg.n);
  CHECK(run.mode == RunMode::structured);
  CHECK(run.probabilities.size() == 4);
  CHECK(run.frequencies.sum() == Catch::Approx(1.0));
  CHECK(run.max_freq_error ==
        Catch::Approx((run.frequencies - run.probabilities).cwiseAbs().maxCoeff()));
  // 2e5 samples reconstruct a qubit state to a few parts in a thousand.
  CHECK(run.trace_distance < 0.02);
  CHECK(run.fidelity > 0.999);
  CHECK_FALSE(run.joint_readout_probs.has_value());

  CloneRunConfig bad = cfg;
  bad.n = 0;
  CHECK_THROWS_AS(run_protocol(rho, bad), std::invalid_argument);
  CloneRunConfig mismatched = cfg;
  mismatched.d = 3;
  CHECK_THROWS_AS(run_protocol(rho, mismatched), std::invalid_argument);
}

TEST_CASE("dense execution exposes a product joint readout", "[cloning][dense]") {
  const DensityOperator rho = bloch_state(0.2, 0.3, 0.4);
  CloneRunConfig cfg;
  cfg.n = 2;  // two clones -> joint readout over 4^2 cells
  cfg.mode = RunMode::dense;
  cfg.seed = 3;

  const CloneRunResult run = run_protocol(rho, cfg);
  REQUIRE(run.joint_readout_probs.has_value());
  REQUIRE(run.joint_readout_probs->size() == 16);

  // The joint law is the product p ⊗ p of the POVM outcome distribution.
  const RealVector& joint = *run.joint_readout_probs;
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j)
      CHECK(joint[i * 4 + j] ==
            Catch::Approx(run.probabilities[i] * run.probabilities[j]).margin(1e-12));

  // Frequencies come from a single joint draw: multiples of 1/n.
  for (Index x = 0; x < run.frequencies.size(); ++x) {
    const double scaled = run.frequencies[x] * static_cast<double>(cfg.n);
    CHECK(scaled == Catch::Approx(std::round(scaled)).margin(1e-12));
  }
}

TEST_CASE("single-run discrimination separates orthogonal-ish references", "[cloning][protocol]") {
  const DensityOperator zero = bloch_state(0.0, 0.0, 1.0);
  const DensityOperator plus = bloch_state(1.0, 0.0, 0.0);
  CloneRunConfig cfg;
  cfg.n = 100000;

  cfg.seed = 21;
  CHECK(discriminate(zero, plus, zero, cfg) == 0);
  cfg.seed = 22;
  CHECK(discriminate(zero, plus, plus, cfg) == 1);
  CHECK_THROWS_AS(discriminate(zero, zero, zero, cfg), std::invalid_argument);
}

TEST_CASE("mixture runs act on the ensemble average", "[cloning][mixture]") {
  const DensityOperator zero = bloch_state(0.0, 0.0, 1.0);
  const DensityOperator one = bloch_state(0.0, 0.0, -1.0);
  CloneRunConfig cfg;
  cfg.n = 50000;
  cfg.seed = 13;

  const CloneRunResult mix = labeled_mixture_behavior({{0.5, zero}, {0.5, one}}, cfg);
  CHECK_FALSE(mix.note.empty());
  // Same seed, same average state: identical to running on pi directly.
  const CloneRunResult direct = run_protocol(maximally_mixed(SubsystemLayout::single(2)), cfg);
  CHECK((mix.frequencies - direct.frequencies).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(labeled_mixture_behavior({{0.7, zero}, {0.7, one}}, cfg),
                  std::invalid_argument);
  CHECK_THROWS_AS(labeled_mixture_behavior({}, cfg), std::invalid_argument);
}

TEST_CASE("sweeps are deterministic and shaped (n_list x trials)", "[cloning][sweep]") {
  CloneRunConfig base;
  base.seed = 99;
  const std::vector<long long> n_list = {100, 400};

  const std::vector<SweepRow> rows = run_sweep(base, n_list, 5);
  REQUIRE(rows.size() == 10);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t t = 0; t < 5; ++t) CHECK(rows[j * 5 + t].n == n_list[j]);

  const std::vector<SweepRow> again = run_sweep(base, n_list, 5);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].seed == again[i].seed);
    CHECK(rows[i].fidelity == again[i].fidelity);
    CHECK(rows[i].max_freq_error == again[i].max_freq_error);
  }

  // Distinct trials use distinct run seeds (independent streams).
  CHECK(rows[0].seed != rows[1].seed);
  CHECK_THROWS_AS(run_sweep(base, {}, 5), std::invalid_argument);
  CHECK_THROWS_AS(run_sweep(base, n_list, 0), std::invalid_argument);
}

TEST_CASE("median handles odd and even lengths", "[cloning][stats]") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK_THROWS_AS(median({}), std::invalid_argument);
}
