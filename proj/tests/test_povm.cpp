#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dctc/povm.hpp"
#include "dctc/qmath.hpp"

using namespace dctc;

TEST_CASE("tetrahedral qubit povm has the symmetric overlap pattern", "[povm][sic]") {
  const Povm p = sic_qubit();
  REQUIRE(p.d_in() == 2);
  REQUIRE(p.d_out() == 4);
  REQUIRE(is_informationally_complete(p));
  for (Index j = 0; j < 4; ++j)
    for (Index k = 0; k < 4; ++k) {
      const double overlap = (p.effect(j) * p.effect(k)).trace().real();
      const double expected = j == k ? 1.0 / 4.0 : 1.0 / 12.0;
      CHECK(overlap == Catch::Approx(expected).margin(1e-12));
    }
}

TEST_CASE("outcome probabilities match closed forms on reference states", "[povm][sic]") {
  const Povm p = sic_qubit();
  const RealVector uniform =
      outcome_probabilities(p, maximally_mixed(SubsystemLayout::single(2)));
  for (Index x = 0; x < 4; ++x) CHECK(uniform[x] == Catch::Approx(0.25));

  // For |0> the probability of effect x is (1 + v_x . z)/4 with tetrahedral
  // Bloch vectors whose z components are (s, -s, -s, s), s = 1/sqrt(3).
  const double s = 1.0 / std::sqrt(3.0);
  const RealVector zero = outcome_probabilities(p, basis_state(0, SubsystemLayout::single(2)));
  CHECK(zero[0] == Catch::Approx((1.0 + s) / 4.0));
  CHECK(zero[1] == Catch::Approx((1.0 - s) / 4.0));
  CHECK(zero[2] == Catch::Approx((1.0 - s) / 4.0));
  CHECK(zero[3] == Catch::Approx((1.0 + s) / 4.0));
  CHECK(zero.sum() == Catch::Approx(1.0));
}

TEST_CASE("povm constructor rejects invalid effect sets", "[povm]") {
  // Effects that do not sum to the identity.
  std::vector<ComplexMatrix> short_sum = {0.5 * ComplexMatrix::Identity(2, 2),
                                          0.25 * ComplexMatrix::Identity(2, 2)};
  CHECK_THROWS_AS(Povm(short_sum), std::invalid_argument);

  // A negative effect, compensated so the sum is still the identity.
  ComplexMatrix neg(2, 2);
  neg << -0.1, 0.0, 0.0, 0.2;
  std::vector<ComplexMatrix> negative = {neg, ComplexMatrix::Identity(2, 2) - neg};
  CHECK_THROWS_AS(Povm(negative), std::invalid_argument);

  CHECK_THROWS_AS(Povm(std::vector<ComplexMatrix>{}), std::invalid_argument);
}

TEST_CASE("computational-basis measurement is informationally incomplete", "[povm][frame]") {
  std::vector<ComplexMatrix> effects(2, ComplexMatrix::Zero(2, 2));
  effects[0](0, 0) = 1.0;
  effects[1](1, 1) = 1.0;
  const Povm basis(effects);
  CHECK(completeness_rank(basis) == 2);
  CHECK_FALSE(is_informationally_complete(basis));
  CHECK_THROWS_AS(build_frame(basis), std::invalid_argument);
}

TEST_CASE("linear inversion is exact on true outcome distributions", "[povm][frame]") {
  Rng rng(23);
  for (Index d : {Index{2}, Index{3}}) {
    const Povm p = d == 2 ? sic_qubit() : random_ic_povm(3, 900 + d);
    const ReconstructionFrame frame = build_frame(p);
    for (int trial = 0; trial < 25; ++trial) {
      const DensityOperator rho = random_density_operator(d, rng);
      const DensityOperator back = reconstruct(frame, outcome_probabilities(p, rho));
      CHECK(trace_distance(back, rho) < 1e-10);
    }
  }
}

TEST_CASE("reconstruct validates its frequency vector", "[povm][frame]") {
  const ReconstructionFrame frame = build_frame(sic_qubit());
  RealVector wrong_length(3);
  wrong_length << 0.5, 0.25, 0.25;
  CHECK_THROWS_AS(reconstruct(frame, wrong_length), std::invalid_argument);
  RealVector wrong_sum(4);
  wrong_sum << 0.5, 0.25, 0.25, 0.25;
  CHECK_THROWS_AS(reconstruct(frame, wrong_sum), std::invalid_argument);

  // Small negative entries (as produced by subtractive post-processing) are
  // clipped rather than rejected.
  RealVector near(4);
  near << 0.5, 0.5, 1e-9, -1e-9;
  const DensityOperator rho = reconstruct(frame, near);
  CHECK(rho.matrix().trace().real() == Catch::Approx(1.0));
}

TEST_CASE("random povm frames are valid, complete, and seed-deterministic", "[povm][random]") {
  for (Index d : {Index{2}, Index{3}}) {
    const Povm a = random_ic_povm(d, 5);
    const Povm b = random_ic_povm(d, 5);
    const Povm c = random_ic_povm(d, 6);
    REQUIRE(a.d_out() == d * d);
    REQUIRE(is_informationally_complete(a));
    double same = 0.0, diff = 0.0;
    for (Index x = 0; x < a.d_out(); ++x) {
      same = std::max(same, (a.effect(x) - b.effect(x)).cwiseAbs().maxCoeff());
      diff = std::max(diff, (a.effect(x) - c.effect(x)).cwiseAbs().maxCoeff());
    }
    CHECK(same == 0.0);
    CHECK(diff > 1e-3);
  }
  CHECK_THROWS_AS(random_ic_povm(1, 5), std::invalid_argument);
}

TEST_CASE("measurement map produces the outcome distribution on the pointer diagonal",
          "[povm][channel]") {
  const Povm p = sic_qubit();
  Rng rng(41);
  const DensityOperator rho = random_density_operator(2, rng);
  const DensityOperator omega = measurement_map(p, rho, "P");
  REQUIRE(omega.dim() == 4);
  CHECK(omega.layout().label(0) == "P");
  CHECK((omega.diagonal_real() - outcome_probabilities(p, rho)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(omega.matrix().cwiseAbs().sum() ==
        Catch::Approx(omega.diagonal_real().sum()));  // strictly diagonal
}

TEST_CASE("dilated measurement unitary implements sqrt-effect branches", "[povm][dilation]") {
  const Povm p = sic_qubit();
  const UnitaryOperator u = stinespring_unitary(p);
  REQUIRE(u.layout().labels() == std::vector<std::string>{"E", "B"});
  REQUIRE(u.dim() == 8);

  Rng rng(19);
  const ComplexVector psi = random_pure_ket(2, rng);

  // U (psi ⊗ |0>) = sum_x (sqrt(M_x) psi) ⊗ |x>.
  ComplexVector in = ComplexVector::Zero(8);
  in[0 * 4 + 0] = psi[0];
  in[1 * 4 + 0] = psi[1];
  const ComplexVector out = u.matrix() * in;
  for (Index x = 0; x < 4; ++x) {
    const ComplexVector branch = detail::hermitian_sqrt(p.effect(x)) * psi;
    CHECK(std::abs(out[0 * 4 + x] - branch[0]) < 1e-12);
    CHECK(std::abs(out[1 * 4 + x] - branch[1]) < 1e-12);
  }

  // Dephasing the pointer and discarding the carrier reproduces the
  // measurement channel.
  const DensityOperator joint = apply_unitary(
      tensor_product(pure_state(psi, SubsystemLayout::single(2, "E")),
                     basis_state(0, SubsystemLayout::single(4, "B"))),
      u);
  ComplexMatrix dephased = joint.matrix();
  for (Index i = 0; i < 8; ++i)
    for (Index j = 0; j < 8; ++j)
      if (i % 4 != j % 4) dephased(i, j) = 0.0;
  const DensityOperator pointer = partial_trace(
      DensityOperator::unchecked(std::move(dephased), joint.layout()), {"B"});
  const DensityOperator expected =
      measurement_map(p, pure_state(psi, SubsystemLayout::single(2)), "B");
  CHECK(trace_distance(pointer, expected) < 1e-12);
}

TEST_CASE("povm serialization round trips exactly", "[povm][io]") {
  const Povm p = random_ic_povm(3, 77);
  const Povm back = povm_from_text(povm_to_text(p));
  REQUIRE(back.d_out() == p.d_out());
  for (Index x = 0; x < p.d_out(); ++x)
    CHECK((back.effect(x) - p.effect(x)).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(povm_from_text("povm 0\n"), std::runtime_error);
}
