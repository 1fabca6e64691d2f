#pragma once

// The cloning protocol end to end: measure the input through an
// informationally complete POVM, feed the pointer into the looped cloning
// circuit, read the ancillas, and reconstruct the state from the outcome
// frequencies.  Because the loop's self-consistent state depends on the
// input, the overall map is nonlinear in the input state — which is what the
// discrimination and mixture helpers below quantify.
//
// Two execution modes:
//
//  * dense       — builds the full interaction, solves the fixed point, and
//                  samples the joint ancilla readout from the output state.
//                  Exact but limited to small clone counts by the d^(2N+1)
//                  circuit dimension.
//  * structured  — uses the circuit's closed-form fixed point: at the unique
//                  self-consistent loop state the N ancilla readouts are
//                  independent draws from the POVM outcome distribution, so
//                  sampling a multinomial replaces the dense solve.  The
//                  dense/structured agreement is checked by the test suite
//                  on instances both can reach.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dctc/circuits.hpp"
#include "dctc/ctc.hpp"
#include "dctc/parallel.hpp"
#include "dctc/povm.hpp"
#include "dctc/qmath.hpp"
#include "dctc/rng.hpp"

namespace dctc {

enum class RunMode { dense, structured };
enum class PovmChoice { sic, random_ic };

struct CloneRunConfig {
  Index d = 2;                               // input state dimension
  long long n = 1000;                        // clones produced = readout samples
  PovmChoice povm_choice = PovmChoice::sic;  // sic requires d = 2
  std::uint64_t povm_seed = 7;               // random_ic frame seed
  RunMode mode = RunMode::structured;
  std::uint64_t seed = 1;
  Index dense_cap = kDefaultDenseCap;
};

struct CloneRunResult {
  DensityOperator rho_hat;
  RealVector probabilities;  // exact POVM outcome distribution of the input
  RealVector frequencies;    // empirical readout frequencies
  double fidelity = 0.0;     // F(rho_in, rho_hat)
  double trace_distance = 0.0;
  double max_freq_error = 0.0;  // max_x |frequencies_x - probabilities_x|
  long long n = 0;
  RunMode mode = RunMode::structured;
  double wall_time_s = 0.0;
  std::optional<RealVector> joint_readout_probs;  // dense mode: diagonal of the
                                                  // joint ancilla readout
  std::string note;
};

inline Povm make_povm(Index d, PovmChoice choice, std::uint64_t povm_seed) {
  if (choice == PovmChoice::sic) {
    if (d != 2)
      throw std::invalid_argument(
          "make_povm: the sic frame is a qubit POVM (d = 2); use the random frame for d > 2");
    return sic_qubit();
  }
  return random_ic_povm(d, povm_seed);
}

// Frequencies of n independent draws from `probs` (counts / n).
inline RealVector empirical_frequencies(const RealVector& probs, long long n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("empirical_frequencies: need at least one sample");
  const std::vector<long long> counts = multinomial_counts(probs, n, rng);
  RealVector f(probs.size());
  for (Index i = 0; i < probs.size(); ++i)
    f[i] = static_cast<double>(counts[static_cast<std::size_t>(i)]) / static_cast<double>(n);
  return f;
}

// Two-sided tail bound P(|f_x - p_x| > delta) <= 2 exp(-2 n delta^2) for a
// single frequency, clipped to [0, 1].
inline double hoeffding_bound(long long n, double delta) {
  if (n < 1) throw std::invalid_argument("hoeffding_bound: n must be >= 1");
  if (!(delta > 0.0)) throw std::invalid_argument("hoeffding_bound: delta must be positive");
  return std::min(1.0, 2.0 * std::exp(-2.0 * static_cast<double>(n) * delta * delta));
}

// Smallest n with 2 exp(-2 n delta^2) <= eps_fail, floored at one sample
// (an eps_fail >= 2 is vacuously satisfied).  For a uniform guarantee over k
// outcomes pass eps_fail / k (union bound).
inline long long required_n(double delta, double eps_fail) {
  if (!(delta > 0.0)) throw std::invalid_argument("required_n: delta must be positive");
  if (!(eps_fail > 0.0)) throw std::invalid_argument("required_n: eps_fail must be positive");
  const double raw = std::log(2.0 / eps_fail) / (2.0 * delta * delta);
  if (!(raw > 0.0)) return 1;
  return std::max<long long>(1, static_cast<long long>(std::ceil(raw - 1e-12)));
}

namespace detail {

// Dense execution: solve the loop self-consistency for the measured-variant
// circuit fed with omega = measurement_map(rho) and |0> ancillas, verify the
// ancilla marginal carries omega^(⊗n), and sample one joint readout.
inline RealVector dense_joint_readout(const Povm& povm, const DensityOperator& rho,
                                      const CloneRunConfig& cfg, RealVector* counts_out,
                                      Rng& sample_rng) {
  const Index d_out = povm.d_out();
  ClonerSpec spec;
  spec.d = d_out;
  spec.n_ctc = static_cast<Index>(cfg.n);
  spec.variant = ClonerVariant::measured;
  spec.dense_cap = cfg.dense_cap;
  const DctcInteraction ix = cloner_interaction(spec);

  const DensityOperator omega = measurement_map(povm, rho, "S");
  DensityOperator system_in = omega;
  for (Index i = 1; i <= spec.n_ctc; ++i)
    system_in = tensor_product(
        system_in, basis_state(0, SubsystemLayout::single(d_out, "A" + std::to_string(i))));

  const FixedPointResult fp = solve_fixed_point_iterate(ix, system_in);
  if (!fp.converged)
    throw std::runtime_error("run_protocol: loop fixed point did not converge (defect " +
                             std::to_string(fp.residual) + ")");
  const DensityOperator out = ctc_output(ix, system_in, fp.sigma);

  std::vector<std::string> ancillas;
  for (Index i = 1; i <= spec.n_ctc; ++i) ancillas.push_back("A" + std::to_string(i));
  const DensityOperator readout = partial_trace(out, ancillas);

  // Internal consistency: the ancillas must carry independent copies of omega.
  DensityOperator expected = partial_trace(readout, {"A1"});
  for (Index i = 2; i <= spec.n_ctc; ++i)
    expected = tensor_product(expected, partial_trace(readout, {"A" + std::to_string(i)}));
  if (trace_distance(readout, expected) > 1e-9)
    throw std::runtime_error("run_protocol: ancilla readout is not a product of copies");
  if (trace_distance(partial_trace(readout, {"A1"}), omega) > 1e-9)
    throw std::runtime_error("run_protocol: ancilla marginal does not match the measured state");

  const RealVector joint = readout.diagonal_real().cwiseMax(0.0);

  // One protocol run: a single draw of the joint readout gives n outcome
  // values (one per ancilla).
  const Index cell = sample_discrete(joint, sample_rng);
  RealVector counts = RealVector::Zero(d_out);
  Index rest = cell;
  for (Index i = 0; i < spec.n_ctc; ++i) {
    counts[rest % d_out] += 1.0;
    rest /= d_out;
  }
  *counts_out = counts;
  return joint;
}

}  // namespace detail

inline CloneRunResult run_protocol(const DensityOperator& rho, const CloneRunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (rho.dim() != cfg.d)
    throw std::invalid_argument("run_protocol: input state dimension does not match config");
  if (cfg.n < 1) throw std::invalid_argument("run_protocol: n must be >= 1");

  const Povm povm = make_povm(cfg.d, cfg.povm_choice, cfg.povm_seed);
  const ReconstructionFrame frame = build_frame(povm);
  const RealVector probs = outcome_probabilities(povm, rho);

  Rng root(cfg.seed);
  Rng sample_rng = root.split(1);

  RealVector frequencies;
  std::optional<RealVector> joint_readout;
  if (cfg.mode == RunMode::dense) {
    RealVector counts;
    joint_readout = detail::dense_joint_readout(povm, rho, cfg, &counts, sample_rng);
    frequencies = counts / static_cast<double>(cfg.n);
  } else {
    frequencies = empirical_frequencies(probs, cfg.n, sample_rng);
  }

  DensityOperator rho_hat = reconstruct(frame, frequencies);
  const double fid = fidelity(rho, rho_hat);
  const double dist = trace_distance(rho, rho_hat);
  const double max_err = (frequencies - probs).cwiseAbs().maxCoeff();
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return CloneRunResult{std::move(rho_hat), probs,    std::move(frequencies),
                        fid,               dist,      max_err,
                        cfg.n,             cfg.mode,  wall,
                        std::move(joint_readout),     std::string()};
}

// Distinguish two known states from one protocol run on `input`: returns the
// index (0 or 1) of the reference state closer to the reconstruction.
inline int discriminate(const DensityOperator& rho0, const DensityOperator& rho1,
                        const DensityOperator& input, const CloneRunConfig& cfg) {
  if (rho0.dim() != rho1.dim() || rho0.dim() != input.dim())
    throw std::invalid_argument("discriminate: dimension mismatch");
  if (trace_distance(rho0, rho1) <= 1e-12)
    throw std::invalid_argument("discriminate: reference states are indistinguishable");
  const CloneRunResult run = run_protocol(input, cfg);
  const double d0 = trace_distance(run.rho_hat, rho0);
  const double d1 = trace_distance(run.rho_hat, rho1);
  return d1 < d0 ? 1 : 0;
}

// Compose the protocol with a post-processing map f: returns f(rho_hat).
// Because rho_hat depends (nonlinearly) on the input, so does the result.
inline DensityOperator apply_nonlinear_map(
    const std::function<DensityOperator(const DensityOperator&)>& f, const DensityOperator& rho,
    const CloneRunConfig& cfg) {
  return f(run_protocol(rho, cfg).rho_hat);
}

// Running the protocol on a labeled ensemble {(w_i, rho_i)} prepared as its
// average sum_i w_i rho_i.  The clones approximate the average state, not
// the per-label states: the protocol is nonlinear, so the ensemble average
// of per-label outputs differs from the output of the averaged input (the
// mixture witness in the test suite quantifies this).
inline CloneRunResult labeled_mixture_behavior(
    const std::vector<std::pair<double, DensityOperator>>& ensemble, const CloneRunConfig& cfg) {
  if (ensemble.empty()) throw std::invalid_argument("labeled_mixture_behavior: empty ensemble");
  double total = 0.0;
  for (const auto& [w, state] : ensemble) {
    if (w < -1e-12) throw std::invalid_argument("labeled_mixture_behavior: negative weight");
    if (state.dim() != cfg.d)
      throw std::invalid_argument("labeled_mixture_behavior: state dimension mismatch");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("labeled_mixture_behavior: weights sum to " + std::to_string(total));
  ComplexMatrix avg = ComplexMatrix::Zero(cfg.d, cfg.d);
  for (const auto& [w, state] : ensemble) avg += w * state.matrix();
  CloneRunResult result =
      run_protocol(DensityOperator(std::move(avg), ensemble.front().second.layout()), cfg);
  result.note =
      "protocol acts on the ensemble-average state; clones approximate the average, not the "
      "per-label states";
  return result;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

// One result record, as written to CSV by the command-line driver.
struct SweepRow {
  std::uint64_t seed = 0;
  Index d = 2;
  long long n = 0;
  std::string povm;
  std::string mode;
  double fidelity = 0.0;
  double trace_distance = 0.0;
  double max_freq_error = 0.0;
  double wall_time_s = 0.0;
};

inline const char* to_string(RunMode m) { return m == RunMode::dense ? "dense" : "structured"; }
inline const char* to_string(PovmChoice p) { return p == PovmChoice::sic ? "sic" : "random"; }

// For each n in n_list, `trials` independent runs on fresh Haar-random pure
// input states.  Trial t of n_list[j] uses the RNG stream split from
// base.seed at key j * trials + t, so rows are deterministic and independent
// of execution order; trials run in parallel.
inline std::vector<SweepRow> run_sweep(const CloneRunConfig& base,
                                       const std::vector<long long>& n_list, long long trials) {
  if (n_list.empty()) throw std::invalid_argument("run_sweep: empty n list");
  if (trials < 1) throw std::invalid_argument("run_sweep: trials must be >= 1");
  const Rng root(base.seed);
  std::vector<SweepRow> rows(static_cast<std::size_t>(n_list.size() * static_cast<std::size_t>(trials)));
  parallel_for(static_cast<long long>(rows.size()), [&](long long flat) {
    const std::size_t j = static_cast<std::size_t>(flat) / static_cast<std::size_t>(trials);
    Rng stream = root.split(static_cast<std::uint64_t>(flat));
    Rng state_rng = stream.split(0);
    CloneRunConfig cfg = base;
    cfg.n = n_list[j];
    cfg.seed = stream.split(1).seed();
    const ComplexVector ket = random_pure_ket(cfg.d, state_rng);
    const DensityOperator rho = pure_state(ket, SubsystemLayout::single(cfg.d));
    const CloneRunResult run = run_protocol(rho, cfg);
    rows[static_cast<std::size_t>(flat)] =
        SweepRow{cfg.seed,         cfg.d,
                 cfg.n,            to_string(cfg.povm_choice),
                 to_string(cfg.mode), run.fidelity,
                 run.trace_distance, run.max_freq_error,
                 run.wall_time_s};
  });
  return rows;
}

inline double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace dctc
