// End-to-end acceptance gate.  Prints one [PASS]/[FAIL] line per criterion
// with the measured values and the tolerances pinned in code, and exits with
// the number of failed criteria.  Runs at full statistics (the same
// implementations back `--command validate`, which this binary extends with
// the sampling-convergence sweep).

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "dctc/checks.hpp"
#include "dctc/cloning.hpp"

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d (%s): %s\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void report(int criterion, const dctc::CheckResult& result) {
  report(criterion, result.name, result.pass, result.detail);
}

// Criterion 6: median reconstruction infidelity over 200 Haar-random qubit
// pure states per sample count must be non-increasing in N and reach 1e-4 by
// N = 10^6 (structured mode, symmetric qubit POVM).
void run_convergence_sweep(const dctc::CheckOptions& opt) {
  dctc::CloneRunConfig base;
  base.d = 2;
  base.povm_choice = dctc::PovmChoice::sic;
  base.mode = dctc::RunMode::structured;
  base.seed = opt.seed ^ 0x5eed;
  const std::vector<long long> n_list = {100, 1000, 10000, 100000, 1000000};
  const long long trials = 200;

  const std::vector<dctc::SweepRow> rows = dctc::run_sweep(base, n_list, trials);
  std::vector<double> medians;
  for (std::size_t j = 0; j < n_list.size(); ++j) {
    std::vector<double> infidelity;
    for (long long t = 0; t < trials; ++t)
      infidelity.push_back(1.0 -
                           rows[j * static_cast<std::size_t>(trials) +
                                static_cast<std::size_t>(t)]
                               .fidelity);
    medians.push_back(dctc::median(infidelity));
  }

  bool non_increasing = true;
  for (std::size_t j = 1; j < medians.size(); ++j)
    if (medians[j] > medians[j - 1]) non_increasing = false;
  const double final_median = medians.back();
  const bool pass = non_increasing && final_median <= 1e-4;

  std::ostringstream detail;
  detail << "median 1-F by N:";
  for (std::size_t j = 0; j < medians.size(); ++j)
    detail << " " << n_list[j] << "->" << dctc::detail::fmt(medians[j]);
  detail << " non-increasing=" << (non_increasing ? "yes" : "no")
         << " final<=1e-4=" << (final_median <= 1e-4 ? "yes" : "no") << " (" << trials
         << " states per N)";
  report(6, "cloning-fidelity-convergence", pass, detail.str());
}

}  // namespace

int main() {
  dctc::CheckOptions opt;  // full statistics, pinned seed
  std::printf("acceptance gate: seed %llu, full statistics\n",
              static_cast<unsigned long long>(opt.seed));

  report(1, dctc::check_fixed_point_structure(opt));
  report(2, dctc::check_clone_readout(opt));
  report(3, dctc::check_decoherence(opt));
  report(4, dctc::check_coherent_variant(opt));
  report(5, dctc::check_tomography_round_trip(opt));
  run_convergence_sweep(opt);
  report(7, dctc::check_hoeffding_calibration(opt));
  report(8, dctc::check_dense_structured_equivalence(opt));
  report(9, dctc::check_state_discrimination(opt));
  report(10, dctc::check_nonlinearity_witness(opt));

  if (failures == 0)
    std::printf("all 10 criteria passed\n");
  else
    std::printf("%d criteria failed\n", failures);
  return failures;
}
