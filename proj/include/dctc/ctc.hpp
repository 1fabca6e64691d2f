#pragma once

// Self-consistent evolution through a unitary coupling a chronology-
// respecting system S to a looped register C.  Given the joint unitary U and
// an input state rho on S, the loop state must satisfy the fixed-point
// condition
//
//     sigma = Phi_rho(sigma) = Tr_S{ U (rho ⊗ sigma) U^dag },
//
// and the system then emerges as  Tr_C{ U (rho ⊗ sigma) U^dag }.  Phi_rho is
// completely positive and trace preserving for every rho, so a fixed point
// always exists; the induced map on system inputs is nonlinear because sigma
// depends on rho.
//
// Two solvers are provided: forward iteration of Phi_rho (cheap, converges
// in finitely many steps for the circuit families built in circuits.hpp) and
// a spectral method that diagonalizes the superoperator, reports the
// eigenvalue-1 multiplicity, and projects the maximally mixed state onto the
// fixed subspace (selecting a canonical fixed point when it is not unique).
//
// Phi_rho is evaluated without forming the joint S⊗C matrix.  With
// M = rho ⊗ sigma (entries known from the two factors through index tables)
// and a permutation unitary, (U M U^dag)(i, j) = M(P^{-1}(i), P^{-1}(j)), so
//
//     Phi(sigma)(c, c') = sum_s rho(sa, sa') * sigma(sb, sb'),
//
// with (sa, sb) the factor indices of P^{-1}(full(s, c)).  This costs
// O(dim_S * dim_C^2) and never allocates more than the result; the joint
// matrix for the larger circuit instances would not fit in memory.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "dctc/qmath.hpp"

namespace dctc {

inline constexpr double kFixedPointTol = 1e-12;
inline constexpr double kSpectralEigTol = 1e-9;

// Largest superoperator dimension (dim_C^2) the spectral solver will build.
inline constexpr Index kDefaultSuperopCap = 1024;

struct DctcInteraction {
  UnitaryOperator unitary;
  std::vector<std::string> s_labels;
  std::vector<std::string> c_labels;

  DctcInteraction(UnitaryOperator u, std::vector<std::string> s, std::vector<std::string> c)
      : unitary(std::move(u)), s_labels(std::move(s)), c_labels(std::move(c)) {
    if (s_labels.empty() || c_labels.empty())
      throw std::invalid_argument("DctcInteraction: both slot groups must be nonempty");
    const auto& layout = unitary.layout();
    std::vector<bool> seen(static_cast<std::size_t>(layout.num_slots()), false);
    auto mark = [&](const std::vector<std::string>& group) {
      for (const auto& label : group) {
        const Index slot = layout.slot_of(label);
        if (seen[static_cast<std::size_t>(slot)])
          throw std::invalid_argument("DctcInteraction: slot '" + label + "' assigned twice");
        seen[static_cast<std::size_t>(slot)] = true;
      }
    };
    mark(s_labels);
    mark(c_labels);
    for (Index slot = 0; slot < layout.num_slots(); ++slot)
      if (!seen[static_cast<std::size_t>(slot)])
        throw std::invalid_argument("DctcInteraction: slot '" + layout.label(slot) +
                                    "' belongs to neither group");
  }

  SubsystemLayout s_layout() const { return unitary.layout().subset(s_labels); }
  SubsystemLayout c_layout() const { return unitary.layout().subset(c_labels); }
};

namespace detail {

inline double trace_distance_raw(const ComplexMatrix& a, const ComplexMatrix& b) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a - b, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// Precomputed evaluator for Phi_rho and the system output map; build once per
// (interaction, rho) and reuse across iterations / superoperator columns.
class PhiEvaluator {
 public:
  PhiEvaluator(const DctcInteraction& ix, const DensityOperator& rho_s)
      : split_(GroupSplit::make(ix.unitary.layout(),
                                membership_flags(ix.unitary.layout(), ix.s_labels))),
        rho_(rho_s.matrix()),
        perm_(ix.unitary.is_permutation()) {
    if (rho_s.dim() != split_.dim_a)
      throw std::invalid_argument("PhiEvaluator: system state dimension " +
                                  std::to_string(rho_s.dim()) + " does not match interaction (" +
                                  std::to_string(split_.dim_a) + ")");
    if (perm_) {
      const std::vector<Index> inv = ix.unitary.permutation_inverse();
      src_a_.resize(static_cast<std::size_t>(split_.dim_full));
      src_b_.resize(static_cast<std::size_t>(split_.dim_full));
      for (Index i = 0; i < split_.dim_full; ++i) {
        const Index pre = inv[static_cast<std::size_t>(i)];
        src_a_[static_cast<std::size_t>(i)] = split_.a_of_full[static_cast<std::size_t>(pre)];
        src_b_[static_cast<std::size_t>(i)] = split_.b_of_full[static_cast<std::size_t>(pre)];
      }
    } else {
      u_ = ix.unitary.matrix();
    }
  }

  Index s_dim() const { return split_.dim_a; }
  Index c_dim() const { return split_.dim_b; }

  // Phi_rho(sigma) = Tr_S{ U (rho ⊗ sigma) U^dag }; sigma need not be a
  // state (the spectral solver pushes matrix units through).
  ComplexMatrix apply(const ComplexMatrix& sigma) const { return contract(sigma, /*keep_c=*/true); }

  // Tr_C{ U (rho ⊗ sigma) U^dag }.
  ComplexMatrix output(const ComplexMatrix& sigma) const { return contract(sigma, /*keep_c=*/false); }

 private:
  ComplexMatrix contract(const ComplexMatrix& sigma, bool keep_c) const {
    if (sigma.rows() != split_.dim_b || sigma.cols() != split_.dim_b)
      throw std::invalid_argument("PhiEvaluator: loop operator dimension mismatch");
    const Index ds = split_.dim_a, dc = split_.dim_b;
    const Index dk = keep_c ? dc : ds;      // kept index range
    const Index dt = keep_c ? ds : dc;      // traced index range
    ComplexMatrix out = ComplexMatrix::Zero(dk, dk);

    if (perm_) {
      std::vector<Index> ra(static_cast<std::size_t>(dk)), rb(static_cast<std::size_t>(dk));
      for (Index t = 0; t < dt; ++t) {
        for (Index k = 0; k < dk; ++k) {
          const Index full = keep_c ? split_.full_of(t, k) : split_.full_of(k, t);
          ra[static_cast<std::size_t>(k)] = src_a_[static_cast<std::size_t>(full)];
          rb[static_cast<std::size_t>(k)] = src_b_[static_cast<std::size_t>(full)];
        }
        for (Index k = 0; k < dk; ++k)
          for (Index k2 = 0; k2 < dk; ++k2)
            out(k, k2) += rho_(ra[static_cast<std::size_t>(k)], ra[static_cast<std::size_t>(k2)]) *
                          sigma(rb[static_cast<std::size_t>(k)], rb[static_cast<std::size_t>(k2)]);
      }
      return out;
    }

    // Dense path: assemble rho ⊗ sigma through the index tables (handles
    // interleaved slot orders), conjugate, then trace the other group.
    const Index d = split_.dim_full;
    ComplexMatrix joint(d, d);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j)
        joint(i, j) = rho_(split_.a_of_full[static_cast<std::size_t>(i)],
                           split_.a_of_full[static_cast<std::size_t>(j)]) *
                      sigma(split_.b_of_full[static_cast<std::size_t>(i)],
                            split_.b_of_full[static_cast<std::size_t>(j)]);
    joint = u_ * joint * u_.adjoint();
    for (Index t = 0; t < dt; ++t)
      for (Index k = 0; k < dk; ++k)
        for (Index k2 = 0; k2 < dk; ++k2) {
          const Index i = keep_c ? split_.full_of(t, k) : split_.full_of(k, t);
          const Index j = keep_c ? split_.full_of(t, k2) : split_.full_of(k2, t);
          out(k, k2) += joint(i, j);
        }
    return out;
  }

  GroupSplit split_;
  ComplexMatrix rho_;
  bool perm_ = false;
  std::vector<Index> src_a_, src_b_;  // factor indices of U^{-1}(basis)
  ComplexMatrix u_;
};

}  // namespace detail

enum class FixedPointMethod { iterate, spectral };

struct FixedPointResult {
  DensityOperator sigma;
  long long iterations = 0;
  double residual = 0.0;
  bool converged = false;
  FixedPointMethod method = FixedPointMethod::iterate;
  std::optional<Index> ev1_multiplicity;  // spectral solver only
  std::vector<double> residual_history;   // trace-distance defect per iteration
};

// One application of the loop map; the output is constructed through the
// validating DensityOperator path, checking that Phi_rho preserved the state
// invariants.
inline DensityOperator apply_phi(const DctcInteraction& ix, const DensityOperator& rho_s,
                                 const DensityOperator& sigma_c) {
  detail::PhiEvaluator eval(ix, rho_s);
  if (sigma_c.dim() != eval.c_dim())
    throw std::invalid_argument("apply_phi: loop state dimension mismatch");
  return DensityOperator(eval.apply(sigma_c.matrix()), ix.c_layout());
}

// System state exiting the interaction for a given loop state.
inline DensityOperator ctc_output(const DctcInteraction& ix, const DensityOperator& rho_s,
                                  const DensityOperator& sigma_c) {
  detail::PhiEvaluator eval(ix, rho_s);
  if (sigma_c.dim() != eval.c_dim())
    throw std::invalid_argument("ctc_output: loop state dimension mismatch");
  ComplexMatrix m = eval.output(sigma_c.matrix());
  m = 0.5 * (m + m.adjoint());
  return DensityOperator(std::move(m), ix.s_layout());
}

// Forward iteration sigma_k = Phi_rho^k(sigma_0) from sigma_0 (default: the
// maximally mixed loop state).  The defect of iterate k is the trace
// distance T(sigma_{k+1}, sigma_k); the solver stops at the first k >= 1
// whose defect is within tol and returns sigma_k.  On non-convergence the
// last iterate is returned with converged = false (no exception: oscillatory
// loop maps are legitimate inputs and the caller decides how to proceed).
inline FixedPointResult solve_fixed_point_iterate(
    const DctcInteraction& ix, const DensityOperator& rho_s,
    std::optional<DensityOperator> sigma0 = std::nullopt, double tol = kFixedPointTol,
    long long max_iter = -1) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_fixed_point_iterate: tol must be positive");
  detail::PhiEvaluator eval(ix, rho_s);
  const SubsystemLayout c_layout = ix.c_layout();
  const Index dc = eval.c_dim();
  if (max_iter < 0) max_iter = 10 * dc * dc + 100;

  ComplexMatrix cur;
  if (sigma0) {
    if (sigma0->dim() != dc)
      throw std::invalid_argument("solve_fixed_point_iterate: initial loop state dimension mismatch");
    cur = sigma0->matrix();
  } else {
    cur = ComplexMatrix::Identity(dc, dc) / static_cast<double>(dc);
  }

  std::vector<double> history;
  double defect = 0.0;
  long long k = 1;
  ComplexMatrix next = eval.apply(cur);  // sigma_1
  for (; k <= max_iter; ++k) {
    ComplexMatrix ahead = eval.apply(next);  // sigma_{k+1}
    defect = detail::trace_distance_raw(ahead, next);
    history.push_back(defect);
    if (defect <= tol) break;
    next = std::move(ahead);
  }
  const bool converged = defect <= tol && !history.empty();
  const long long iterations = converged ? k : max_iter;
  ComplexMatrix m = 0.5 * (next + next.adjoint());
  return FixedPointResult{DensityOperator(std::move(m), c_layout),
                          iterations,
                          defect,
                          converged,
                          FixedPointMethod::iterate,
                          std::nullopt,
                          std::move(history)};
}

// Spectral solver: builds the dc^2 x dc^2 superoperator of Phi_rho by
// pushing matrix units through the map, diagonalizes it, and reports how
// many eigenvalues lie within kSpectralEigTol of 1.  The returned state is
// the projection of the maximally mixed loop state onto the fixed subspace
// (Hermitized, renormalized, then projected to the nearest density
// operator), which selects a canonical fixed point when several exist.
inline FixedPointResult solve_fixed_point_spectral(const DctcInteraction& ix,
                                                   const DensityOperator& rho_s,
                                                   Index superop_cap = kDefaultSuperopCap) {
  detail::PhiEvaluator eval(ix, rho_s);
  const Index dc = eval.c_dim();
  if (dc * dc > superop_cap)
    throw CapExceededError("solve_fixed_point_spectral: superoperator dimension " +
                           std::to_string(dc * dc) + " exceeds cap " + std::to_string(superop_cap));
  const Index n = dc * dc;

  ComplexMatrix superop(n, n);
  ComplexMatrix unit = ComplexMatrix::Zero(dc, dc);
  for (Index k = 0; k < n; ++k) {
    const Index a = k % dc, b = k / dc;
    unit(a, b) = 1.0;
    const ComplexMatrix image = eval.apply(unit);
    superop.col(k) = Eigen::Map<const ComplexVector>(image.data(), n);
    unit(a, b) = 0.0;
  }

  Eigen::ComplexEigenSolver<ComplexMatrix> ces(superop);
  if (ces.info() != Eigen::Success)
    throw std::runtime_error("solve_fixed_point_spectral: eigensolver failed");

  std::vector<Index> fixed_cols;
  for (Index i = 0; i < n; ++i)
    if (std::abs(ces.eigenvalues()[i] - Complex(1.0, 0.0)) <= kSpectralEigTol)
      fixed_cols.push_back(i);
  if (fixed_cols.empty())
    throw std::runtime_error(
        "solve_fixed_point_spectral: no eigenvalue near 1; the loop map of a unitary interaction "
        "is trace preserving and must have one (numerical corruption)");

  ComplexMatrix basis(n, static_cast<Index>(fixed_cols.size()));
  for (std::size_t j = 0; j < fixed_cols.size(); ++j)
    basis.col(static_cast<Index>(j)) = ces.eigenvectors().col(fixed_cols[j]);
  Eigen::HouseholderQR<ComplexMatrix> qr(basis);
  const ComplexMatrix q =
      qr.householderQ() * ComplexMatrix::Identity(n, static_cast<Index>(fixed_cols.size()));

  ComplexVector pi_vec = ComplexVector::Zero(n);
  for (Index i = 0; i < dc; ++i) pi_vec[i + i * dc] = 1.0 / static_cast<double>(dc);
  const ComplexVector proj = q * (q.adjoint() * pi_vec);

  ComplexMatrix fixed = Eigen::Map<const ComplexMatrix>(proj.data(), dc, dc);
  fixed = 0.5 * (fixed + fixed.adjoint());
  const double tr = fixed.trace().real();
  if (!(std::abs(tr) > 1e-14))
    throw std::runtime_error("solve_fixed_point_spectral: fixed subspace projection has zero trace");
  fixed /= tr;

  DensityOperator sigma = nearest_density_operator(fixed, ix.c_layout());
  const double defect = detail::trace_distance_raw(eval.apply(sigma.matrix()), sigma.matrix());
  return FixedPointResult{std::move(sigma),
                          0,
                          defect,
                          defect <= 10.0 * kSpectralEigTol,
                          FixedPointMethod::spectral,
                          static_cast<Index>(fixed_cols.size()),
                          {defect}};
}

}  // namespace dctc
