#pragma once

// Positive operator-valued measures, the induced measurement (dephasing)
// channel, linear-inversion state reconstruction, and a coherent dilation of
// the measurement into a unitary on system + pointer.

#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dctc/io.hpp"
#include "dctc/qmath.hpp"
#include "dctc/rng.hpp"

namespace dctc {

// ---------------------------------------------------------------------------
// Povm
// ---------------------------------------------------------------------------

class Povm {
 public:
  // Validates: at least one effect, all square of equal dimension, Hermitian
  // and positive semidefinite within tolerance, summing to the identity.
  explicit Povm(std::vector<ComplexMatrix> effects) : effects_(std::move(effects)) {
    if (effects_.empty()) throw std::invalid_argument("Povm: no effects");
    const Index d = effects_[0].rows();
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (const auto& e : effects_) {
      if (e.rows() != d || e.cols() != d)
        throw std::invalid_argument("Povm: effects have inconsistent dimensions");
      if (!e.allFinite()) throw std::invalid_argument("Povm: non-finite effect entries");
      if (detail::hermitian_defect(e) > kHermitianTol)
        throw std::invalid_argument("Povm: effect not Hermitian");
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(e, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -kPsdTol)
        throw std::invalid_argument("Povm: effect has negative eigenvalue " +
                                    std::to_string(es.eigenvalues().minCoeff()));
      sum += e;
    }
    const double defect = (sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
    if (defect > kTraceTol)
      throw std::invalid_argument("Povm: effects do not sum to identity (defect " +
                                  std::to_string(defect) + ")");
  }

  Index d_in() const { return effects_[0].rows(); }
  Index d_out() const { return static_cast<Index>(effects_.size()); }
  const ComplexMatrix& effect(Index x) const { return effects_.at(static_cast<std::size_t>(x)); }
  const std::vector<ComplexMatrix>& effects() const { return effects_; }

 private:
  std::vector<ComplexMatrix> effects_;
};

namespace detail {

// Column-major vectorization; Tr(M rho) = <vec M, vec rho> under the
// Frobenius inner product.
inline ComplexVector vectorize(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

inline ComplexMatrix unvectorize(const ComplexVector& v, Index d) {
  return Eigen::Map<const ComplexMatrix>(v.data(), d, d);
}

// Rows are conjugated vectorized effects, so that  A vec(rho) = p.
inline ComplexMatrix effect_matrix(const Povm& p) {
  const Index d = p.d_in();
  ComplexMatrix a(p.d_out(), d * d);
  for (Index x = 0; x < p.d_out(); ++x) a.row(x) = vectorize(p.effect(x)).conjugate().transpose();
  return a;
}

inline ComplexMatrix hermitian_sqrt(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
  const ComplexVector w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cast<Complex>();
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

// Number of linearly independent effects: rank of the d_out x d_in^2 matrix
// of vectorized effects, counting singular values above 1e-9 * sigma_max.
inline Index completeness_rank(const Povm& p) {
  Eigen::JacobiSVD<ComplexMatrix> svd(detail::effect_matrix(p));
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double cutoff = 1e-9 * sv[0];
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) ++rank;
  return rank;
}

// Informationally complete: the effects span the full operator space, so the
// outcome distribution determines the state.
inline bool is_informationally_complete(const Povm& p) {
  return completeness_rank(p) == p.d_in() * p.d_in();
}

// Outcome distribution p_x = Tr(M_x rho); entries clipped at zero against
// roundoff.  Sums to 1 by the completeness of the effects.
inline RealVector outcome_probabilities(const Povm& p, const DensityOperator& rho) {
  if (rho.dim() != p.d_in())
    throw std::invalid_argument("outcome_probabilities: state dimension does not match effects");
  RealVector probs(p.d_out());
  for (Index x = 0; x < p.d_out(); ++x) {
    const double v = (p.effect(x) * rho.matrix()).trace().real();
    if (v < -1e-9) throw std::invalid_argument("outcome_probabilities: negative probability " +
                                               std::to_string(v));
    probs[x] = std::max(0.0, v);
  }
  return probs;
}

// The measurement channel: rho |-> sum_x Tr(M_x rho) |x><x| on a fresh
// pointer register of dimension d_out.  For an informationally complete POVM
// this is injective on states; otherwise a note is emitted (not an error).
inline DensityOperator measurement_map(const Povm& p, const DensityOperator& rho,
                                       const std::string& label = "X") {
  if (!is_informationally_complete(p))
    std::cerr << "[dctc] note: measurement_map applied with an informationally incomplete POVM\n";
  const RealVector probs = outcome_probabilities(p, rho);
  ComplexMatrix m = ComplexMatrix::Zero(p.d_out(), p.d_out());
  for (Index x = 0; x < p.d_out(); ++x) m(x, x) = probs[x];
  return DensityOperator::unchecked(std::move(m), SubsystemLayout::single(p.d_out(), label));
}

// ---------------------------------------------------------------------------
// Linear-inversion reconstruction
// ---------------------------------------------------------------------------

struct ReconstructionFrame {
  Povm povm;
  ComplexMatrix pinv;  // d_in^2 x d_out pseudoinverse of the effect matrix
};

// Requires an informationally complete POVM; the Moore-Penrose pseudoinverse
// of the effect matrix then inverts  p = A vec(rho)  exactly on true outcome
// distributions.
inline ReconstructionFrame build_frame(const Povm& p) {
  if (!is_informationally_complete(p))
    throw std::invalid_argument("build_frame: POVM is not informationally complete (rank " +
                                std::to_string(completeness_rank(p)) + " < " +
                                std::to_string(p.d_in() * p.d_in()) + ")");
  const ComplexMatrix a = detail::effect_matrix(p);
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  ComplexVector inv_sv(sv.size());
  const double cutoff = 1e-12 * sv[0];
  for (Index i = 0; i < sv.size(); ++i) inv_sv[i] = sv[i] > cutoff ? 1.0 / sv[i] : 0.0;
  ComplexMatrix pinv = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().adjoint();
  return ReconstructionFrame{p, std::move(pinv)};
}

// Estimate a state from empirical outcome frequencies: linear inversion, then
// projection to the nearest density operator.  Small negative frequencies are
// clipped; the vector must sum to 1 within 1e-6.
inline DensityOperator reconstruct(const ReconstructionFrame& frame, const RealVector& freqs,
                                   std::string label = "S") {
  if (freqs.size() != frame.povm.d_out())
    throw std::invalid_argument("reconstruct: frequency vector length does not match POVM");
  RealVector f = freqs.cwiseMax(0.0);
  const double total = f.sum();
  if (std::abs(total - 1.0) > 1e-6)
    throw std::invalid_argument("reconstruct: frequencies sum to " + std::to_string(total));
  f /= total;
  const ComplexVector x = frame.pinv * f.cast<Complex>();
  const Index d = frame.povm.d_in();
  return nearest_density_operator(detail::unvectorize(x, d),
                                  SubsystemLayout::single(d, std::move(label)));
}

// ---------------------------------------------------------------------------
// Standard POVMs
// ---------------------------------------------------------------------------

// Symmetric informationally complete qubit POVM: M_x = (I + v_x . sigma)/4
// with the four tetrahedral Bloch vectors.  Pairwise Tr(M_j M_k) = 1/12.
inline Povm sic_qubit() {
  const double s = 1.0 / std::sqrt(3.0);
  const double vecs[4][3] = {
      {s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  std::vector<ComplexMatrix> effects;
  effects.reserve(4);
  for (const auto& v : vecs) {
    ComplexMatrix m(2, 2);
    m(0, 0) = Complex(1.0 + v[2], 0.0);
    m(0, 1) = Complex(v[0], -v[1]);
    m(1, 0) = Complex(v[0], v[1]);
    m(1, 1) = Complex(1.0 - v[2], 0.0);
    effects.push_back(0.25 * m);
  }
  return Povm(std::move(effects));
}

// Random informationally complete POVM with d^2 outcomes: d^2 random rank-1
// positives G_x conjugated by S^{-1/2}, S = sum_x G_x, which enforces
// sum_x M_x = I.  Retries (bounded) in the measure-zero event the frame is
// rank deficient.
inline Povm random_ic_povm(Index d, Rng& rng) {
  if (d < 2) throw std::invalid_argument("random_ic_povm: dimension must be >= 2");
  for (int attempt = 0; attempt < 16; ++attempt) {
    std::vector<ComplexMatrix> g;
    g.reserve(static_cast<std::size_t>(d * d));
    ComplexMatrix s = ComplexMatrix::Zero(d, d);
    for (Index x = 0; x < d * d; ++x) {
      ComplexVector ket(d);
      for (Index i = 0; i < d; ++i) ket[i] = Complex(rng.gaussian(), rng.gaussian());
      ComplexMatrix gx = ket * ket.adjoint();
      s += gx;
      g.push_back(std::move(gx));
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s);
    if (es.eigenvalues().minCoeff() < 1e-9 * es.eigenvalues().maxCoeff()) continue;
    const ComplexVector w = es.eigenvalues().cwiseInverse().cwiseSqrt().cast<Complex>();
    const ComplexMatrix s_inv_sqrt = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
    std::vector<ComplexMatrix> effects;
    effects.reserve(g.size());
    for (const auto& gx : g) {
      ComplexMatrix m = s_inv_sqrt * gx * s_inv_sqrt;
      effects.push_back(0.5 * (m + m.adjoint()));
    }
    Povm p(std::move(effects));
    if (is_informationally_complete(p)) return p;
  }
  throw std::runtime_error("random_ic_povm: failed to produce an informationally complete POVM");
}

inline Povm random_ic_povm(Index d, std::uint64_t seed) {
  Rng rng(seed);
  return random_ic_povm(d, rng);
}

// ---------------------------------------------------------------------------
// Coherent dilation
// ---------------------------------------------------------------------------

// Unitary on carrier (dimension d_in, slot "E") x pointer (dimension d_out,
// slot "B") acting as  U |psi>|0> = sum_x (sqrt(M_x) |psi>) |x>.  Tracing out
// the carrier after dephasing the pointer reproduces measurement_map.  The
// remaining columns are completed to a unitary via QR.
inline UnitaryOperator stinespring_unitary(const Povm& p) {
  const Index d_in = p.d_in();
  const Index d_out = p.d_out();
  const Index dim = d_in * d_out;
  std::vector<ComplexMatrix> roots;
  roots.reserve(static_cast<std::size_t>(d_out));
  for (Index x = 0; x < d_out; ++x) roots.push_back(detail::hermitian_sqrt(p.effect(x)));

  // Isometry columns for inputs |e>|0>; index (e', x) -> e' * d_out + x.
  ComplexMatrix w(dim, d_in);
  for (Index e = 0; e < d_in; ++e)
    for (Index x = 0; x < d_out; ++x)
      for (Index ep = 0; ep < d_in; ++ep) w(ep * d_out + x, e) = roots[static_cast<std::size_t>(x)](ep, e);

  Eigen::HouseholderQR<ComplexMatrix> qr(w);
  const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);

  ComplexMatrix u(dim, dim);
  Index next_spare = d_in;  // columns of q beyond the range of w
  for (Index e = 0; e < d_in; ++e)
    for (Index b = 0; b < d_out; ++b) {
      const Index col = e * d_out + b;
      if (b == 0)
        u.col(col) = w.col(e);
      else
        u.col(col) = q.col(next_spare++);
    }
  return UnitaryOperator(std::move(u), SubsystemLayout({d_in, d_out}, {"E", "B"}));
}

// ---------------------------------------------------------------------------
// Serialization (matrix text blocks, one per effect)
// ---------------------------------------------------------------------------

inline void write_povm(std::ostream& out, const Povm& p) {
  out << "povm " << p.d_out() << '\n';
  for (Index x = 0; x < p.d_out(); ++x) write_matrix(out, p.effect(x));
}

inline Povm read_povm(std::istream& in) {
  std::string tag;
  Index count = 0;
  if (!(in >> tag >> count) || tag != "povm" || count < 1)
    throw std::runtime_error("read_povm: bad header");
  std::vector<ComplexMatrix> effects;
  effects.reserve(static_cast<std::size_t>(count));
  for (Index x = 0; x < count; ++x) effects.push_back(read_matrix(in));
  return Povm(std::move(effects));
}

inline std::string povm_to_text(const Povm& p) {
  std::ostringstream oss;
  write_povm(oss, p);
  return oss.str();
}

inline Povm povm_from_text(const std::string& text) {
  std::istringstream iss(text);
  return read_povm(iss);
}

}  // namespace dctc
