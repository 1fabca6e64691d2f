#pragma once

// Core finite-dimensional quantum linear algebra on labeled tensor products.
//
// States are density operators (Hermitian, positive semidefinite, unit trace)
// over an explicit SubsystemLayout that names each tensor slot.  Indexing is
// row-major with the leftmost slot most significant: for dims (d_0,...,d_k),
// basis index  i = sum_j digit_j * stride_j  with  stride_j = prod_{l>j} d_l.
// Eigen's kroneckerProduct(A, B) follows the same convention (A on the more
// significant slot), so tensor_product(a, b) concatenates layouts left to
// right.
//
// Unitaries carry a dual representation: a dense matrix, a basis permutation
// (U|j> = |image[j]>), or both.  Permutations are what the circuit layer
// produces, and every operation here (conjugation, composition, partial
// traces of conjugated products) has an O(D^2)-or-better fast path for them;
// dense matrices of the same dimension would cost O(D^3) and, for the larger
// circuit instances, could not even be stored.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dctc/rng.hpp"

namespace dctc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Library-wide numerical tolerances.  Validation thresholds are 1e-10: loose
// enough that double-precision arithmetic on well-formed inputs never trips
// them, tight enough to catch genuine defects.
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kUnitaryTol = 1e-10;

// Full positive-semidefiniteness checks (an eigendecomposition) are skipped
// above this dimension; only the necessary diagonal condition is checked.
inline constexpr Index kEigencheckMaxDim = 600;

// Largest dimension at which a permutation unitary may be materialized dense.
inline constexpr Index kMaterializeCap = 2048;

// Default ceiling on total Hilbert-space dimension for dense circuit builds;
// callers may raise it explicitly.
inline constexpr Index kDefaultDenseCap = 8192;

// Thrown when a requested construction would exceed a dimension cap.
class CapExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// SubsystemLayout
// ---------------------------------------------------------------------------

class SubsystemLayout {
 public:
  SubsystemLayout(std::vector<Index> dims, std::vector<std::string> labels)
      : dims_(std::move(dims)), labels_(std::move(labels)) {
    if (dims_.empty()) throw std::invalid_argument("SubsystemLayout: at least one slot required");
    if (dims_.size() != labels_.size())
      throw std::invalid_argument("SubsystemLayout: dims/labels size mismatch");
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      if (dims_[i] < 1) throw std::invalid_argument("SubsystemLayout: slot dimension must be >= 1");
      if (labels_[i].empty()) throw std::invalid_argument("SubsystemLayout: empty slot label");
      for (std::size_t j = i + 1; j < labels_.size(); ++j)
        if (labels_[i] == labels_[j])
          throw std::invalid_argument("SubsystemLayout: duplicate slot label '" + labels_[i] + "'");
    }
  }

  static SubsystemLayout single(Index dim, std::string label = "S") {
    return SubsystemLayout({dim}, {std::move(label)});
  }

  Index num_slots() const { return static_cast<Index>(dims_.size()); }

  Index total_dim() const {
    Index d = 1;
    for (Index dim : dims_) d *= dim;
    return d;
  }

  Index dim(Index slot) const { return dims_.at(static_cast<std::size_t>(slot)); }
  const std::string& label(Index slot) const { return labels_.at(static_cast<std::size_t>(slot)); }
  const std::vector<Index>& dims() const { return dims_; }
  const std::vector<std::string>& labels() const { return labels_; }

  bool has(const std::string& label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
  }

  Index slot_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end())
      throw std::invalid_argument("SubsystemLayout: unknown slot label '" + label + "'");
    return static_cast<Index>(it - labels_.begin());
  }

  // Row-major strides; stride(i) = product of dims of slots right of i.
  std::vector<Index> strides() const {
    std::vector<Index> s(dims_.size(), 1);
    for (std::size_t i = dims_.size(); i-- > 1;) s[i - 1] = s[i] * dims_[i];
    return s;
  }

  // Sub-layout of the named slots, preserving this layout's slot order.
  SubsystemLayout subset(const std::vector<std::string>& keep) const {
    std::vector<Index> d;
    std::vector<std::string> l;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (std::find(keep.begin(), keep.end(), labels_[i]) != keep.end()) {
        d.push_back(dims_[i]);
        l.push_back(labels_[i]);
      }
    }
    for (const auto& k : keep)
      if (!has(k)) throw std::invalid_argument("SubsystemLayout: unknown slot label '" + k + "'");
    return SubsystemLayout(std::move(d), std::move(l));
  }

  SubsystemLayout concat(const SubsystemLayout& other) const {
    std::vector<Index> d = dims_;
    std::vector<std::string> l = labels_;
    d.insert(d.end(), other.dims_.begin(), other.dims_.end());
    l.insert(l.end(), other.labels_.begin(), other.labels_.end());
    return SubsystemLayout(std::move(d), std::move(l));
  }

  friend bool operator==(const SubsystemLayout& a, const SubsystemLayout& b) {
    return a.dims_ == b.dims_ && a.labels_ == b.labels_;
  }

 private:
  std::vector<Index> dims_;
  std::vector<std::string> labels_;
};

namespace detail {

// Index bookkeeping for a bipartition of a layout's slots into group A and
// group B.  A full basis index decomposes as  i = embed_a[a] + embed_b[b]
// where a, b are row-major indices within each group's sub-layout; the
// inverse maps are a_of_full / b_of_full.  All tables are built in one
// O(D * num_slots) pass and shared by partial traces, slot decoherence, and
// the fixed-point evaluator.
struct GroupSplit {
  Index dim_a = 1;
  Index dim_b = 1;
  Index dim_full = 1;
  std::vector<Index> a_of_full;
  std::vector<Index> b_of_full;
  std::vector<Index> embed_a;
  std::vector<Index> embed_b;

  static GroupSplit make(const SubsystemLayout& layout, const std::vector<bool>& in_a) {
    if (static_cast<Index>(in_a.size()) != layout.num_slots())
      throw std::invalid_argument("GroupSplit: membership flags do not match slot count");
    GroupSplit g;
    const Index n = layout.num_slots();
    for (Index s = 0; s < n; ++s) (in_a[static_cast<std::size_t>(s)] ? g.dim_a : g.dim_b) *= layout.dim(s);
    g.dim_full = layout.total_dim();
    g.a_of_full.assign(static_cast<std::size_t>(g.dim_full), 0);
    g.b_of_full.assign(static_cast<std::size_t>(g.dim_full), 0);
    g.embed_a.assign(static_cast<std::size_t>(g.dim_a), 0);
    g.embed_b.assign(static_cast<std::size_t>(g.dim_b), 0);

    const std::vector<Index> strides = layout.strides();
    for (Index i = 0; i < g.dim_full; ++i) {
      Index a = 0, b = 0;
      for (Index s = 0; s < n; ++s) {
        const Index digit = (i / strides[static_cast<std::size_t>(s)]) % layout.dim(s);
        if (in_a[static_cast<std::size_t>(s)])
          a = a * layout.dim(s) + digit;
        else
          b = b * layout.dim(s) + digit;
      }
      g.a_of_full[static_cast<std::size_t>(i)] = a;
      g.b_of_full[static_cast<std::size_t>(i)] = b;
      if (b == 0) g.embed_a[static_cast<std::size_t>(a)] = i;
      if (a == 0) g.embed_b[static_cast<std::size_t>(b)] = i;
    }
    return g;
  }

  Index full_of(Index a, Index b) const {
    return embed_a[static_cast<std::size_t>(a)] + embed_b[static_cast<std::size_t>(b)];
  }
};

inline std::vector<bool> membership_flags(const SubsystemLayout& layout,
                                          const std::vector<std::string>& group) {
  std::vector<bool> in(static_cast<std::size_t>(layout.num_slots()), false);
  for (const auto& label : group) in[static_cast<std::size_t>(layout.slot_of(label))] = true;
  return in;
}

inline double hermitian_defect(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// DensityOperator
// ---------------------------------------------------------------------------

class DensityOperator {
 public:
  // Validating constructor: Hermitian within kHermitianTol, unit trace within
  // kTraceTol, positive semidefinite within kPsdTol (full eigenvalue check up
  // to kEigencheckMaxDim, diagonal check above).
  DensityOperator(ComplexMatrix matrix, SubsystemLayout layout)
      : matrix_(std::move(matrix)), layout_(std::move(layout)) {
    check_shape();
    if (!matrix_.allFinite()) throw std::invalid_argument("DensityOperator: non-finite entries");
    const double herm = detail::hermitian_defect(matrix_);
    if (herm > kHermitianTol)
      throw std::invalid_argument("DensityOperator: not Hermitian (defect " + std::to_string(herm) + ")");
    const double tr_err = std::abs(matrix_.trace() - Complex(1.0, 0.0));
    if (tr_err > kTraceTol)
      throw std::invalid_argument("DensityOperator: trace differs from 1 by " + std::to_string(tr_err));
    if (matrix_.rows() <= kEigencheckMaxDim) {
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(matrix_, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -kPsdTol)
        throw std::invalid_argument("DensityOperator: negative eigenvalue " +
                                    std::to_string(es.eigenvalues().minCoeff()));
    } else {
      for (Index i = 0; i < matrix_.rows(); ++i)
        if (matrix_(i, i).real() < -kPsdTol)
          throw std::invalid_argument("DensityOperator: negative diagonal entry");
    }
  }

  // Fast path for internal operations that preserve the invariants exactly;
  // only the shape is checked.
  static DensityOperator unchecked(ComplexMatrix matrix, SubsystemLayout layout) {
    DensityOperator rho(Unchecked{}, std::move(matrix), std::move(layout));
    rho.check_shape();
    return rho;
  }

  const ComplexMatrix& matrix() const { return matrix_; }
  const SubsystemLayout& layout() const { return layout_; }
  Index dim() const { return matrix_.rows(); }

  double purity() const { return (matrix_ * matrix_).trace().real(); }

  RealVector diagonal_real() const { return matrix_.diagonal().real(); }

 private:
  struct Unchecked {};
  DensityOperator(Unchecked, ComplexMatrix matrix, SubsystemLayout layout)
      : matrix_(std::move(matrix)), layout_(std::move(layout)) {}

  void check_shape() const {
    if (matrix_.rows() != matrix_.cols())
      throw std::invalid_argument("DensityOperator: matrix not square");
    if (matrix_.rows() != layout_.total_dim())
      throw std::invalid_argument("DensityOperator: matrix dimension " +
                                  std::to_string(matrix_.rows()) + " does not match layout dimension " +
                                  std::to_string(layout_.total_dim()));
  }

  ComplexMatrix matrix_;
  SubsystemLayout layout_;
};

inline DensityOperator maximally_mixed(const SubsystemLayout& layout) {
  const Index d = layout.total_dim();
  return DensityOperator::unchecked(ComplexMatrix::Identity(d, d) / static_cast<double>(d), layout);
}

inline DensityOperator pure_state(const ComplexVector& ket, SubsystemLayout layout) {
  const double norm = ket.norm();
  if (std::abs(norm - 1.0) > 1e-9) throw std::invalid_argument("pure_state: ket not normalized");
  return DensityOperator(ket * ket.adjoint(), std::move(layout));
}

inline DensityOperator basis_state(Index k, SubsystemLayout layout) {
  ComplexVector ket = ComplexVector::Zero(layout.total_dim());
  if (k < 0 || k >= layout.total_dim()) throw std::invalid_argument("basis_state: index out of range");
  ket[k] = 1.0;
  return pure_state(ket, std::move(layout));
}

// ---------------------------------------------------------------------------
// UnitaryOperator
// ---------------------------------------------------------------------------

class UnitaryOperator {
 public:
  // Dense constructor; validates unitarity.  If the matrix is exactly a
  // basis permutation the permutation image is extracted so fast paths apply.
  UnitaryOperator(ComplexMatrix matrix, SubsystemLayout layout)
      : dense_(std::move(matrix)), layout_(std::move(layout)) {
    if (dense_.rows() != dense_.cols()) throw std::invalid_argument("UnitaryOperator: matrix not square");
    if (dense_.rows() != layout_.total_dim())
      throw std::invalid_argument("UnitaryOperator: matrix dimension does not match layout");
    if (!dense_.allFinite()) throw std::invalid_argument("UnitaryOperator: non-finite entries");
    const double defect =
        (dense_.adjoint() * dense_ - ComplexMatrix::Identity(dense_.rows(), dense_.cols()))
            .cwiseAbs()
            .maxCoeff();
    if (defect > kUnitaryTol)
      throw std::invalid_argument("UnitaryOperator: unitarity defect " + std::to_string(defect));
    detect_permutation();
  }

  // Permutation constructor: U|j> = |image[j]>.  No dense matrix is stored.
  static UnitaryOperator permutation(std::vector<Index> image, SubsystemLayout layout) {
    const Index d = layout.total_dim();
    if (static_cast<Index>(image.size()) != d)
      throw std::invalid_argument("UnitaryOperator: permutation image size does not match layout");
    std::vector<bool> seen(static_cast<std::size_t>(d), false);
    for (Index v : image) {
      if (v < 0 || v >= d || seen[static_cast<std::size_t>(v)])
        throw std::invalid_argument("UnitaryOperator: image is not a permutation");
      seen[static_cast<std::size_t>(v)] = true;
    }
    return UnitaryOperator(std::move(image), std::move(layout));
  }

  static UnitaryOperator identity(SubsystemLayout layout) {
    std::vector<Index> image(static_cast<std::size_t>(layout.total_dim()));
    std::iota(image.begin(), image.end(), Index{0});
    return permutation(std::move(image), std::move(layout));
  }

  const SubsystemLayout& layout() const { return layout_; }
  Index dim() const { return layout_.total_dim(); }

  bool is_permutation() const { return image_.has_value(); }
  bool has_dense() const { return dense_.size() > 0; }

  const std::vector<Index>& permutation_image() const {
    if (!image_) throw std::logic_error("UnitaryOperator: no permutation representation");
    return *image_;
  }

  std::vector<Index> permutation_inverse() const {
    const auto& img = permutation_image();
    std::vector<Index> inv(img.size());
    for (std::size_t j = 0; j < img.size(); ++j) inv[static_cast<std::size_t>(img[j])] = static_cast<Index>(j);
    return inv;
  }

  // Dense matrix, materializing from the permutation image if necessary.
  const ComplexMatrix& matrix() const {
    if (dense_.size() == 0) {
      const Index d = dim();
      if (d > kMaterializeCap)
        throw CapExceededError("UnitaryOperator: dense materialization of dimension " +
                               std::to_string(d) + " exceeds cap " + std::to_string(kMaterializeCap));
      dense_ = ComplexMatrix::Zero(d, d);
      for (Index j = 0; j < d; ++j) dense_((*image_)[static_cast<std::size_t>(j)], j) = 1.0;
    }
    return dense_;
  }

  UnitaryOperator adjoint() const {
    if (image_) {
      std::vector<Index> inv = permutation_inverse();
      return permutation(std::move(inv), layout_);
    }
    return UnitaryOperator(dense_.adjoint(), layout_);
  }

 private:
  UnitaryOperator(std::vector<Index> image, SubsystemLayout layout)
      : layout_(std::move(layout)), image_(std::move(image)) {}

  void detect_permutation() {
    const Index d = dense_.rows();
    std::vector<Index> image(static_cast<std::size_t>(d), -1);
    for (Index j = 0; j < d; ++j) {
      Index hit = -1;
      for (Index i = 0; i < d; ++i) {
        const Complex v = dense_(i, j);
        if (std::abs(v - Complex(1.0, 0.0)) <= 1e-12) {
          if (hit >= 0) return;
          hit = i;
        } else if (std::abs(v) > 1e-12) {
          return;
        }
      }
      if (hit < 0) return;
      image[static_cast<std::size_t>(j)] = hit;
    }
    image_ = std::move(image);
  }

  mutable ComplexMatrix dense_;
  SubsystemLayout layout_;
  std::optional<std::vector<Index>> image_;
};

// second * first (apply `first`, then `second`).
inline UnitaryOperator compose(const UnitaryOperator& second, const UnitaryOperator& first) {
  if (second.dim() != first.dim())
    throw std::invalid_argument("compose: dimension mismatch");
  if (second.is_permutation() && first.is_permutation()) {
    const auto& s = second.permutation_image();
    const auto& f = first.permutation_image();
    std::vector<Index> image(f.size());
    for (std::size_t j = 0; j < f.size(); ++j)
      image[j] = s[static_cast<std::size_t>(f[j])];
    return UnitaryOperator::permutation(std::move(image), second.layout());
  }
  return UnitaryOperator(second.matrix() * first.matrix(), second.layout());
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

inline ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator::unchecked(tensor_product(a.matrix(), b.matrix()),
                                    a.layout().concat(b.layout()));
}

inline DensityOperator apply_unitary(const DensityOperator& rho, const UnitaryOperator& u) {
  if (rho.dim() != u.dim()) throw std::invalid_argument("apply_unitary: dimension mismatch");
  if (u.is_permutation()) {
    const std::vector<Index> inv = u.permutation_inverse();
    const Index d = rho.dim();
    ComplexMatrix out(d, d);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j)
        out(i, j) = rho.matrix()(inv[static_cast<std::size_t>(i)], inv[static_cast<std::size_t>(j)]);
    return DensityOperator::unchecked(std::move(out), rho.layout());
  }
  return DensityOperator::unchecked(u.matrix() * rho.matrix() * u.matrix().adjoint(), rho.layout());
}

// Partial trace keeping the named slots (result keeps this layout's order).
inline DensityOperator partial_trace(const DensityOperator& rho,
                                     const std::vector<std::string>& keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: must keep at least one slot");
  const auto flags = detail::membership_flags(rho.layout(), keep);
  if (std::all_of(flags.begin(), flags.end(), [](bool b) { return b; }))
    return DensityOperator::unchecked(rho.matrix(), rho.layout());
  const auto g = detail::GroupSplit::make(rho.layout(), flags);
  ComplexMatrix out = ComplexMatrix::Zero(g.dim_a, g.dim_a);
  for (Index a = 0; a < g.dim_a; ++a)
    for (Index a2 = 0; a2 < g.dim_a; ++a2) {
      Complex acc = 0.0;
      for (Index b = 0; b < g.dim_b; ++b) acc += rho.matrix()(g.full_of(a, b), g.full_of(a2, b));
      out(a, a2) = acc;
    }
  return DensityOperator::unchecked(std::move(out), rho.layout().subset(keep));
}

// Trace distance  T(a, b) = (1/2) * sum |eig(a - b)|.
inline double trace_distance(const DensityOperator& a, const DensityOperator& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.matrix() - b.matrix(), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// Uhlmann fidelity  F(a, b) = (Tr sqrt(sqrt(a) b sqrt(a)))^2; symmetric, in
// [0, 1], and equal to overlap <psi|b|psi> when a = |psi><psi|.
inline double fidelity(const DensityOperator& a, const DensityOperator& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> ea(a.matrix());
  const ComplexVector w = ea.eigenvalues().cwiseMax(0.0).cwiseSqrt().cast<Complex>();
  const ComplexMatrix sqrt_a = ea.eigenvectors() * w.asDiagonal() * ea.eigenvectors().adjoint();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> em(sqrt_a * b.matrix() * sqrt_a,
                                                  Eigen::EigenvaluesOnly);
  const double root_sum = em.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::min(1.0, root_sum * root_sum);
}

// Euclidean projection of a real vector onto the probability simplex.
inline RealVector simplex_project(const RealVector& v) {
  const Index n = v.size();
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  Index k = 0;
  for (Index i = 0; i < n; ++i) {
    cum += sorted[static_cast<std::size_t>(i)];
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (sorted[static_cast<std::size_t>(i)] - t > 0.0) {
      theta = t;
      k = i + 1;
    }
  }
  (void)k;
  return (v.array() - theta).cwiseMax(0.0);
}

// Nearest density operator in Frobenius norm: Hermitian part, then eigenvalue
// projection onto the probability simplex.
inline DensityOperator nearest_density_operator(const ComplexMatrix& m, SubsystemLayout layout) {
  if (m.rows() != m.cols()) throw std::invalid_argument("nearest_density_operator: matrix not square");
  if (m.rows() != layout.total_dim())
    throw std::invalid_argument("nearest_density_operator: dimension does not match layout");
  if (!m.allFinite()) throw std::invalid_argument("nearest_density_operator: non-finite entries");
  const ComplexMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm);
  const ComplexVector w = simplex_project(es.eigenvalues()).cast<Complex>();
  ComplexMatrix out = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
  out = 0.5 * (out + out.adjoint());
  return DensityOperator(std::move(out), std::move(layout));
}

inline DensityOperator nearest_density_operator(const ComplexMatrix& m) {
  return nearest_density_operator(m, SubsystemLayout::single(m.rows()));
}

// ---------------------------------------------------------------------------
// Qubit helpers
// ---------------------------------------------------------------------------

inline ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

inline ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// Qubit state (I + r . sigma)/2; |r| <= 1 required, |r| = 1 is pure.
inline DensityOperator bloch_state(double rx, double ry, double rz, std::string label = "S") {
  const double r = std::sqrt(rx * rx + ry * ry + rz * rz);
  if (r > 1.0 + 1e-12) throw std::invalid_argument("bloch_state: Bloch vector norm exceeds 1");
  ComplexMatrix m(2, 2);
  m(0, 0) = Complex(0.5 * (1.0 + rz), 0.0);
  m(0, 1) = Complex(0.5 * rx, -0.5 * ry);
  m(1, 0) = Complex(0.5 * rx, 0.5 * ry);
  m(1, 1) = Complex(0.5 * (1.0 - rz), 0.0);
  return DensityOperator(std::move(m), SubsystemLayout::single(2, std::move(label)));
}

// ---------------------------------------------------------------------------
// Random objects (deterministic in the supplied generator)
// ---------------------------------------------------------------------------

inline ComplexVector random_pure_ket(Index d, Rng& rng) {
  ComplexVector ket(d);
  for (Index i = 0; i < d; ++i) ket[i] = Complex(rng.gaussian(), rng.gaussian());
  ket /= ket.norm();
  return ket;
}

// Random mixed state: normalized G G^dag with G a d x rank complex Gaussian
// matrix; rank d (default) gives a full-rank state.
inline DensityOperator random_density_operator(Index d, Rng& rng, Index rank = -1) {
  if (rank < 0) rank = d;
  if (rank < 1 || rank > d) throw std::invalid_argument("random_density_operator: bad rank");
  ComplexMatrix g(d, rank);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < rank; ++j) g(i, j) = Complex(rng.gaussian(), rng.gaussian());
  ComplexMatrix m = g * g.adjoint();
  m /= m.trace().real();
  m = 0.5 * (m + m.adjoint());
  return DensityOperator(std::move(m), SubsystemLayout::single(d));
}

inline DensityOperator random_density_operator(Index d, std::uint64_t seed, Index rank = -1) {
  Rng rng(seed);
  return random_density_operator(d, rng, rank);
}

// Haar-random unitary: QR of a complex Ginibre matrix with the R-diagonal
// phase fix.
inline UnitaryOperator random_unitary(Index d, Rng& rng) {
  ComplexMatrix g(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) g(i, j) = Complex(rng.gaussian(), rng.gaussian());
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < d; ++j) {
    const Complex rjj = r(j, j);
    if (std::abs(rjj) > 0.0) q.col(j) *= rjj / std::abs(rjj);
  }
  return UnitaryOperator(std::move(q), SubsystemLayout::single(d, "U"));
}

}  // namespace dctc
