#pragma once

// Circuit constructions for the looped-register cloning protocol.
//
// The measured-readout interaction on slots (S, A_1..A_N, C_1..C_N), all of
// local dimension d, is
//
//   1. cyclic shift  S -> C_1 -> C_2 -> ... -> C_N -> S
//   2. modular adds  A_i <- A_i + C_i (mod d)   for each i,
//
// with S the incoming system, C_i the looped slots, and A_i ancillas
// prepared in |0>.  Both stages are basis permutations, so the whole
// interaction is stored as a permutation image and never materialized dense.
//
// The coherent variant replaces the d-dimensional system by a carrier ⊗
// pointer pair (E, B): the shift cycles whole pairs through loop slots
// (E_i, B_i) and the adds copy the pointers B_i into the ancillas.
//
// An optional readout basis V (a local unitary on each d-dimensional readout
// slot) conjugates the circuit, U_V = (⊗V) U (⊗V)^dag, making the protocol
// copy in the V-basis; this loses the permutation representation and is
// capped at small dimensions.

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dctc/ctc.hpp"
#include "dctc/qmath.hpp"

namespace dctc {

namespace detail {

inline std::vector<Index> decode_digits(const SubsystemLayout& layout,
                                        const std::vector<Index>& strides, Index i) {
  std::vector<Index> digits(static_cast<std::size_t>(layout.num_slots()));
  for (Index s = 0; s < layout.num_slots(); ++s)
    digits[static_cast<std::size_t>(s)] = (i / strides[static_cast<std::size_t>(s)]) % layout.dim(s);
  return digits;
}

inline Index encode_digits(const std::vector<Index>& digits, const std::vector<Index>& strides) {
  Index i = 0;
  for (std::size_t s = 0; s < digits.size(); ++s) i += digits[s] * strides[s];
  return i;
}

}  // namespace detail

// Cyclic shift on k slots of dimension d: the contents of slot j move to
// slot j+1, and slot k wraps around to slot 1.  Applied with slot 1 as the
// system and slots 2..k as the loop, forward iteration of the loop map
// reaches the fixed point rho^(k-1) in exactly k-1 steps.
inline UnitaryOperator cyclic_shift_unitary(Index d, Index k, Index dense_cap = kDefaultDenseCap) {
  if (d < 2) throw std::invalid_argument("cyclic_shift_unitary: dimension must be >= 2");
  if (k < 2) throw std::invalid_argument("cyclic_shift_unitary: need at least two slots");
  std::vector<Index> dims(static_cast<std::size_t>(k), d);
  std::vector<std::string> labels;
  for (Index j = 1; j <= k; ++j) labels.push_back("Q" + std::to_string(j));
  SubsystemLayout layout(std::move(dims), std::move(labels));
  const Index total = layout.total_dim();
  if (total > dense_cap)
    throw CapExceededError("cyclic_shift_unitary: dimension " + std::to_string(total) +
                           " exceeds dense cap " + std::to_string(dense_cap));
  const std::vector<Index> strides = layout.strides();
  std::vector<Index> image(static_cast<std::size_t>(total));
  for (Index i = 0; i < total; ++i) {
    const std::vector<Index> in = detail::decode_digits(layout, strides, i);
    std::vector<Index> out(in.size());
    for (std::size_t j = 0; j < in.size(); ++j) out[j] = in[(j + in.size() - 1) % in.size()];
    image[static_cast<std::size_t>(i)] = detail::encode_digits(out, strides);
  }
  return UnitaryOperator::permutation(std::move(image), std::move(layout));
}

// Two-slot modular adder |x>|y> -> |x>|x + y mod d>; equals CNOT at d = 2.
inline UnitaryOperator modular_add_gate(Index d) {
  if (d < 2) throw std::invalid_argument("modular_add_gate: dimension must be >= 2");
  SubsystemLayout layout({d, d}, {"X", "Y"});
  std::vector<Index> image(static_cast<std::size_t>(d * d));
  for (Index x = 0; x < d; ++x)
    for (Index y = 0; y < d; ++y) image[static_cast<std::size_t>(x * d + y)] = x * d + (x + y) % d;
  return UnitaryOperator::permutation(std::move(image), std::move(layout));
}

// ---------------------------------------------------------------------------
// Cloner interaction
// ---------------------------------------------------------------------------

enum class ClonerVariant { measured, coherent };

struct ClonerSpec {
  Index d = 2;             // dimension of the readout slots (pointer alphabet)
  Index n_ctc = 1;         // number of looped slots = number of clones
  ClonerVariant variant = ClonerVariant::measured;
  Index carrier_dim = 0;   // coherent only: dimension of the carrier slots
  std::optional<ComplexMatrix> readout_basis;  // local d x d unitary, default computational
  Index dense_cap = kDefaultDenseCap;
};

namespace detail {

inline SubsystemLayout cloner_layout(const ClonerSpec& spec) {
  std::vector<Index> dims;
  std::vector<std::string> labels;
  if (spec.variant == ClonerVariant::measured) {
    dims.push_back(spec.d);
    labels.emplace_back("S");
    for (Index i = 1; i <= spec.n_ctc; ++i) {
      dims.push_back(spec.d);
      labels.push_back("A" + std::to_string(i));
    }
    for (Index i = 1; i <= spec.n_ctc; ++i) {
      dims.push_back(spec.d);
      labels.push_back("C" + std::to_string(i));
    }
  } else {
    dims.push_back(spec.carrier_dim);
    labels.emplace_back("E");
    dims.push_back(spec.d);
    labels.emplace_back("B");
    for (Index i = 1; i <= spec.n_ctc; ++i) {
      dims.push_back(spec.d);
      labels.push_back("A" + std::to_string(i));
    }
    for (Index i = 1; i <= spec.n_ctc; ++i) {
      dims.push_back(spec.carrier_dim);
      labels.push_back("E" + std::to_string(i));
      dims.push_back(spec.d);
      labels.push_back("B" + std::to_string(i));
    }
  }
  return SubsystemLayout(std::move(dims), std::move(labels));
}

inline void validate_cloner_spec(const ClonerSpec& spec) {
  if (spec.d < 2) throw std::invalid_argument("ClonerSpec: d must be >= 2");
  if (spec.n_ctc < 1) throw std::invalid_argument("ClonerSpec: n_ctc must be >= 1");
  if (spec.variant == ClonerVariant::coherent && spec.carrier_dim < 2)
    throw std::invalid_argument("ClonerSpec: coherent variant requires carrier_dim >= 2");
  if (spec.readout_basis) {
    if (spec.readout_basis->rows() != spec.d || spec.readout_basis->cols() != spec.d)
      throw std::invalid_argument("ClonerSpec: readout basis must be d x d");
  }
}

// Total dimension with the formula spelled out for the error message. The
// product is accumulated with a saturation guard and the check runs before
// the layout is built: a dimension that overflows Index is certainly beyond
// any dense cap, and must never reach stride arithmetic or allocation.
inline void check_cloner_cap(const ClonerSpec& spec) {
  Index total = 1;
  bool overflow = false;
  const auto mul = [&](Index factor) {
    if (overflow || total > std::numeric_limits<Index>::max() / factor) overflow = true;
    else total *= factor;
  };
  for (Index i = 0; i < 2 * spec.n_ctc + 1; ++i) mul(spec.d);
  if (spec.variant == ClonerVariant::coherent)
    for (Index i = 0; i < spec.n_ctc + 1; ++i) mul(spec.carrier_dim);
  if (!overflow && total <= spec.dense_cap) return;
  std::ostringstream msg;
  msg << "cloner_interaction: total dimension ";
  if (spec.variant == ClonerVariant::measured)
    msg << spec.d << "^" << (2 * spec.n_ctc + 1);
  else
    msg << spec.carrier_dim << "^" << (spec.n_ctc + 1) << " * " << spec.d << "^"
        << (2 * spec.n_ctc + 1);
  if (overflow) msg << " overflows the index range and";
  else msg << " = " << total;
  msg << " exceeds dense cap " << spec.dense_cap;
  throw CapExceededError(msg.str());
}

}  // namespace detail

// The cloning interaction as a loop coupling: system-side slots are S and
// the ancillas (carrier, pointer, and ancillas for the coherent variant);
// loop-side slots are the C_i (or pairs (E_i, B_i)).
inline DctcInteraction cloner_interaction(const ClonerSpec& spec) {
  detail::validate_cloner_spec(spec);
  detail::check_cloner_cap(spec);
  SubsystemLayout layout = detail::cloner_layout(spec);
  const Index total = layout.total_dim();

  const Index n = spec.n_ctc;
  const std::vector<Index> strides = layout.strides();
  std::vector<Index> image(static_cast<std::size_t>(total));

  if (spec.variant == ClonerVariant::measured) {
    // slots: 0 = S, 1..n = A_i, n+1..2n = C_i
    for (Index i = 0; i < total; ++i) {
      const std::vector<Index> in = detail::decode_digits(layout, strides, i);
      std::vector<Index> out = in;
      out[static_cast<std::size_t>(n + 1)] = in[0];
      for (Index j = 2; j <= n; ++j)
        out[static_cast<std::size_t>(n + j)] = in[static_cast<std::size_t>(n + j - 1)];
      out[0] = in[static_cast<std::size_t>(2 * n)];
      for (Index j = 1; j <= n; ++j)
        out[static_cast<std::size_t>(j)] =
            (out[static_cast<std::size_t>(j)] + out[static_cast<std::size_t>(n + j)]) % spec.d;
      image[static_cast<std::size_t>(i)] = detail::encode_digits(out, strides);
    }
  } else {
    // slots: 0 = E, 1 = B, 2..n+1 = A_i, then pairs (E_i, B_i) at
    // n+2+2(i-1) and n+3+2(i-1)
    const auto pe = [n](Index i) { return static_cast<std::size_t>(n + 2 + 2 * (i - 1)); };
    const auto pb = [n](Index i) { return static_cast<std::size_t>(n + 3 + 2 * (i - 1)); };
    for (Index i = 0; i < total; ++i) {
      const std::vector<Index> in = detail::decode_digits(layout, strides, i);
      std::vector<Index> out = in;
      out[pe(1)] = in[0];
      out[pb(1)] = in[1];
      for (Index j = 2; j <= n; ++j) {
        out[pe(j)] = in[pe(j - 1)];
        out[pb(j)] = in[pb(j - 1)];
      }
      out[0] = in[pe(n)];
      out[1] = in[pb(n)];
      for (Index j = 1; j <= n; ++j)
        out[static_cast<std::size_t>(j + 1)] =
            (out[static_cast<std::size_t>(j + 1)] + out[pb(j)]) % spec.d;
      image[static_cast<std::size_t>(i)] = detail::encode_digits(out, strides);
    }
  }

  UnitaryOperator u = UnitaryOperator::permutation(std::move(image), layout);

  if (spec.readout_basis) {
    UnitaryOperator v(*spec.readout_basis, SubsystemLayout::single(spec.d, "V"));
    if (total > kMaterializeCap)
      throw CapExceededError("cloner_interaction: readout-basis conjugation at dimension " +
                             std::to_string(total) + " exceeds cap " +
                             std::to_string(kMaterializeCap));
    ComplexMatrix w = ComplexMatrix::Identity(1, 1);
    for (Index s = 0; s < layout.num_slots(); ++s) {
      const bool readout_slot = layout.dim(s) == spec.d &&
                                (spec.variant == ClonerVariant::measured ||
                                 layout.label(s).front() != 'E');
      w = tensor_product(w, readout_slot ? v.matrix()
                                         : ComplexMatrix::Identity(layout.dim(s), layout.dim(s)));
    }
    u = UnitaryOperator(w * u.matrix() * w.adjoint(), layout);
  }

  std::vector<std::string> s_labels, c_labels;
  for (Index s = 0; s < layout.num_slots(); ++s) {
    const std::string& label = layout.label(s);
    const bool looped = spec.variant == ClonerVariant::measured
                            ? label.front() == 'C'
                            : label.size() > 1 && (label.front() == 'E' || label.front() == 'B');
    (looped ? c_labels : s_labels).push_back(label);
  }
  return DctcInteraction(std::move(u), std::move(s_labels), std::move(c_labels));
}

// Dephase one slot in its computational basis: entries between basis states
// whose digit on that slot differs are zeroed.
inline DensityOperator decohere_in_basis(const DensityOperator& rho, const std::string& slot) {
  const auto g = detail::GroupSplit::make(rho.layout(),
                                          detail::membership_flags(rho.layout(), {slot}));
  ComplexMatrix out = rho.matrix();
  for (Index i = 0; i < g.dim_full; ++i)
    for (Index j = 0; j < g.dim_full; ++j)
      if (g.a_of_full[static_cast<std::size_t>(i)] != g.a_of_full[static_cast<std::size_t>(j)])
        out(i, j) = 0.0;
  return DensityOperator::unchecked(std::move(out), rho.layout());
}

inline DensityOperator decohere_in_basis(const DensityOperator& rho,
                                         const std::vector<std::string>& slots) {
  DensityOperator out = rho;
  for (const auto& s : slots) out = decohere_in_basis(out, s);
  return out;
}

// Gate-level description of the interaction, one line per element.
inline std::string cloner_netlist(const ClonerSpec& spec) {
  detail::validate_cloner_spec(spec);
  const SubsystemLayout layout = detail::cloner_layout(spec);
  std::ostringstream out;
  out << "slots";
  for (Index s = 0; s < layout.num_slots(); ++s)
    out << ' ' << layout.label(s) << ':' << layout.dim(s);
  out << '\n';
  const Index n = spec.n_ctc;
  if (spec.variant == ClonerVariant::measured) {
    out << "loop";
    for (Index i = 1; i <= n; ++i) out << " C" << i;
    out << '\n';
    out << "cyclic-shift S";
    for (Index i = 1; i <= n; ++i) out << " C" << i;
    out << '\n';
    for (Index i = 1; i <= n; ++i) out << "modular-add C" << i << " A" << i << '\n';
  } else {
    out << "loop";
    for (Index i = 1; i <= n; ++i) out << " E" << i << " B" << i;
    out << '\n';
    out << "cyclic-shift (E B)";
    for (Index i = 1; i <= n; ++i) out << " (E" << i << " B" << i << ")";
    out << '\n';
    for (Index i = 1; i <= n; ++i) out << "modular-add B" << i << " A" << i << '\n';
  }
  out << "readout-basis " << (spec.readout_basis ? "custom" : "computational") << '\n';
  return out.str();
}

}  // namespace dctc
