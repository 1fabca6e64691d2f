#pragma once

// Deterministic random number generation.
//
// Every stochastic routine in this library takes an explicit seed or an Rng
// object, and the generator implementation is fixed here rather than taken
// from <random>, whose distributions are implementation-defined.  The same
// seed therefore produces the same stream on every platform and compiler.
//
// The core generator is xoshiro256** seeded through splitmix64.  Independent
// child streams are derived with split(), which mixes a key into the parent
// seed through the splitmix64 finalizer; this is the standard splittable-RNG
// construction and keeps parallel trials reproducible regardless of thread
// scheduling.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace dctc {

namespace detail {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = detail::splitmix64_next(s);
  }

  std::uint64_t seed() const { return seed_; }

  // Independent stream addressed by `key`; children of the same parent with
  // distinct keys are decorrelated, as are children of distinct parents.
  Rng split(std::uint64_t key) const {
    std::uint64_t s = seed_ ^ 0x5851f42d4c957f2dull;
    std::uint64_t mixed = detail::splitmix64_next(s) + key;
    return Rng(detail::splitmix64_next(mixed));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl64(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the spare deviate is cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Index sampled from the discrete distribution `probs` (need not be exactly
// normalized; entries must be nonnegative).  Linear cumulative walk -- the
// outcome counts in this library are tiny (d^2 for a POVM).
inline Eigen::Index sample_discrete(const Eigen::VectorXd& probs, Rng& rng) {
  const double total = probs.sum();
  if (!(total > 0.0)) throw std::invalid_argument("sample_discrete: probabilities sum to zero");
  double u = rng.uniform01() * total;
  for (Eigen::Index i = 0; i + 1 < probs.size(); ++i) {
    u -= probs[i];
    if (u < 0.0) return i;
  }
  return probs.size() - 1;
}

// Counts of n independent draws from `probs`.
inline std::vector<long long> multinomial_counts(const Eigen::VectorXd& probs, long long n,
                                                 Rng& rng) {
  if (n < 0) throw std::invalid_argument("multinomial_counts: negative sample count");
  std::vector<long long> counts(static_cast<std::size_t>(probs.size()), 0);
  const double total = probs.sum();
  if (!(total > 0.0)) throw std::invalid_argument("multinomial_counts: probabilities sum to zero");
  const Eigen::Index k = probs.size();
  for (long long i = 0; i < n; ++i) {
    double u = rng.uniform01() * total;
    Eigen::Index idx = k - 1;
    for (Eigen::Index j = 0; j + 1 < k; ++j) {
      u -= probs[j];
      if (u < 0.0) {
        idx = j;
        break;
      }
    }
    ++counts[static_cast<std::size_t>(idx)];
  }
  return counts;
}

}  // namespace dctc
