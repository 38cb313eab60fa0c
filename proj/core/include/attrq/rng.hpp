#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace attrq {

std::uint64_t fnv1a64(std::span<const unsigned char> bytes);
std::uint64_t fnv1a64(std::string_view text);

/// Derives an independent seed for a (stream, substream) pair from a master
/// seed. Used to give every agent / purpose its own reproducible stream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t substream = 0);

/// mt19937_64 with a hand-rolled distribution layer. The standard library's
/// distribution objects are implementation-defined, so all draws here go
/// through fixed bit-level recipes to keep runs reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; consumes exactly two draws per call.
  double normal();

  /// Uniform integer in [0, n) without modulo bias.
  std::uint64_t below(std::uint64_t n);

  /// Fair coin in {0, 1}.
  int coin() { return static_cast<int>(next_u64() >> 63); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// k distinct indices drawn uniformly from [0, n), in draw order
  /// (partial Fisher-Yates). Requires k <= n.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 gen_;
};

}  // namespace attrq
