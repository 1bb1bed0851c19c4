#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

namespace rgen {

using Nat = mpz_class;
using Rat = mpq_class;

/// Failure outcome of a randomized procedure is std::nullopt.
template <class T>
using Outcome = std::optional<T>;

/// Reduced fraction num/den.
Rat rat(long num, long den = 1);
Rat rat(const Nat& num, const Nat& den);

Nat floor_of(const Rat& x);
Nat ceil_of(const Rat& x);
/// Nearest integer, halves rounded up.
Nat round_of(const Rat& x);

/// Thrown by a tape-backed CoinSource when a draw would run past the tape.
struct TapeExhausted : std::exception {
  const char* what() const noexcept override { return "random tape exhausted"; }
};

/// Replayable stream of unbiased bits.
///
/// Seeded sources run a keyed 64-bit permutation in counter mode; tape
/// sources replay an explicit finite bit string.
class CoinSource {
 public:
  explicit CoinSource(std::uint64_t seed);
  static CoinSource from_tape(std::vector<bool> tape);

  /// Next k bits as an integer, first bit least significant.
  Nat draw_bits(std::size_t k);
  bool draw_bit();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t bits_consumed() const { return consumed_; }

 private:
  CoinSource() = default;
  bool next_bit();

  std::uint64_t seed_ = 0;
  std::uint64_t consumed_ = 0;
  bool taped_ = false;
  std::vector<bool> tape_;
  std::uint64_t counter_ = 0;
  std::uint64_t block_ = 0;
  unsigned block_left_ = 0;
};

/// ceil(log2 N); 0 for N = 1.
std::size_t bit_size(const Nat& N);

/// Doubling-squaring bit count: number of binary digits of n, 1 for n <= 1.
std::size_t size_routine(const Nat& n);

/// Smallest t >= 0 with 2^t >= 1/x, for 0 < x.
std::size_t ceil_log2_inv(const Rat& x);

/// Uniform integer in {1..N}, or failure with probability < delta.
Outcome<Nat> gen_uniform(CoinSource& src, const Nat& N, const Rat& delta);

/// Trial count used by gen_uniform for a given delta.
std::size_t gen_uniform_trials(const Rat& delta);

/// lcm{1..n}.
Nat lcm_upto(std::size_t n);

/// Converts to std::size_t, throwing SizeGuard if it does not fit.
std::size_t to_size(const Nat& x, const char* what);

}  // namespace rgen
