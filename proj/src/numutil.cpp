#include "rgen/numutil.hpp"

#include <limits>
#include <numeric>
#include <string>

#include "rgen/errors.hpp"

namespace rgen {

Rat rat(long num, long den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

Rat rat(const Nat& num, const Nat& den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

Nat floor_of(const Rat& x) {
  Nat q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

Nat ceil_of(const Rat& x) {
  Nat q;
  mpz_cdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

Nat round_of(const Rat& x) { return floor_of(x + Rat(1, 2)); }

namespace {

// splitmix64 finaliser; each step is invertible on 64-bit words.
std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t keyed_block(std::uint64_t key, std::uint64_t counter) {
  std::uint64_t k2 = mix(key ^ 0x9e3779b97f4a7c15ULL);
  return mix(mix(counter ^ key) + k2);
}

}  // namespace

CoinSource::CoinSource(std::uint64_t seed) : seed_(seed) {}

CoinSource CoinSource::from_tape(std::vector<bool> tape) {
  CoinSource src;
  src.taped_ = true;
  src.tape_ = std::move(tape);
  return src;
}

bool CoinSource::next_bit() {
  if (taped_) return tape_[consumed_];
  if (block_left_ == 0) {
    block_ = keyed_block(seed_, counter_++);
    block_left_ = 64;
  }
  bool b = block_ & 1U;
  block_ >>= 1;
  --block_left_;
  return b;
}

Nat CoinSource::draw_bits(std::size_t k) {
  if (taped_ && consumed_ + k > tape_.size()) throw TapeExhausted();
  Nat v = 0;
  for (std::size_t j = 0; j < k; ++j) {
    if (next_bit()) mpz_setbit(v.get_mpz_t(), j);
    ++consumed_;
  }
  return v;
}

bool CoinSource::draw_bit() { return draw_bits(1) != 0; }

std::size_t bit_size(const Nat& N) {
  if (N <= 0) throw std::invalid_argument("bit_size: N must be positive");
  if (N == 1) return 0;
  Nat m = N - 1;
  return mpz_sizeinbase(m.get_mpz_t(), 2);
}

std::size_t size_routine(const Nat& n) {
  if (n <= 1) return 1;
  std::size_t h = 1, h0 = h;
  Nat k = 2, k0 = k;
  while (k <= n) {
    h0 = h;
    h *= 2;
    k0 = k;
    k = k * k;
  }
  Nat rest = n / k0;
  return h0 + size_routine(rest);
}

std::size_t ceil_log2_inv(const Rat& x) {
  if (x <= 0) throw std::invalid_argument("ceil_log2_inv: argument must be positive");
  std::size_t t = 0;
  Rat p = x;
  while (p < 1) {
    p *= 2;
    ++t;
  }
  return t;
}

std::size_t gen_uniform_trials(const Rat& delta) {
  return std::max<std::size_t>(1, ceil_log2_inv(delta));
}

Outcome<Nat> gen_uniform(CoinSource& src, const Nat& N, const Rat& delta) {
  if (N < 1) throw std::invalid_argument("gen_uniform: N must be at least 1");
  if (delta <= 0 || delta >= 1) throw std::invalid_argument("gen_uniform: delta must lie in (0,1)");
  std::size_t b = bit_size(N);
  std::size_t trials = gen_uniform_trials(delta);
  for (std::size_t i = 0; i < trials; ++i) {
    Nat u = src.draw_bits(b) + 1;
    if (u <= N) return u;
  }
  return std::nullopt;
}

Nat lcm_upto(std::size_t n) {
  if (n < 1) throw std::invalid_argument("lcm_upto: n must be at least 1");
  Nat m = 1;
  for (std::size_t i = 2; i <= n; ++i) {
    Nat ii = static_cast<unsigned long>(i);
    mpz_lcm(m.get_mpz_t(), m.get_mpz_t(), ii.get_mpz_t());
  }
  return m;
}

std::size_t to_size(const Nat& x, const char* what) {
  if (x < 0 || !x.fits_ulong_p()) throw SizeGuard(std::string(what) + " too large");
  return x.get_ui();
}

}  // namespace rgen
