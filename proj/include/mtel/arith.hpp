#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "mtel/errors.hpp"

namespace mtel {

using Int = mpz_class;
using Rat = mpq_class;

inline int64_t mulmod64(int64_t a, int64_t b, int64_t m) {
  return static_cast<int64_t>(static_cast<__int128>(a) * b % m);
}

inline int64_t powmod64(int64_t b, int64_t e, int64_t m) {
  int64_t r = 1 % m;
  b %= m;
  if (b < 0) b += m;
  while (e > 0) {
    if (e & 1) r = mulmod64(r, b, m);
    b = mulmod64(b, b, m);
    e >>= 1;
  }
  return r;
}

// Deterministic Miller-Rabin, valid for all 64-bit inputs.
inline bool is_prime64(int64_t n) {
  if (n < 2) return false;
  for (int64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  int64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) d >>= 1, ++s;
  for (int64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    int64_t x = powmod64(a % n, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

inline int64_t invmod64(int64_t a, int64_t m) {
  int64_t g = m, x = 0, x1 = 1, a1 = a % m;
  if (a1 < 0) a1 += m;
  while (a1 != 0) {
    int64_t q = g / a1;
    g -= q * a1;
    std::swap(g, a1);
    x -= q * x1;
    std::swap(x, x1);
  }
  if (g != 1) fail(errc::internal, "invmod64: not invertible");
  return x < 0 ? x + m : x;
}

// Trial-division factorization; fine for the conductor/level sizes here.
inline std::vector<std::pair<int64_t, int>> factor64(int64_t n) {
  if (n <= 0) fail(errc::bad_input, "factor64 expects a positive integer");
  std::vector<std::pair<int64_t, int>> out;
  for (int64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) n /= p, ++e;
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

inline int valuation(Int v, int64_t p) {
  if (v == 0) fail(errc::internal, "valuation of zero");
  Int rem;
  return static_cast<int>(mpz_remove(rem.get_mpz_t(), v.get_mpz_t(),
                                     Int(p).get_mpz_t()));
}

inline Int pow_int(int64_t base, unsigned e) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), e);
  return r;
}

inline Int pow_int(const Int& base, unsigned e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

// z mod m in [0, m) for m > 0
inline int64_t mod_i64(const Int& z, int64_t m) {
  return static_cast<int64_t>(mpz_fdiv_ui(z.get_mpz_t(), static_cast<unsigned long>(m)));
}

inline Int gcd_int(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline Int binom(unsigned long n, unsigned long k) {
  Int r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

// Balanced rational reconstruction: find n/d with n = v*d (mod m),
// |n|, d <= sqrt(m/2). Returns false when no such fraction exists yet.
inline bool rat_reconstruct(const Int& v, const Int& m, Rat& out) {
  Int bound = sqrt(m / 2);
  Int a0 = m, a1 = v % m, x0 = 0, x1 = 1;
  if (a1 < 0) a1 += m;
  while (a1 > bound) {
    Int q = a0 / a1;
    Int a2 = a0 - q * a1;
    a0 = a1;
    a1 = a2;
    Int x2 = x0 - q * x1;
    x0 = x1;
    x1 = x2;
  }
  Int n = a1, d = x1;
  if (d == 0) return false;
  if (d < 0) {
    d = -d;
    n = -n;
  }
  if (d > bound) return false;
  Int g = gcd(n, d);
  if (g != 1 && g != 0) return false;
  // Safety: the defining congruence must hold.
  if ((n - v * d) % m != 0) return false;
  out = Rat(n, d);
  out.canonicalize();
  return true;
}

// Incremental Chinese remaindering over word-size prime moduli.
struct crt_accumulator {
  Int residue = 0;
  Int modulus = 1;

  void add(int64_t r, int64_t m) {
    Int mi = m;
    Int t = (Int(r) - residue) % mi;
    if (t < 0) t += mi;
    Int inv;
    if (mpz_invert(inv.get_mpz_t(), modulus.get_mpz_t(), mi.get_mpz_t()) == 0)
      fail(errc::internal, "crt moduli not coprime");
    t = (t * inv) % mi;
    residue += modulus * t;
    modulus *= mi;
  }
};

// Deterministic descending stream of primes just below 2^62, used by the
// multi-modular solver.
inline int64_t prev_prime62(int64_t below) {
  int64_t n = below - 1;
  if ((n & 1) == 0) --n;
  while (!is_prime64(n)) n -= 2;
  return n;
}

}  // namespace mtel
