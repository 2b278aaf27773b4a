#pragma once

// P^1(Z/NZ): canonical representatives and O(1) lookup.
//
// Canonical form of a class (u : v): the representative with the smallest v
// over the unit orbit (which is always gcd(v, N)), ties broken by the
// smallest u.  Enumeration order is lexicographic by (v, u).

#include <cstdint>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "mtel/arith.hpp"
#include "mtel/errors.hpp"

namespace mtel {

struct P1Element {
  int64_t u = 0, v = 0;
  int32_t index = 0;
};

class P1Table {
 public:
  explicit P1Table(int64_t N) : N_(N) {
    if (N < 1) fail(errc::bad_input, "P1Table: N >= 1 required");
    if (N == 1) {
      reps_.push_back({0, 0, 0});
      map_.emplace(0, 0);
      return;
    }
    // canonical v values: 0 (the class (1:0)) and each divisor g < N of N
    std::vector<int64_t> vs{0};
    for (int64_t d = 1; d < N; ++d)
      if (N % d == 0) vs.push_back(d);
    for (int64_t v : vs) {
      for (int64_t u = 0; u < N; ++u) {
        if (std::gcd(std::gcd(u, v), N) != 1) continue;
        auto [cu, cv] = normalize(u, v);
        if (cu == u && cv == v) {
          int32_t idx = static_cast<int32_t>(reps_.size());
          reps_.push_back({u, v, idx});
          map_.emplace(key(u, v), idx);
        }
      }
    }
  }

  int64_t level() const { return N_; }
  int64_t size() const { return static_cast<int64_t>(reps_.size()); }
  const std::vector<P1Element>& elements() const { return reps_; }
  const P1Element& operator[](int32_t i) const { return reps_[i]; }

  // canonical representative of the class of (u : v)
  std::pair<int64_t, int64_t> normalize(int64_t u, int64_t v) const {
    if (N_ == 1) return {0, 0};
    u %= N_;
    if (u < 0) u += N_;
    v %= N_;
    if (v < 0) v += N_;
    if (std::gcd(std::gcd(u, v), N_) != 1)
      fail(errc::bad_input, "P1: gcd(u, v, N) != 1");
    const int64_t g = std::gcd(v, N_);  // == N when v = 0
    if (g == N_) return {1, 0};         // v = 0 forces u a unit; orbit rep (1:0)
    const int64_t M = N_ / g;
    const int64_t v1 = (v / g) % M;
    const int64_t t0 = invmod64(v1, M);
    int64_t best = -1;
    for (int64_t s = 0; s < g; ++s) {
      const int64_t t = (t0 + s * M) % N_;
      if (std::gcd(t, N_) != 1) continue;
      const int64_t uu = mulmod64(t, u, N_);
      if (best < 0 || uu < best) best = uu;
    }
    if (best < 0) fail(errc::internal, "P1 normalize: empty unit coset");
    return {best, g};
  }

  int32_t lookup(int64_t u, int64_t v) const {
    auto [cu, cv] = normalize(u, v);
    auto it = map_.find(key(cu, cv));
    if (it == map_.end()) fail(errc::internal, "P1 lookup miss");
    return it->second;
  }

  // index of (u : v) . [a, b; c, d] = (a u + c v : b u + d v)
  int32_t apply(int32_t i, int64_t a, int64_t b, int64_t c, int64_t d) const {
    const P1Element& x = reps_[i];
    return lookup(a * x.u + c * x.v, b * x.u + d * x.v);
  }

 private:
  int64_t key(int64_t u, int64_t v) const { return u * N_ + v; }

  int64_t N_;
  std::vector<P1Element> reps_;
  std::unordered_map<int64_t, int32_t> map_;
};

// |P1(Z/N)| = N * prod_{ell | N} (1 + 1/ell)
inline int64_t p1_size_formula(int64_t N) {
  int64_t out = N;
  int64_t rem = N;
  for (int64_t q = 2; q * q <= rem; ++q) {
    if (rem % q == 0) {
      out = out / q * (q + 1);
      while (rem % q == 0) rem /= q;
    }
  }
  if (rem > 1) out = out / rem * (rem + 1);
  return N == 1 ? 1 : out;
}

}  // namespace mtel
