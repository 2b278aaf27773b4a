#pragma once

// Mazur–Tate elements ϑ_{n+1} over Gal(Q(μ_{p^{n+1}})/Q), ω^i-isotypic
// projection into Z/p^M[G_n] with G_n ≅ Z/pⁿ via γ = 1+p, polynomial form
// in T = γ−1, μ/λ extraction, corestriction, and p-stabilized variants.
//
// RawTheta coefficients stay exact rationals; p-adic truncation happens
// exactly once, in omega_project.  The stabilized variant with an
// irrational unit root α carries residues mod p^{Mw} instead (recorded in
// padic_modulus), since no exact rational representation exists.

#include <algorithm>
#include <cstdint>
#include <thread>
#include <utility>
#include <vector>

#include "mtel/arith.hpp"
#include "mtel/eigensymbol.hpp"
#include "mtel/errors.hpp"

namespace mtel {

struct RawTheta {
  int64_t p = 0;
  int n = 0;  // element lives over Gal(Q(μ_{p^{n+1}})/Q)
  std::vector<std::pair<int64_t, Rat>> coeffs;  // (a, Ψ({∞}−{a/p^{n+1}})), a ascending
  Int padic_modulus = 0;  // 0: exact; otherwise values are residues mod p^{Mw}

  const Rat& at(int64_t a) const {
    auto it = std::lower_bound(coeffs.begin(), coeffs.end(), a,
                               [](const auto& e, int64_t key) { return e.first < key; });
    if (it == coeffs.end() || it->first != a)
      fail(errc::bad_input, "RawTheta: no coefficient at a = " + std::to_string(a));
    return it->second;
  }
};

struct IsotypicElement {
  int64_t p = 0;
  int n = 0;
  int i = 0;        // twist index, 0 ≤ i ≤ p−2
  int M = 0;        // coefficients known mod p^M
  std::vector<Int> coeffs;  // length pⁿ, residues in [0, p^M)
};

struct IwasawaInvariants {
  int mu = -1;      // meaningful iff valid
  int lambda = -1;  // meaningful iff valid
  int precision = 0;
  bool valid = false;
};

// ---------------------------------------------------------------------------

inline Int teichmuller(int64_t a, int64_t p, int M) {
  if (a % p == 0) fail(errc::bad_input, "teichmuller: a ≡ 0 mod p");
  const Int mod = pow_int(p, static_cast<unsigned>(M));
  Int x = a % p;
  if (x < 0) x += p;
  for (int it = 0; it < 4 * M + 8; ++it) {
    Int nx;
    mpz_powm_ui(nx.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(p), mod.get_mpz_t());
    if (nx == x) return x;
    x = nx;
  }
  fail(errc::internal, "teichmuller: no fixed point reached");
}

inline int64_t discrete_log_one_plus_p(int64_t u, int64_t p, int n) {
  const int64_t P = pow_int(p, static_cast<unsigned>(n + 1)).get_si();
  u %= P;
  if (u < 0) u += P;
  if (u % p != 1) fail(errc::bad_input, "discrete_log_one_plus_p: u ≢ 1 mod p");
  const int64_t pn = P / p;
  int64_t w = 1;
  for (int64_t j = 0; j < pn; ++j) {
    if (w == u) return j;
    w = mulmod64(w, 1 + p, P);
  }
  fail(errc::internal, "discrete_log_one_plus_p: not in the image of 1+pZ");
}

// ---------------------------------------------------------------------------

namespace detail {

inline void check_theta_pair(const Eigensymbol& sym_plus, const Eigensymbol& sym_minus,
                             int64_t p, int n) {
  if (sym_plus.sign != 1 || sym_minus.sign != -1)
    fail(errc::bad_input, "raw_theta: expected a (+1, -1) symbol pair");
  if (sym_plus.level != sym_minus.level)
    fail(errc::bad_input, "raw_theta: symbols live at different levels");
  if (p < 3 || !is_prime64(p)) fail(errc::bad_input, "raw_theta: p must be an odd prime");
  if (n < 0) fail(errc::bad_input, "raw_theta: n must be >= 0");
}

// units of Z/p^{n+1} in ascending order
inline std::vector<int64_t> units_mod_p_power(int64_t p, int n) {
  const int64_t P = pow_int(p, static_cast<unsigned>(n + 1)).get_si();
  std::vector<int64_t> a;
  a.reserve(static_cast<size_t>(P - P / p));
  for (int64_t x = 1; x < P; ++x)
    if (x % p != 0) a.push_back(x);
  return a;
}

template <class F>
inline void parallel_for(size_t count, int threads, F&& body) {
  if (threads <= 1 || count < 2) {
    for (size_t k = 0; k < count; ++k) body(k);
    return;
  }
  const size_t nt = std::min<size_t>(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (size_t t = 0; t < nt; ++t)
    pool.emplace_back([&, t]() {
      for (size_t k = t; k < count; k += nt) body(k);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

inline RawTheta raw_theta(const Eigensymbol& sym_plus, const Eigensymbol& sym_minus, int64_t p,
                          int n, int threads = 1) {
  detail::check_theta_pair(sym_plus, sym_minus, p, n);
  const Int P = pow_int(p, static_cast<unsigned>(n + 1));
  RawTheta out;
  out.p = p;
  out.n = n;
  const auto units = detail::units_mod_p_power(p, n);
  out.coeffs.resize(units.size());
  detail::parallel_for(units.size(), threads, [&](size_t k) {
    const Rat r(Int(units[k]), P);
    out.coeffs[k] = {units[k], evaluate(sym_plus, r) + evaluate(sym_minus, r)};
  });
  return out;
}

// α for the stabilized element: exact ±1 in the multiplicative case (no
// correction term is applied), or the Hensel-lifted unit root of
// X² − a_p X + p carried mod p^prec in the good ordinary case.
struct UnitRoot {
  bool is_exact = false;
  Rat exact;     // when is_exact
  Int approx;    // α mod modulus otherwise
  Int modulus;   // p^prec

  static UnitRoot rational(const Rat& alpha) {
    UnitRoot u;
    u.is_exact = true;
    u.exact = alpha;
    return u;
  }

  static UnitRoot hensel(int64_t a_p, int64_t p, int prec) {
    if (a_p % p == 0)
      fail(errc::not_unit_root, "X² − a_p X + p has no unit root: a_p ≡ 0 mod p");
    UnitRoot u;
    u.modulus = pow_int(p, static_cast<unsigned>(prec));
    Int x = a_p % p;
    if (x < 0) x += p;
    // Newton iteration for f(X) = X² − a_p X + p; f'(x) is a unit
    for (int it = 0; it < prec + 2; ++it) {
      Int f = (x * x - a_p * x + p) % u.modulus;
      Int fp = (2 * x - a_p) % u.modulus;
      Int inv;
      if (mpz_invert(inv.get_mpz_t(), fp.get_mpz_t(), u.modulus.get_mpz_t()) == 0)
        fail(errc::internal, "hensel: derivative not invertible");
      x = (x - f * inv) % u.modulus;
      if (x < 0) x += u.modulus;
      if ((x * x - a_p * x + p) % u.modulus == 0) break;
    }
    if ((x * x - a_p * x + p) % u.modulus != 0)
      fail(errc::internal, "hensel: iteration did not converge");
    u.approx = x;
    return u;
  }
};

inline RawTheta raw_theta_stabilized(const Eigensymbol& sym_plus, const Eigensymbol& sym_minus,
                                     int64_t p, int n, const UnitRoot& alpha, int threads = 1) {
  detail::check_theta_pair(sym_plus, sym_minus, p, n);
  const Int P = pow_int(p, static_cast<unsigned>(n + 1));
  const Int Pn = pow_int(p, static_cast<unsigned>(n));
  const auto units = detail::units_mod_p_power(p, n);
  RawTheta out;
  out.p = p;
  out.n = n;
  out.coeffs.resize(units.size());
  if (alpha.is_exact) {
    // multiplicative case: coeffs = α^{−(n+1)} · Ψ({∞}−{a/p^{n+1}})
    if (alpha.exact == 0 || rat_valuation(alpha.exact, p) != 0)
      fail(errc::not_unit_root, "stabilization root has nonzero p-valuation");
    Rat scale = Rat(1) / alpha.exact;
    Rat factor(1);
    for (int k = 0; k <= n; ++k) factor *= scale;
    detail::parallel_for(units.size(), threads, [&](size_t k) {
      const Rat r(Int(units[k]), P);
      out.coeffs[k] = {units[k],
                       Rat(factor * (evaluate(sym_plus, r) + evaluate(sym_minus, r)))};
    });
    return out;
  }
  // good ordinary case, α mod p^prec
  if (alpha.approx % p == 0) fail(errc::not_unit_root, "stabilization root is not a p-unit");
  const Int& W = alpha.modulus;
  Int alpha_inv;
  if (mpz_invert(alpha_inv.get_mpz_t(), alpha.approx.get_mpz_t(), W.get_mpz_t()) == 0)
    fail(errc::not_unit_root, "stabilization root is not invertible");
  Int alpha_pow_inv;  // α^{−(n+1)} mod W
  mpz_powm_ui(alpha_pow_inv.get_mpz_t(), alpha_inv.get_mpz_t(),
              static_cast<unsigned long>(n + 1), W.get_mpz_t());
  auto to_residue = [&](const Rat& v) {
    Int den(v.get_den());
    if (den % p == 0)
      fail(errc::non_integral_coefficient, "stabilized theta: coefficient not p-integral");
    Int dinv;
    if (mpz_invert(dinv.get_mpz_t(), den.get_mpz_t(), W.get_mpz_t()) == 0)
      fail(errc::internal, "stabilized theta: denominator not invertible");
    Int r = (Int(v.get_num()) % W) * dinv % W;
    if (r < 0) r += W;
    return r;
  };
  detail::parallel_for(units.size(), threads, [&](size_t k) {
    const int64_t a = units[k];
    const Rat r1(Int(a), P);
    const Rat r0(Int(a) % Pn, Pn);  // a mod pⁿ over pⁿ (n = 0: {0}−{0/1})
    const Int v1 = to_residue(evaluate(sym_plus, r1) + evaluate(sym_minus, r1));
    const Int v0 = to_residue(evaluate(sym_plus, r0) + evaluate(sym_minus, r0));
    Int c = (v1 - alpha_inv * v0) % W;
    c = c * alpha_pow_inv % W;
    if (c < 0) c += W;
    out.coeffs[k] = {a, Rat(c)};
  });
  out.padic_modulus = W;
  return out;
}

// ---------------------------------------------------------------------------

inline IsotypicElement omega_project(const RawTheta& raw, int i, int M) {
  const int64_t p = raw.p;
  const int n = raw.n;
  if (i < 0 || i > p - 2) fail(errc::bad_input, "omega_project: need 0 <= i <= p-2");
  if (M < 1) fail(errc::bad_input, "omega_project: precision must be >= 1");
  const Int mod = pow_int(p, static_cast<unsigned>(M));
  if (raw.padic_modulus != 0) {
    // stabilized input: make sure the carried precision suffices
    if (raw.padic_modulus % mod != 0)
      fail(errc::internal, "omega_project: stabilized precision too small for M");
  }
  const int64_t P = pow_int(p, static_cast<unsigned>(n + 1)).get_si();
  const int64_t pn = P / p;

  // δ(b) = teichmuller(b) mod p^{n+1} and ω^i(b) mod p^M for b in (Z/p)^×
  std::vector<int64_t> delta(p, 0);
  std::vector<Int> omega_i(p);
  for (int64_t b = 1; b < p; ++b) {
    delta[b] = mod_i64(teichmuller(b, p, n + 1), P);
    Int t = teichmuller(b, p, M);
    mpz_powm_ui(omega_i[b].get_mpz_t(), t.get_mpz_t(), static_cast<unsigned long>(i),
                mod.get_mpz_t());
  }
  // discrete-log table of (1+p)^j mod p^{n+1}
  std::vector<int32_t> dlog(static_cast<size_t>(P), -1);
  {
    int64_t w = 1;
    for (int64_t j = 0; j < pn; ++j) {
      dlog[static_cast<size_t>(w)] = static_cast<int32_t>(j);
      w = mulmod64(w, 1 + p, P);
    }
  }

  IsotypicElement out;
  out.p = p;
  out.n = n;
  out.i = i;
  out.M = M;
  out.coeffs.assign(static_cast<size_t>(pn), Int(0));
  for (const auto& [a, value] : raw.coeffs) {
    const int64_t b = a % p;
    const int64_t g = mulmod64(a % P, invmod64(delta[b], P), P);
    const int32_t j = dlog[static_cast<size_t>(g)];
    if (j < 0) fail(errc::internal, "omega_project: unit escaped 1+pZ image");
    // residue of the coefficient mod p^M
    Int den(value.get_den());
    Int c;
    if (den == 1) {
      c = Int(value.get_num()) % mod;
    } else {
      if (den % p == 0)
        fail(errc::non_integral_coefficient,
             "omega_project: coefficient at a = " + std::to_string(a) +
                 " has negative p-valuation");
      Int dinv;
      if (mpz_invert(dinv.get_mpz_t(), den.get_mpz_t(), mod.get_mpz_t()) == 0)
        fail(errc::internal, "omega_project: denominator not invertible");
      c = (Int(value.get_num()) % mod) * dinv % mod;
    }
    Int& slot = out.coeffs[static_cast<size_t>(j)];
    slot = (slot + omega_i[b] * c) % mod;
    if (slot < 0) slot += mod;
  }
  return out;
}

inline std::vector<Int> to_polynomial(const IsotypicElement& elem) {
  const size_t len = elem.coeffs.size();
  const Int mod = pow_int(elem.p, static_cast<unsigned>(elem.M));
  // a_k = Σ_j c_j · C(j, k): accumulate Pascal's row C(j, ·) as j advances
  std::vector<Int> out(len, Int(0)), binrow(len, Int(0));
  binrow[0] = 1;  // C(0, ·)
  for (size_t j = 0; j < len; ++j) {
    if (j > 0) {
      // C(j, k) = C(j-1, k) + C(j-1, k-1), updated right to left
      for (size_t k = std::min(j, len - 1); k >= 1; --k) {
        binrow[k] += binrow[k - 1];
        if (binrow[k] >= mod) binrow[k] -= mod;
      }
    }
    const Int& cj = elem.coeffs[j];
    if (cj == 0) continue;
    for (size_t k = 0; k <= std::min(j, len - 1); ++k) {
      if (binrow[k] == 0) continue;
      out[k] = (out[k] + cj * binrow[k]) % mod;
    }
  }
  return out;
}

inline IwasawaInvariants invariants(const std::vector<Int>& poly, int64_t p, int M) {
  IwasawaInvariants out;
  out.precision = M;
  int best = M;  // residue 0 mod p^M counts as valuation >= M
  int best_k = -1;
  for (size_t k = 0; k < poly.size(); ++k) {
    if (poly[k] == 0) continue;
    const int v = valuation(poly[k], p);
    if (v < best) {
      best = v;
      best_k = static_cast<int>(k);
    }
  }
  if (best < M) {
    out.mu = best;
    out.lambda = best_k;
    out.valid = true;
  }
  return out;
}

inline IsotypicElement corestrict(const IsotypicElement& elem) {
  if (elem.n < 1) fail(errc::bad_input, "corestrict: need level n >= 1");
  const Int mod = pow_int(elem.p, static_cast<unsigned>(elem.M));
  const int64_t pn1 = pow_int(elem.p, static_cast<unsigned>(elem.n - 1)).get_si();
  IsotypicElement out;
  out.p = elem.p;
  out.n = elem.n - 1;
  out.i = elem.i;
  out.M = elem.M;
  out.coeffs.assign(static_cast<size_t>(pn1), Int(0));
  for (size_t j = 0; j < elem.coeffs.size(); ++j) {
    Int& slot = out.coeffs[j % static_cast<size_t>(pn1)];
    slot = (slot + elem.coeffs[j]) % mod;
  }
  return out;
}

}  // namespace mtel
