#pragma once

// Rational Hecke eigensymbols attached to elliptic curves.
//
// The simultaneous eigenspace  ∩_ℓ ker(T_ℓ − a_ℓ)  inside the ι-sign
// subspace is cut out modulo deterministic 62-bit primes; the 1-dim
// solution is CRT-lifted, rationally reconstructed, scaled to an integer
// vector whose induced P¹ function has content 1, and then every claimed
// eigen-identity is re-verified in exact arithmetic.  Soundness of the
// error paths: a kernel mod q always contains the reduction of the exact
// kernel, so dimension 0 mod q proves NoEigenspace; dimension ≥ 2 is only
// reported after two independent primes agree.

#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mtel/arith.hpp"
#include "mtel/ec.hpp"
#include "mtel/errors.hpp"
#include "mtel/linalg_mod.hpp"
#include "mtel/modsym.hpp"

namespace mtel {

struct Eigensymbol {
  int64_t level = 0;
  int sign = +1;
  std::string label;
  std::vector<Rat> values;  // one per basis symbol
  std::vector<std::pair<int64_t, int64_t>> identifying_eigenvalues;  // (ℓ, a_ℓ)
  std::optional<std::pair<int64_t, int>> p_normalized_at;  // (p, exponent applied)
  std::shared_ptr<const SymbolSpace> space;
  std::vector<Int> full_values;  // induced value w[x] for every P¹ index x
};

namespace detail {

// exact induced vector on all of P¹ from rational basis values; the result
// of the solver is always integral, which the caller asserts
inline std::vector<Rat> induce_full(const SymbolSpace& sp, const std::vector<Rat>& v) {
  const int32_t n = static_cast<int32_t>(sp.p1().size());
  std::vector<Rat> full(n, Rat(0));
  for (int32_t x = 0; x < n; ++x) {
    Rat acc(0);
    sp.for_each_term(x, [&](int32_t b, const Rat& c, int s) {
      if (s > 0)
        acc += c * v[b];
      else
        acc -= c * v[b];
    });
    full[x] = acc;
  }
  return full;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// solver

inline Eigensymbol eigensymbol(std::shared_ptr<const SymbolSpace> space, const Curve& E,
                               int sign, int64_t ell_budget = 50) {
  if (!space) fail(errc::bad_input, "eigensymbol: null space");
  if (sign != 1 && sign != -1) fail(errc::bad_input, "eigensymbol: sign must be ±1");
  const SymbolSpace& sp = *space;
  const int32_t dim = sp.dimension();
  const int64_t N = sp.level();
  if (dim == 0) fail(errc::no_eigenspace, "eigensymbol: the symbol space is trivial");

  // candidate Hecke primes: ℓ ≤ budget, ℓ ∤ N, ℓ ∤ conductor(E)
  std::vector<std::pair<int64_t, int64_t>> candidates;  // (ℓ, a_ℓ)
  for (int64_t ell = 2; ell <= ell_budget; ++ell) {
    if (!is_prime64(ell) || N % ell == 0) continue;
    if (E.conductor != 0 && E.conductor % ell == 0) continue;
    candidates.emplace_back(ell, ap(E, ell));
  }

  std::vector<crt_accumulator> crt(dim);
  int32_t pivot = -1;
  std::vector<std::pair<int64_t, int64_t>> used;
  int32_t not_isolated_count = 0, not_isolated_dim = 0;

  int64_t q = int64_t(1) << 62;
  for (int attempt = 0; attempt < 64; ++attempt) {
    q = prev_prime62(q);
    ModSpace ms;
    if (!sp.reduce_mod(q, ms)) continue;

    // sign-eigenspace of ι mod q
    ModMatrix A(dim, dim, q);
    for (int32_t i = 0; i < dim; ++i) {
      const int32_t y = sp.apply_matrix(sp.basis()[i], -1, 0, 0, 1);
      sp.add_row_mod(ms, y, 1, &A.a[static_cast<size_t>(i) * dim]);
      int64_t& d = A.at(i, i);
      d = (d - sign) % q;
      if (d < 0) d += q;
    }
    ModMatrix V = kernel_mod(std::move(A));
    int32_t k = V.cols;
    if (k == 0)
      fail(errc::no_eigenspace, "eigensymbol: empty sign-eigenspace at level " + std::to_string(N));

    std::vector<std::pair<int64_t, int64_t>> used_q;
    for (const auto& [ell, a] : candidates) {
      const int32_t k_before = k;
      if (k_before == 0) break;
      const auto H = heilbronn_merel(ell);
      const int64_t a_mod = a >= 0 ? a % q : q + a % q;
      if (k_before > 1) {
        // dense T mod q, then intersect the running subspace
        ModMatrix T(dim, dim, q);
        for (int32_t i = 0; i < dim; ++i) {
          int64_t* row = &T.a[static_cast<size_t>(i) * dim];
          const int32_t x = sp.basis()[i];
          for (const Mat22& h : H)
            sp.add_row_mod(ms, sp.apply_matrix(x, h.a, h.b, h.c, h.d), 1, row);
          row[i] = (row[i] + q - a_mod) % q;
        }
        ModMatrix W = matmul(T, V);
        ModMatrix K2 = kernel_mod(std::move(W));
        used_q.emplace_back(ell, a);
        k = K2.cols;
        if (k == 0) break;
        V = matmul(V, K2);
      } else {
        // k == 1: screen the line against the remaining eigenvalues
        bool ok = true;
        for (int32_t i = 0; i < dim && ok; ++i) {
          int64_t acc = 0;
          const int32_t x = sp.basis()[i];
          for (const Mat22& h : H) {
            const int32_t y = sp.apply_matrix(x, h.a, h.b, h.c, h.d);
            acc = (acc + sp.row_dot_mod(ms, y, V.a.data())) % q;
          }
          const int64_t want = mulmod64(a_mod, V.at(i, 0), q);
          if (acc != want) ok = false;
        }
        if (!ok) {
          k = 0;
          break;
        }
      }
    }
    if (k == 0)
      fail(errc::no_eigenspace,
           "eigensymbol: no simultaneous eigenspace for " + E.label + " at level " +
               std::to_string(N));
    if (k > 1) {
      ++not_isolated_count;
      not_isolated_dim = (not_isolated_count == 1) ? k : std::min(not_isolated_dim, k);
      if (not_isolated_count >= 2)
        fail(errc::not_isolated, "eigensymbol: eigenspace dimension " +
                                     std::to_string(not_isolated_dim) + " after ell <= " +
                                     std::to_string(ell_budget));
      continue;  // possibly an unlucky prime; confirm with the next one
    }

    // one-dimensional: normalize the column by its pivot and accumulate
    std::vector<int64_t> col(dim);
    for (int32_t i = 0; i < dim; ++i) col[i] = V.at(i, 0);
    if (pivot < 0) {
      for (int32_t i = 0; i < dim; ++i)
        if (col[i] != 0) {
          pivot = i;
          break;
        }
      used = used_q;
    }
    if (pivot < 0 || col[pivot] == 0) continue;  // unlucky prime for this pivot
    const int64_t inv = invmod64(col[pivot], q);
    for (int32_t i = 0; i < dim; ++i) crt[i].add(mulmod64(col[i], inv, q), q);

    // attempt rational reconstruction of every coordinate
    std::vector<Rat> w(dim);
    bool all_ok = true;
    for (int32_t i = 0; i < dim && all_ok; ++i)
      all_ok = rat_reconstruct(crt[i].residue, crt[i].modulus, w[i]);
    if (!all_ok) continue;

    // integer vector whose induced P¹ function has content 1
    std::vector<Rat> full = detail::induce_full(sp, w);
    Int L(1);
    for (const Rat& f : full) L = lcm(L, Int(f.get_den()));
    std::vector<Int> F(full.size());
    Int content(0);
    for (size_t x = 0; x < full.size(); ++x) {
      Rat t = full[x] * L;
      if (t.get_den() != 1) fail(errc::internal, "eigensymbol: lcm clearing failed");
      F[x] = t.get_num();
      content = gcd(content, F[x]);
    }
    if (content == 0) continue;  // zero vector: reconstruction garbage, keep going
    int first_sign = 0;
    for (size_t x = 0; x < F.size() && first_sign == 0; ++x)
      if (F[x] != 0) first_sign = sgn(F[x]);
    if (first_sign < 0) content = -content;
    for (Int& f : F) f /= content;

    // exact verification of every claimed identity
    std::vector<Rat> v(dim);
    for (int32_t i = 0; i < dim; ++i) v[i] = Rat(F[sp.basis()[i]]);
    bool verified = true;
    for (int32_t i = 0; i < dim && verified; ++i) {
      const int32_t y = sp.apply_matrix(sp.basis()[i], -1, 0, 0, 1);
      if (F[y] != sign * F[sp.basis()[i]]) verified = false;
    }
    for (const auto& [ell, a] : used) {
      if (!verified) break;
      const auto H = heilbronn_merel(ell);
      for (int32_t i = 0; i < dim && verified; ++i) {
        Int acc(0);
        const int32_t x = sp.basis()[i];
        for (const Mat22& h : H) acc += F[sp.apply_matrix(x, h.a, h.b, h.c, h.d)];
        if (acc != a * F[x]) verified = false;
      }
    }
    if (!verified) continue;  // needs more primes

    Eigensymbol out;
    out.level = N;
    out.sign = sign;
    out.label = E.label;
    out.values = std::move(v);
    out.identifying_eigenvalues = used;
    out.space = space;
    out.full_values = std::move(F);
    return out;
  }
  fail(errc::internal, "eigensymbol: multimodular reconstruction did not converge");
}

// ---------------------------------------------------------------------------
// p-adic normalization

inline int rat_valuation(const Rat& r, int64_t p) {
  if (r == 0) fail(errc::internal, "valuation of zero");
  return valuation(Int(r.get_num()), p) - valuation(Int(r.get_den()), p);
}

inline Eigensymbol normalize_at_p(Eigensymbol symbol, int64_t p) {
  bool any = false;
  int m = 0;
  for (const Rat& v : symbol.values) {
    if (v == 0) continue;
    const int val = rat_valuation(v, p);
    m = any ? std::min(m, val) : val;
    any = true;
  }
  if (!any) fail(errc::bad_input, "normalize_at_p: zero symbol");
  if (m != 0) {
    Rat scale;
    if (m > 0)
      scale = Rat(1, pow_int(p, static_cast<unsigned>(m)));
    else
      scale = Rat(pow_int(p, static_cast<unsigned>(-m)));
    for (Rat& v : symbol.values) v *= scale;
    if (!symbol.full_values.empty()) {
      const Int pm = pow_int(p, static_cast<unsigned>(m > 0 ? m : -m));
      for (Int& f : symbol.full_values) {
        if (m > 0) {
          if (f % pm != 0) fail(errc::internal, "normalize_at_p: non-integral induced value");
          f /= pm;
        } else {
          f *= pm;
        }
      }
    }
  }
  symbol.p_normalized_at = std::make_pair(p, -m);
  return symbol;
}

// ---------------------------------------------------------------------------
// evaluation at cusps: Ψ({∞} − {r}) by continued-fraction convergents

enum class CfKind { floor_cf, nearest_cf };

inline Rat evaluate_cf(const Eigensymbol& symbol, const Rat& r, CfKind kind) {
  if (!symbol.space) fail(errc::bad_input, "evaluate: symbol has no attached space");
  const SymbolSpace& sp = *symbol.space;
  const int64_t N = sp.level();
  const P1Table& p1 = sp.p1();
  Int a(r.get_num()), b(r.get_den());
  Int pp(1), qq(0), ppp(0), qqq(1);  // (p_{j-1}, q_{j-1}), (p_{j-2}, q_{j-2})
  Int total(0);
  while (b != 0) {
    Int k;
    if (kind == CfKind::floor_cf) {
      mpz_fdiv_q(k.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    } else {
      Int num = 2 * a + b, den = 2 * b;
      mpz_fdiv_q(k.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    }
    Int pj = k * pp + ppp, qj = k * qq + qqq;
    const Int D = pj * qq - pp * qj;  // ±1
    const int64_t u = mod_i64(qj, N);
    const int64_t v = mod_i64(D * qq, N);
    total += symbol.full_values[p1.lookup(u, v)];
    Int rem = a - k * b;
    a = b;
    b = rem;
    ppp = pp;
    qqq = qq;
    pp = pj;
    qq = qj;
  }
  return Rat(total);
}

inline Rat evaluate(const Eigensymbol& symbol, const Rat& r) {
  return evaluate_cf(symbol, r, CfKind::floor_cf);
}

// ---------------------------------------------------------------------------
// versioned disk cache: one file per (level, label, sign); hits reproduce
// bit-identical values

inline std::string eigensymbol_cache_name(int64_t level, const std::string& label, int sign) {
  std::string safe;
  for (char c : label)
    safe += (std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return "eig_" + std::to_string(level) + "_" + safe + "_" + (sign > 0 ? "plus" : "minus") +
         ".mtc";
}

inline void save_eigensymbol(const Eigensymbol& s, const std::string& path) {
  std::ostringstream out;
  out << "mtel-eigensymbol v1\n";
  out << "level " << s.level << "\n";
  out << "label " << s.label << "\n";
  out << "sign " << (s.sign > 0 ? "+1" : "-1") << "\n";
  out << "eigenvalues " << s.identifying_eigenvalues.size() << "\n";
  for (const auto& [ell, a] : s.identifying_eigenvalues) out << ell << " " << a << "\n";
  out << "values " << s.values.size() << "\n";
  for (const Rat& v : s.values)
    out << v.get_num().get_str() << "/" << v.get_den().get_str() << "\n";
  out << "end\n";
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(errc::io_error, "cannot write cache file " + path);
  f << out.str();
  if (!f) fail(errc::io_error, "short write to cache file " + path);
}

// returns false on miss (absent file or version/shape mismatch)
inline bool load_eigensymbol(const std::string& path, std::shared_ptr<const SymbolSpace> space,
                             Eigensymbol& out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return false;
  std::string line;
  if (!std::getline(f, line) || line != "mtel-eigensymbol v1") return false;
  int64_t level = -1;
  std::string label;
  int sign = 0;
  size_t n_eig = 0, n_val = 0;
  if (!std::getline(f, line) || line.rfind("level ", 0) != 0) return false;
  level = std::stoll(line.substr(6));
  if (!std::getline(f, line) || line.rfind("label ", 0) != 0) return false;
  label = line.substr(6);
  if (!std::getline(f, line) || line.rfind("sign ", 0) != 0) return false;
  sign = (line.substr(5) == "+1") ? 1 : (line.substr(5) == "-1" ? -1 : 0);
  if (sign == 0) return false;
  if (!std::getline(f, line) || line.rfind("eigenvalues ", 0) != 0) return false;
  n_eig = std::stoul(line.substr(12));
  std::vector<std::pair<int64_t, int64_t>> eig;
  for (size_t i = 0; i < n_eig; ++i) {
    if (!std::getline(f, line)) return false;
    std::istringstream ss(line);
    int64_t ell, a;
    if (!(ss >> ell >> a)) return false;
    eig.emplace_back(ell, a);
  }
  if (!std::getline(f, line) || line.rfind("values ", 0) != 0) return false;
  n_val = std::stoul(line.substr(7));
  if (!space || space->level() != level) return false;
  if (n_val != static_cast<size_t>(space->dimension())) return false;
  std::vector<Rat> vals(n_val);
  for (size_t i = 0; i < n_val; ++i) {
    if (!std::getline(f, line)) return false;
    const auto slash = line.find('/');
    if (slash == std::string::npos) return false;
    vals[i] = Rat(Int(line.substr(0, slash)), Int(line.substr(slash + 1)));
    vals[i].canonicalize();
  }
  if (!std::getline(f, line) || line != "end") return false;
  out.level = level;
  out.sign = sign;
  out.label = label;
  out.values = std::move(vals);
  out.identifying_eigenvalues = std::move(eig);
  out.p_normalized_at.reset();
  out.space = space;
  // regenerate the induced P¹ vector; it must be integral
  std::vector<Rat> full = detail::induce_full(*space, out.values);
  out.full_values.resize(full.size());
  for (size_t x = 0; x < full.size(); ++x) {
    if (full[x].get_den() != 1) return false;
    out.full_values[x] = full[x].get_num();
  }
  // cheap sanity: the ι-eigen property
  for (int32_t i = 0; i < space->dimension(); ++i) {
    const int32_t y = space->apply_matrix(space->basis()[i], -1, 0, 0, 1);
    if (out.full_values[y] != out.sign * out.full_values[space->basis()[i]]) return false;
  }
  return true;
}

}  // namespace mtel
