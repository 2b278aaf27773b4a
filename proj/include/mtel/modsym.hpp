#pragma once

// Weight-2 modular symbols for Γ₀(N) over Q in the Manin presentation:
// free generators indexed by P¹(Z/N), modulo the two-term relation
// x + xS = 0 and the three-term relation x + x·ST + x·(ST)² = 0.
// The quotient is computed exactly: two-term relations by a signed
// union-find, three-term relations by sparse elimination over Q that
// prefers unit pivots.
//
// Right action of [a,b;c,d]: (u:v) -> (au+cv : bu+dv), so
//   S = [0,-1;1,0]:      (u:v) -> (v : -u)
//   ST = [0,-1;1,1]:     (u:v) -> (v : v-u)
//   (ST)² = [-1,-1;1,0]: (u:v) -> (v-u : -u)
//   ι = [-1,0;0,1]:      (u:v) -> (-u : v)

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "mtel/arith.hpp"
#include "mtel/errors.hpp"
#include "mtel/linalg_mod.hpp"
#include "mtel/p1.hpp"

namespace mtel {

struct Mat22 {
  int64_t a, b, c, d;
};

// Merel's Heilbronn family X_n (Merel p.87); only n = ell prime is used.
inline std::vector<Mat22> heilbronn_merel(int64_t n) {
  std::vector<Mat22> out;
  for (int64_t a = 1; a <= n; ++a) {
    const int64_t q = n / a;
    if (q * a == n) {
      const int64_t d = q;
      for (int64_t b = 0; b < a; ++b) out.push_back({a, b, 0, d});
      for (int64_t c = 1; c < d; ++c) out.push_back({a, 0, c, d});
    }
    for (int64_t d = q + 1; d <= n; ++d) {
      const int64_t bc = a * d - n;
      for (int64_t c = bc / a + 1; c < d; ++c)
        if (bc % c == 0) out.push_back({a, bc / c, c, d});
    }
  }
  return out;
}

// Sparse row: (basis position, coefficient), sorted by position.
using SparseRow = std::vector<std::pair<int32_t, Rat>>;

// Flattened reduction map with coefficients reduced mod q (solver fuel).
struct ModSpace {
  int64_t q = 0;
  std::vector<int64_t> off;   // per expr id: [off[e], off[e+1]) into bp/cf
  std::vector<int32_t> bp;    // basis positions
  std::vector<int64_t> cf;    // coefficients mod q
};

class SymbolSpace {
 public:
  explicit SymbolSpace(int64_t N) : N_(N), p1_(N) { build(); }

  int64_t level() const { return N_; }
  const P1Table& p1() const { return p1_; }
  const std::vector<int32_t>& basis() const { return basis_; }
  int32_t dimension() const { return static_cast<int32_t>(basis_.size()); }

  // P¹ index of (u:v)·[a,b;c,d]
  int32_t apply_matrix(int32_t x, int64_t a, int64_t b, int64_t c, int64_t d) const {
    return p1_.apply(x, a, b, c, d);
  }

  // invoke fn(basis_pos, coeff, sign) over the terms of w[x]; the term's
  // value is sign * coeff with sign in {+1,-1}
  template <class F>
  void for_each_term(int32_t x, F&& fn) const {
    const int32_t r = root_[x];
    const int s = sgn_[x];
    if (bpos_[r] >= 0) {
      fn(bpos_[r], kOne, s);
      return;
    }
    for (const auto& [b, c] : exprs_[expr_id_[r]]) fn(b, c, s);
  }

  // w[x] as an explicit sparse row over the basis
  SparseRow reduction_row(int32_t x) const {
    SparseRow out;
    for_each_term(x, [&](int32_t b, const Rat& c, int s) {
      out.emplace_back(b, s > 0 ? c : Rat(-c));
    });
    std::sort(out.begin(), out.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
    return out;
  }

  // dense matrix of ι (function side: row i expands w[ι(basis_i)])
  std::vector<std::vector<Rat>> iota_matrix() const {
    const int32_t dim = dimension();
    std::vector<std::vector<Rat>> M(dim, std::vector<Rat>(dim, Rat(0)));
    for (int32_t i = 0; i < dim; ++i) {
      const int32_t y = p1_.apply(basis_[i], -1, 0, 0, 1);
      for_each_term(y, [&](int32_t b, const Rat& c, int s) {
        if (s > 0)
          M[i][b] += c;
        else
          M[i][b] -= c;
      });
    }
    return M;
  }

  // reduction map with every coefficient reduced mod q; false when q
  // divides some denominator (caller moves to the next prime)
  bool reduce_mod(int64_t q, ModSpace& out) const {
    out.q = q;
    out.off.assign(exprs_.size() + 1, 0);
    out.bp.clear();
    out.cf.clear();
    for (size_t e = 0; e < exprs_.size(); ++e) {
      for (const auto& [b, c] : exprs_[e]) {
        int64_t v;
        if (!rat_mod(c, q, v)) return false;
        out.bp.push_back(b);
        out.cf.push_back(v);
      }
      out.off[e + 1] = static_cast<int64_t>(out.bp.size());
    }
    return true;
  }

  // (w[x] mod q) · v for a dense vector v of basis coordinates
  int64_t row_dot_mod(const ModSpace& ms, int32_t x, const int64_t* v) const {
    const int64_t q = ms.q;
    const int32_t r = root_[x];
    int64_t acc = 0;
    if (bpos_[r] >= 0) {
      acc = v[bpos_[r]];
    } else {
      const int64_t e = expr_id_[r];
      for (int64_t t = ms.off[e]; t < ms.off[e + 1]; ++t)
        acc = (acc + mulmod64(ms.cf[t], v[ms.bp[t]], q)) % q;
    }
    if (sgn_[x] < 0 && acc != 0) acc = q - acc;
    return acc;
  }

  // acc[basis_pos] += mult * (w[x] mod q), acc entries kept in [0, q)
  void add_row_mod(const ModSpace& ms, int32_t x, int64_t mult, int64_t* acc) const {
    const int64_t q = ms.q;
    const int32_t r = root_[x];
    int64_t m = sgn_[x] > 0 ? mult : q - mult;
    if (m == q) m = 0;
    if (bpos_[r] >= 0) {
      acc[bpos_[r]] = (acc[bpos_[r]] + m) % q;
      return;
    }
    const int64_t e = expr_id_[r];
    for (int64_t t = ms.off[e]; t < ms.off[e + 1]; ++t) {
      const int32_t b = ms.bp[t];
      acc[b] = (acc[b] + mulmod64(m, ms.cf[t], q)) % q;
    }
  }

 private:
  inline static const Rat kOne{1};

  int64_t N_;
  P1Table p1_;
  std::vector<int32_t> basis_;    // P¹ indices of free generators, ascending
  std::vector<int32_t> root_;    // per P¹ index: root P¹ index
  std::vector<int8_t> sgn_;      // per P¹ index: w[x] = sgn * w[root]
  std::vector<int32_t> bpos_;    // per root: basis position, or -1
  std::vector<int32_t> expr_id_;  // per root: index into exprs_, or -1
  std::vector<SparseRow> exprs_;  // solved roots (empty row = zero symbol)

  void build() {
    const int32_t n = static_cast<int32_t>(p1_.size());
    // stage 1: signed union-find over the involution S
    std::vector<int32_t> parent(n);
    std::vector<int8_t> psign(n, 1);
    std::vector<uint8_t> is_zero(n, 0);
    for (int32_t i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](int32_t x) {
      int s = 1;
      int32_t r = x;
      while (parent[r] != r) {
        s *= psign[r];
        r = parent[r];
      }
      // path compression
      int32_t c = x;
      int cs = s;  // sign from c to r
      while (parent[c] != r) {
        const int32_t nxt = parent[c];
        const int8_t old = psign[c];  // sign from c to nxt
        parent[c] = r;
        psign[c] = static_cast<int8_t>(cs);
        cs *= old;  // sign from nxt to r
        c = nxt;
      }
      return std::pair<int32_t, int>(r, s);
    };
    for (int32_t x = 0; x < n; ++x) {
      const int32_t y = p1_.apply(x, 0, -1, 1, 0);  // xS
      auto [rx, sx] = find(x);
      auto [ry, sy] = find(y);
      // relation w_x + w_y = 0
      if (rx == ry) {
        if (sx == sy) is_zero[rx] = 1;  // 2 w = 0
      } else {
        parent[rx] = ry;
        psign[rx] = static_cast<int8_t>(-sx * sy);
        is_zero[ry] |= is_zero[rx];
      }
    }
    root_.assign(n, 0);
    sgn_.assign(n, 1);
    for (int32_t x = 0; x < n; ++x) {
      auto [r, s] = find(x);
      root_[x] = r;
      sgn_[x] = static_cast<int8_t>(s);
    }

    // variables = non-zero roots
    std::vector<int32_t> vid(n, -1), var_root;
    for (int32_t x = 0; x < n; ++x)
      if (root_[x] == x && !is_zero[x]) {
        vid[x] = static_cast<int32_t>(var_root.size());
        var_root.push_back(x);
      }
    const int32_t nvar = static_cast<int32_t>(var_root.size());

    // stage 2: three-term rows, one per (ST)-orbit
    std::vector<std::map<int32_t, Rat>> rows;
    std::vector<uint8_t> seen(n, 0);
    for (int32_t x = 0; x < n; ++x) {
      if (seen[x]) continue;
      const int32_t x1 = p1_.apply(x, 0, -1, 1, 1);
      const int32_t x2 = p1_.apply(x1, 0, -1, 1, 1);
      seen[x] = seen[x1] = seen[x2] = 1;
      std::map<int32_t, Rat> row;
      for (int32_t s : {x, x1, x2}) {
        const int32_t r = root_[s];
        if (is_zero[r]) continue;
        Rat& slot = row[vid[r]];
        slot += sgn_[s];
        if (slot == 0) row.erase(vid[r]);
      }
      if (!row.empty()) rows.push_back(std::move(row));
    }

    // stage 3: sparse exact elimination
    const int32_t nrow = static_cast<int32_t>(rows.size());
    std::vector<uint8_t> solved(nvar, 0), done(nrow, 0);
    std::vector<std::map<int32_t, Rat>> sol(nvar);
    std::vector<std::set<int32_t>> occ_row(nvar), occ_sol(nvar);
    for (int32_t i = 0; i < nrow; ++i)
      for (const auto& [v, c] : rows[i]) occ_row[v].insert(i);
    int32_t remaining = nrow;
    while (remaining > 0) {
      int32_t best = -1;
      size_t best_size = 0;
      for (int32_t i = 0; i < nrow; ++i) {
        if (done[i]) continue;
        if (best < 0 || rows[i].size() < best_size) {
          best = i;
          best_size = rows[i].size();
        }
      }
      done[best] = 1;
      --remaining;
      auto& row = rows[best];
      for (const auto& [v, c] : row) occ_row[v].erase(best);
      if (row.empty()) continue;
      // pivot: prefer |coeff| = 1; then fewest occurrences; then larger var
      int32_t piv = -1;
      bool piv_unit = false;
      size_t piv_occ = 0;
      for (const auto& [v, c] : row) {
        const bool unit = (c == 1 || c == -1);
        const size_t occ = occ_row[v].size() + occ_sol[v].size();
        if (piv < 0 || (unit && !piv_unit) ||
            (unit == piv_unit && (occ < piv_occ || (occ == piv_occ && v > piv)))) {
          piv = v;
          piv_unit = unit;
          piv_occ = occ;
        }
      }
      const Rat pc = row[piv];
      row.erase(piv);
      std::map<int32_t, Rat> expr;
      for (const auto& [w, c] : row) {
        Rat e = -c / pc;
        expr.emplace(w, std::move(e));
      }
      solved[piv] = 1;
      sol[piv] = expr;
      for (const auto& [w, e] : expr) occ_sol[w].insert(piv);
      // substitute into pending rows containing piv
      const std::set<int32_t> rids = occ_row[piv];
      for (const int32_t rid : rids) {
        auto& rr = rows[rid];
        const Rat mult = rr[piv];
        rr.erase(piv);
        occ_row[piv].erase(rid);
        for (const auto& [w, e] : expr) {
          Rat& slot = rr[w];
          const bool fresh = (slot == 0);
          slot += mult * e;
          if (slot == 0)
            rr.erase(w), occ_row[w].erase(rid);
          else if (fresh)
            occ_row[w].insert(rid);
        }
      }
      // substitute into solved expressions containing piv
      const std::set<int32_t> svs = occ_sol[piv];
      for (const int32_t sv : svs) {
        auto& se = sol[sv];
        const Rat mult = se[piv];
        se.erase(piv);
        for (const auto& [w, e] : expr) {
          Rat& slot = se[w];
          const bool fresh = (slot == 0);
          slot += mult * e;
          if (slot == 0)
            se.erase(w), occ_sol[w].erase(sv);
          else if (fresh)
            occ_sol[w].insert(sv);
        }
      }
      occ_row[piv].clear();
      occ_sol[piv].clear();
    }

    // stage 4: freeze basis and expressions
    bpos_.assign(n, -1);
    expr_id_.assign(n, -1);
    std::vector<int32_t> var_bpos(nvar, -1);
    for (int32_t v = 0; v < nvar; ++v)
      if (!solved[v]) basis_.push_back(var_root[v]);
    std::sort(basis_.begin(), basis_.end());
    for (int32_t b = 0; b < static_cast<int32_t>(basis_.size()); ++b)
      bpos_[basis_[b]] = b;
    for (int32_t v = 0; v < nvar; ++v)
      if (!solved[v]) var_bpos[v] = bpos_[var_root[v]];
    auto push_expr = [&](int32_t root, SparseRow row) {
      expr_id_[root] = static_cast<int32_t>(exprs_.size());
      exprs_.push_back(std::move(row));
    };
    for (int32_t v = 0; v < nvar; ++v) {
      if (!solved[v]) continue;
      SparseRow row;
      for (const auto& [w, c] : sol[v]) {
        if (solved[w]) fail(errc::internal, "elimination left a solved key");
        row.emplace_back(var_bpos[w], c);
      }
      std::sort(row.begin(), row.end(),
                [](const auto& l, const auto& r) { return l.first < r.first; });
      push_expr(var_root[v], row);
    }
    for (int32_t x = 0; x < n; ++x)
      if (root_[x] == x && is_zero[x]) push_expr(x, {});
  }
};

inline SymbolSpace build_space(int64_t N) { return SymbolSpace(N); }

inline std::vector<std::vector<Rat>> hecke_matrix(const SymbolSpace& space, int64_t ell) {
  if (!is_prime64(ell) || space.level() % ell == 0)
    fail(errc::bad_prime, "hecke_matrix: need a prime ell with ell ∤ N");
  const int32_t dim = space.dimension();
  const auto H = heilbronn_merel(ell);
  std::vector<std::vector<Rat>> M(dim, std::vector<Rat>(dim, Rat(0)));
  for (int32_t i = 0; i < dim; ++i) {
    const int32_t x = space.basis()[i];
    for (const Mat22& h : H) {
      const int32_t y = space.apply_matrix(x, h.a, h.b, h.c, h.d);
      space.for_each_term(y, [&](int32_t b, const Rat& c, int s) {
        if (s > 0)
          M[i][b] += c;
        else
          M[i][b] -= c;
      });
    }
  }
  return M;
}

// check w[x] + w[xS] = 0 and w[x] + w[x·ST] + w[x·(ST)²] = 0 for every x
inline bool verify_relations(const SymbolSpace& space) {
  const int32_t n = static_cast<int32_t>(space.p1().size());
  const int32_t dim = space.dimension();
  std::vector<Rat> acc(dim, Rat(0));
  auto accumulate = [&](int32_t x) {
    space.for_each_term(x, [&](int32_t b, const Rat& c, int s) {
      if (s > 0)
        acc[b] += c;
      else
        acc[b] -= c;
    });
  };
  for (int32_t x = 0; x < n; ++x) {
    std::fill(acc.begin(), acc.end(), Rat(0));
    accumulate(x);
    accumulate(space.apply_matrix(x, 0, -1, 1, 0));
    for (const Rat& v : acc)
      if (v != 0) return false;
    std::fill(acc.begin(), acc.end(), Rat(0));
    const int32_t x1 = space.apply_matrix(x, 0, -1, 1, 1);
    const int32_t x2 = space.apply_matrix(x1, 0, -1, 1, 1);
    accumulate(x);
    accumulate(x1);
    accumulate(x2);
    for (const Rat& v : acc)
      if (v != 0) return false;
  }
  return true;
}

}  // namespace mtel
