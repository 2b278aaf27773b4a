#pragma once

// Growth-formula layer: q_n, f_n, predicted λ for the quadratic-twist,
// supersingular and BSD growth laws, exact growth-model fitting of observed
// λ sequences, stabilized-λ detection, and the CM-conjecture evaluator.
//
// All fits are exact rational solves.  The 4-unknown model
// λ_n = a·p^{n−1} + b·q_idx(n) + c_{parity(n)} is always rank-deficient by
// one (t·p^{n−1} − t(p+1)·q_{n−1} − pt·[even] − t·[odd] ≡ 0 identically, and
// the analogous identity for the q_n convention), so the solution line is
// canonicalized: c_even, c_odd integral with c_even − c_odd in [0, p−1).

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mtel/arith.hpp"
#include "mtel/errors.hpp"
#include "mtel/mazur_tate.hpp"

namespace mtel {

inline Int q(int n, int64_t p) {
  if (n < 0) fail(errc::bad_input, "q: n must be >= 0");
  if (p < 2) fail(errc::bad_input, "q: p must be >= 2");
  const Int pn = pow_int(p, static_cast<unsigned>(n));
  // alternating sum p^{n−1} − p^{n−2} + …, terminal p−1 (n even) / p²−p (n odd)
  return (n % 2 == 0) ? Int((pn - 1) / (p + 1)) : Int((pn - p) / (p + 1));
}

inline Int f(int n, int64_t p, int d) {
  if (n < 1) fail(errc::bad_input, "f: n must be >= 1");
  if (d < 0 || d > 11) fail(errc::bad_input, "f: need 0 <= ord_p(disc) <= 11");
  const Int a = pow_int(p, static_cast<unsigned>(n)) * d / 12;
  const Int b = pow_int(p, static_cast<unsigned>(n - 1)) * d / 12;
  return a - b;
}

inline Int predicted_lambda_quad(int64_t p, int n, int64_t lambda_twist) {
  if (p < 3 || p % 2 == 0 || n < 1) fail(errc::bad_input, "predicted_lambda_quad: p odd, n >= 1");
  return Int((p - 1) / 2) * pow_int(p, static_cast<unsigned>(n - 1)) + lambda_twist;
}

inline Int predicted_lambda_ss(int64_t p, int n, int64_t lambda_plus, int64_t lambda_minus) {
  if (p < 3 || p % 2 == 0 || n < 1) fail(errc::bad_input, "predicted_lambda_ss: p odd, n >= 1");
  return Int((p - 1) / 2) * pow_int(p, static_cast<unsigned>(n - 1)) + q(n, p) +
         (n % 2 == 0 ? lambda_plus : lambda_minus);
}

inline Int predicted_lambda_bsd(int64_t p, int n, int d, int64_t lambda_X) {
  if (p < 3 || p % 2 == 0 || n < 1) fail(errc::bad_input, "predicted_lambda_bsd: p odd, n >= 1");
  if (d < 0 || d > 11) fail(errc::bad_input, "predicted_lambda_bsd: need 0 <= d <= 11");
  const Int t = Int(p - 1) * d * pow_int(p, static_cast<unsigned>(n - 1));
  if (t % 12 != 0)
    fail(errc::not_pot_ordinary_shape,
         "(p-1)*d*p^(n-1) not divisible by 12; theorem shape does not apply");
  return t / 12 + lambda_X;
}

enum class QIndex { q_n_minus_1, q_n };

inline const char* q_index_name(QIndex c) {
  return c == QIndex::q_n_minus_1 ? "q_{n-1}" : "q_n";
}

struct GrowthModel {
  Rat a;              // coefficient of p^{n−1}
  Rat b;              // coefficient of q_idx(n)
  Int c_even, c_odd;  // parity-dependent constants
  QIndex index_convention = QIndex::q_n_minus_1;
  int64_t p = 0;

  Rat eval(int n) const {
    const Int qv = q(index_convention == QIndex::q_n_minus_1 ? n - 1 : n, p);
    return a * pow_int(p, static_cast<unsigned>(n - 1)) + b * qv +
           (n % 2 == 0 ? c_even : c_odd);
  }
};

// residual model r_n = b·q_idx(n) + c_{parity(n)} (the Table 1 residual column)
struct ResidualModel {
  Rat b;
  Int c_even, c_odd;
  QIndex index_convention = QIndex::q_n_minus_1;
  int64_t p = 0;

  Rat eval(int n) const {
    const Int qv = q(index_convention == QIndex::q_n_minus_1 ? n - 1 : n, p);
    return b * qv + (n % 2 == 0 ? c_even : c_odd);
  }
};

namespace detail {

// reduced row echelon form over Rat; returns pivot column per row-rank order
inline std::vector<int> rref_rat(std::vector<std::vector<Rat>>& m) {
  const size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  std::vector<int> pivots;
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t sel = r;
    while (sel < rows && m[sel][c] == 0) ++sel;
    if (sel == rows) continue;
    std::swap(m[sel], m[r]);
    const Rat inv = Rat(1) / m[r][c];
    for (size_t j = c; j < cols; ++j) m[r][j] *= inv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      const Rat factor = m[i][c];
      for (size_t j = c; j < cols; ++j) m[i][j] -= factor * m[r][j];
    }
    pivots.push_back(static_cast<int>(c));
    ++r;
  }
  return pivots;
}

inline bool is_integer(const Rat& x) { return x.get_den() == 1; }

// Solve the growth system for one q-index convention.  Returns the
// canonicalized model, or nullopt when the system is inconsistent or the
// solution line has no integral presentation.  Throws bad_input when the
// points do not pin the model down to a line.
inline std::optional<GrowthModel> fit_growth_one(
    const std::vector<std::pair<int, Int>>& points, int64_t p, QIndex conv) {
  const size_t m = points.size();
  std::vector<std::vector<Rat>> aug(m, std::vector<Rat>(5, Rat(0)));
  for (size_t k = 0; k < m; ++k) {
    const auto& [n, lam] = points[k];
    if (n < 1) fail(errc::bad_input, "fit_growth: need n >= 1 for every point");
    aug[k][0] = pow_int(p, static_cast<unsigned>(n - 1));
    aug[k][1] = q(conv == QIndex::q_n_minus_1 ? n - 1 : n, p);
    aug[k][2] = (n % 2 == 0) ? 1 : 0;
    aug[k][3] = (n % 2 == 0) ? 0 : 1;
    aug[k][4] = lam;
  }
  auto pivots = rref_rat(aug);
  size_t rank = pivots.size();
  if (rank && pivots.back() == 4) return std::nullopt;  // 0 = nonzero row: inconsistent
  if (rank < 3)
    fail(errc::bad_input,
         "fit_growth: points do not span both parities and two levels of n");
  // particular solution with the free unknown set to 0
  Rat x0[4] = {Rat(0), Rat(0), Rat(0), Rat(0)};
  for (size_t r = 0; r < rank; ++r) x0[pivots[r]] = aug[r][4];
  // canonicalize along the analytic kernel direction
  Rat a = x0[0], b = x0[1], ce = x0[2], co = x0[3];
  Rat t;  // solution used is x0 + t·K
  Int m_int;
  if (conv == QIndex::q_n_minus_1) {
    // K = (1, −(p+1), −p, −1): c_odd' = m, c_even' = (ce − p·co) + p·m
    const Rat D = ce - p * co;
    if (!is_integer(D)) return std::nullopt;  // no integral presentation
    // pick m with c_even' − c_odd' = D + (p−1)m in [0, p−1)
    Int Dz(D.get_num());
    mpz_fdiv_q(m_int.get_mpz_t(), Dz.get_mpz_t(), Int(p - 1).get_mpz_t());
    m_int = -m_int;
    t = co - Rat(m_int);
    a += t;
    b -= Rat(p + 1) * t;
    co = Rat(m_int);
    ce = D + Rat(p) * Rat(m_int);
  } else {
    // K = (p, −(p+1), −1, −p): c_even' = m, c_odd' = (co − p·ce) + p·m
    const Rat D = co - p * ce;
    if (!is_integer(D)) return std::nullopt;
    // pick m with c_even' − c_odd' = −D − (p−1)m in [0, p−1)
    Int Dz(-D.get_num());
    mpz_fdiv_q(m_int.get_mpz_t(), Dz.get_mpz_t(), Int(p - 1).get_mpz_t());
    t = ce - Rat(m_int);
    a += Rat(p) * t;
    b -= Rat(p + 1) * t;
    ce = Rat(m_int);
    co = D + Rat(p) * Rat(m_int);
  }
  if (!is_integer(ce) || !is_integer(co)) return std::nullopt;
  GrowthModel model;
  model.a = a;
  model.b = b;
  model.c_even = Int(ce.get_num());
  model.c_odd = Int(co.get_num());
  model.index_convention = conv;
  model.p = p;
  for (const auto& [n, lam] : points)  // certify exactness on every input point
    if (model.eval(n) != lam) return std::nullopt;
  return model;
}

}  // namespace detail

inline GrowthModel fit_growth(const std::vector<std::pair<int, Int>>& points, int64_t p) {
  if (p < 3) fail(errc::bad_input, "fit_growth: p must be an odd prime");
  bool even_seen = false, odd_seen = false;
  for (const auto& [n, lam] : points) (n % 2 == 0 ? even_seen : odd_seen) = true;
  if (points.size() < 3 || !even_seen || !odd_seen)
    fail(errc::bad_input, "fit_growth: need >= 3 points spanning both parities");
  for (QIndex conv : {QIndex::q_n_minus_1, QIndex::q_n})
    if (auto model = detail::fit_growth_one(points, p, conv)) return *model;
  std::ostringstream os;
  os << "fit_growth: no exact model in either q-index convention for points";
  for (const auto& [n, lam] : points) os << " (" << n << ", " << lam << ")";
  fail(errc::inconsistent_fit, os.str());
}

// Fit the residual column r_n = b·q_idx(n) + c_{parity(n)}.  Both index
// conventions can reproduce the same data; prefer a presentable model
// (c_even, c_odd in [0, p)), breaking ties toward q_{n−1}.
inline ResidualModel fit_residual(const std::vector<std::pair<int, Int>>& points, int64_t p) {
  if (p < 3) fail(errc::bad_input, "fit_residual: p must be an odd prime");
  bool even_seen = false, odd_seen = false;
  for (const auto& [n, r] : points) (n % 2 == 0 ? even_seen : odd_seen) = true;
  if (points.size() < 3 || !even_seen || !odd_seen)
    fail(errc::bad_input, "fit_residual: need >= 3 points spanning both parities");
  std::vector<ResidualModel> fits;
  for (QIndex conv : {QIndex::q_n_minus_1, QIndex::q_n}) {
    const size_t m = points.size();
    std::vector<std::vector<Rat>> aug(m, std::vector<Rat>(4, Rat(0)));
    for (size_t k = 0; k < m; ++k) {
      const auto& [n, r] = points[k];
      if (n < 1) fail(errc::bad_input, "fit_residual: need n >= 1 for every point");
      aug[k][0] = q(conv == QIndex::q_n_minus_1 ? n - 1 : n, p);
      aug[k][1] = (n % 2 == 0) ? 1 : 0;
      aug[k][2] = (n % 2 == 0) ? 0 : 1;
      aug[k][3] = r;
    }
    auto pivots = detail::rref_rat(aug);
    size_t rank = pivots.size();
    if (rank && pivots.back() == 3) continue;  // inconsistent
    if (rank < 3) fail(errc::bad_input, "fit_residual: underdetermined system");
    Rat x0[3] = {Rat(0), Rat(0), Rat(0)};
    for (size_t r = 0; r < rank; ++r) x0[pivots[r]] = aug[r][3];
    if (!detail::is_integer(x0[1]) || !detail::is_integer(x0[2])) continue;
    ResidualModel model;
    model.b = x0[0];
    model.c_even = Int(x0[1].get_num());
    model.c_odd = Int(x0[2].get_num());
    model.index_convention = conv;
    model.p = p;
    bool ok = true;
    for (const auto& [n, r] : points)
      if (model.eval(n) != r) { ok = false; break; }
    if (ok) fits.push_back(std::move(model));
  }
  if (fits.empty()) {
    std::ostringstream os;
    os << "fit_residual: no exact integral model in either convention for points";
    for (const auto& [n, r] : points) os << " (" << n << ", " << r << ")";
    fail(errc::inconsistent_fit, os.str());
  }
  auto presentable = [&](const ResidualModel& f) {
    return f.c_even >= 0 && f.c_even < p && f.c_odd >= 0 && f.c_odd < p;
  };
  for (const auto& f : fits)
    if (presentable(f)) return f;
  return fits.front();
}

inline int64_t stable_lambda(const std::vector<IwasawaInvariants>& invariants_by_n) {
  if (invariants_by_n.size() < 2)
    fail(errc::bad_input, "stable_lambda: need at least two invariant entries");
  const auto& u = invariants_by_n[invariants_by_n.size() - 2];
  const auto& v = invariants_by_n.back();
  if (!u.valid || !v.valid)
    fail(errc::bad_input, "stable_lambda: last two entries must be valid (raise precision)");
  if (u.lambda != v.lambda)
    fail(errc::not_stabilized, "lambda still moving: " + std::to_string(u.lambda) + " -> " +
                                   std::to_string(v.lambda) + "; extend n");
  return v.lambda;
}

inline Int conjecture_cm_exponent(int64_t M, std::pair<int64_t, int64_t> lambda_pm, int64_t nu,
                                  int n, int64_t p) {
  if (n < 0) fail(errc::bad_input, "conjecture_cm_exponent: n must be >= 0");
  // literal formula: e_n = M·pⁿ + (q_n + λ±)·n + ν, λ⁺ for even n, λ⁻ for odd
  const int64_t lam = (n % 2 == 0) ? lambda_pm.first : lambda_pm.second;
  return Int(M) * pow_int(p, static_cast<unsigned>(n)) + (q(n, p) + lam) * n + nu;
}

}  // namespace mtel
