#pragma once

// Orchestration: in-memory symbol-space sharing, eigensymbol disk cache,
// end-to-end theta runs with precision escalation, stabilized twist runs,
// and the report builders behind the CLI subcommands.

#include <algorithm>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mtel/dataset.hpp"
#include "mtel/ec.hpp"
#include "mtel/eigensymbol.hpp"
#include "mtel/errors.hpp"
#include "mtel/growth.hpp"
#include "mtel/mazur_tate.hpp"
#include "mtel/modsym.hpp"

namespace mtel {

struct PipelineOptions {
  int precision = 32;    // starting working precision M
  int max_precision = 1024;
  std::string cache_dir;  // empty: no disk cache
  int threads = 1;
  int64_t max_evaluations = 1000000;  // cost guard on phi(p^(n_max+1))
};

class SpaceCache {
 public:
  std::shared_ptr<const SymbolSpace> get(int64_t level) {
    auto it = spaces_.find(level);
    if (it != spaces_.end()) return it->second;
    auto sp = std::make_shared<const SymbolSpace>(level);
    spaces_.emplace(level, sp);
    return sp;
  }

 private:
  std::map<int64_t, std::shared_ptr<const SymbolSpace>> spaces_;
};

inline Eigensymbol cached_eigensymbol(SpaceCache& spaces, const Curve& E, int sign,
                                      const std::string& cache_dir) {
  const int64_t level = E.conductor.get_si();
  auto sp = spaces.get(level);
  if (!cache_dir.empty()) {
    std::filesystem::create_directories(cache_dir);
    const auto path =
        std::filesystem::path(cache_dir) / eigensymbol_cache_name(level, E.label, sign);
    Eigensymbol out;
    if (load_eigensymbol(path.string(), sp, out)) return out;
    Eigensymbol fresh = eigensymbol(sp, E, sign);
    save_eigensymbol(fresh, path.string());
    return fresh;
  }
  return eigensymbol(sp, E, sign);
}

inline int64_t phi_p_power(int64_t p, int n_plus_1) {
  Int v = pow_int(p, static_cast<unsigned>(n_plus_1 - 1)) * (p - 1);
  if (!v.fits_slong_p()) return INT64_MAX;
  return v.get_si();
}

inline void check_cost_guard(int64_t p, int n_max, const PipelineOptions& opts) {
  const int64_t cost = phi_p_power(p, n_max + 1);
  if (cost > opts.max_evaluations)
    fail(errc::cost_guard, "phi(p^(n_max+1)) = " + (cost == INT64_MAX
                               ? std::string("overflow")
                               : std::to_string(cost)) +
                               " evaluations exceeds the guard of " +
                               std::to_string(opts.max_evaluations));
}

// ---------------------------------------------------------------------------

struct ThetaCell {
  int n = 0;
  int i = 0;
  IwasawaInvariants inv;
  bool corestriction_zero = false;  // corestrict(theta_{n,i}) == 0 mod p^32
};

struct ThetaRun {
  std::string label;
  int64_t p = 0;
  int n_max = 0;
  std::vector<int> is;
  std::vector<ThetaCell> cells;  // ordered by (n, i-list position)

  const ThetaCell& cell(int n, int i) const {
    for (const auto& c : cells)
      if (c.n == n && c.i == i) return c;
    fail(errc::internal, "theta run has no cell (n=" + std::to_string(n) +
                             ", i=" + std::to_string(i) + ")");
  }
};

// omega-project with precision escalation; raw stays exact throughout.
inline IwasawaInvariants project_invariants(const RawTheta& raw, int i,
                                            const PipelineOptions& opts) {
  IwasawaInvariants inv;
  for (int M = opts.precision; M <= opts.max_precision; M *= 2) {
    if (raw.padic_modulus != 0 && pow_int(raw.p, static_cast<unsigned>(M)) >
                                      raw.padic_modulus)
      break;  // a stabilized input cannot escalate beyond its carried precision
    auto elem = omega_project(raw, i, M);
    inv = invariants(to_polynomial(elem), raw.p, M);
    if (inv.valid) return inv;
  }
  return inv;  // invalid at max precision: reported, caller decides
}

inline ThetaRun theta_run(SpaceCache& spaces, const Curve& E, int64_t p, int n_max,
                          std::vector<int> is, const PipelineOptions& opts) {
  if (n_max < 1) fail(errc::bad_input, "theta: n_max must be >= 1");
  check_cost_guard(p, n_max, opts);
  ThetaRun run;
  run.label = E.label;
  run.p = p;
  run.n_max = n_max;
  run.is = is;
  auto plus = normalize_at_p(cached_eigensymbol(spaces, E, +1, opts.cache_dir), p);
  auto minus = normalize_at_p(cached_eigensymbol(spaces, E, -1, opts.cache_dir), p);
  for (int n = 1; n <= n_max; ++n) {
    const RawTheta raw = raw_theta(plus, minus, p, n, opts.threads);
    for (int i : is) {
      ThetaCell cell;
      cell.n = n;
      cell.i = i;
      cell.inv = project_invariants(raw, i, opts);
      auto co = corestrict(omega_project(raw, i, 32));
      cell.corestriction_zero = true;
      for (const auto& c : co.coeffs)
        if (c != 0) {
          cell.corestriction_zero = false;
          break;
        }
      run.cells.push_back(std::move(cell));
    }
  }
  return run;
}

// ---------------------------------------------------------------------------

namespace detail {

// a_p of a curve with multiplicative reduction at p >= 5: +1 when split,
// -1 when non-split, decided by whether -c6 of a p-minimal model is a
// square mod p.
inline int64_t multiplicative_ap(const Curve& E, int64_t p) {
  Int c4 = E.c4, c6 = E.c6, disc = E.disc;
  const Int p4 = pow_int(Int(p), 4), p6 = pow_int(Int(p), 6), p12 = pow_int(Int(p), 12);
  while (c4 % p4 == 0 && c6 % p6 == 0 && disc % p12 == 0) {
    c4 /= p4;
    c6 /= p6;
    disc /= p12;
  }
  const int64_t r = mod_i64(-c6, p);
  if (r == 0) fail(errc::internal, "multiplicative_ap: p | c6 on a minimal model");
  return powmod64(r, (p - 1) / 2, p) == 1 ? 1 : -1;
}

}  // namespace detail

struct StabilizedRun {
  std::string label;
  int64_t p = 0;
  int i = 0;
  std::string reduction;   // "good-ordinary" or "multiplicative"
  std::string alpha_desc;  // e.g. "hensel(a_p=-2) mod 5^32" or "+1"
  std::vector<IwasawaInvariants> by_n;  // n = 0..n_max
};

// Stabilized theta_{n,i} run for a curve that is semistable (good ordinary
// or multiplicative) at p -- the twist side of the quadratic-twist theorem.
inline StabilizedRun stabilized_run(SpaceCache& spaces, const Curve& E, int64_t p, int i,
                                    int n_max, const PipelineOptions& opts) {
  if (n_max < 0) fail(errc::bad_input, "stabilized run: n_max must be >= 0");
  check_cost_guard(p, n_max, opts);
  StabilizedRun run;
  run.label = E.label;
  run.p = p;
  run.i = i;
  const LocalData ld = local_reduction(E, p);
  int64_t a_p = 0;
  bool hensel = false;
  switch (ld.red) {
    case reduction_class::good_ordinary:
      a_p = ell_good_ap_after_minimization(E, p);
      hensel = true;
      break;
    case reduction_class::multiplicative:
      a_p = detail::multiplicative_ap(E, p);
      break;
    case reduction_class::good_supersingular:
      fail(errc::twist_not_ordinary,
           "curve " + E.label + " is supersingular at " + std::to_string(p) +
               "; use the supersingular-oscillation path");
    case reduction_class::additive:
      fail(errc::bad_input, "stabilized run requires semistable reduction at p");
  }
  run.reduction = reduction_class_name(ld.red);
  run.alpha_desc = hensel ? "unit root of X^2 " + std::string(a_p >= 0 ? "- " : "+ ") +
                                std::to_string(std::abs(a_p)) + "X + " + std::to_string(p)
                          : (a_p > 0 ? "+1" : "-1");
  auto plus = normalize_at_p(cached_eigensymbol(spaces, E, +1, opts.cache_dir), p);
  auto minus = normalize_at_p(cached_eigensymbol(spaces, E, -1, opts.cache_dir), p);
  for (int n = 0; n <= n_max; ++n) {
    IwasawaInvariants inv;
    for (int M = opts.precision; M <= opts.max_precision; M *= 2) {
      const UnitRoot alpha = hensel ? UnitRoot::hensel(a_p, p, M)
                                    : UnitRoot::rational(Rat(a_p));
      const RawTheta raw = raw_theta_stabilized(plus, minus, p, n, alpha, opts.threads);
      auto elem = omega_project(raw, i, M);
      inv = invariants(to_polynomial(elem), p, M);
      if (inv.valid) break;
    }
    run.by_n.push_back(inv);
  }
  return run;
}

// ---------------------------------------------------------------------------

struct InfoReport {
  std::string label;
  int64_t p = 0;
  std::array<Int, 5> a_invariants{};
  Int conductor, disc, c4, c6;
  Rat j;
  LocalData local;
  std::vector<std::pair<int, Int>> f_values;  // n = 1..4
  std::vector<std::pair<int, Int>> q_values;  // n = 1..6
};

inline InfoReport info_run(const CurveRecord& rec) {
  InfoReport rep;
  Curve E = rec.curve();
  rep.label = rec.label;
  rep.p = rec.p;
  rep.a_invariants = rec.a_invariants;
  rep.conductor = E.conductor;
  rep.disc = E.disc;
  rep.c4 = E.c4;
  rep.c6 = E.c6;
  rep.j = E.j_invariant();
  rep.local = local_reduction(E, rec.p);
  const int d = static_cast<int>(rep.local.ord_delta_min);
  for (int n = 1; n <= 4; ++n) rep.f_values.push_back({n, f(n, rec.p, d)});
  for (int n = 1; n <= 6; ++n) rep.q_values.push_back({n, q(n, rec.p)});
  return rep;
}

// ---------------------------------------------------------------------------

struct VerifyEntry {
  int n = 0;
  IwasawaInvariants inv;
  Int expected;
  bool match = false;
};

struct ResidualEntry {
  int n = 0;
  Int observed;   // lambda_n - f_n
  Int predicted;  // published residual model value
  bool match = false;
};

struct LemmaEntry {
  int n = 0;
  int i = 0;
  int64_t lambda = -1;
  Int bound;  // p^(n-1)
  bool ok = false;
};

struct VerifyRow {
  std::string label;
  int64_t p = 0;
  int d = 0;  // ord_p of the minimal discriminant
  int n_used = 0;
  std::vector<VerifyEntry> entries;
  std::vector<ResidualEntry> residual_entries;  // when a published model exists
  bool residual_fit_performed = false;
  bool residual_fit_matches = false;   // fit_residual == published model
  bool growth_fit_performed = false;
  bool growth_fit_matches = false;     // fit_growth == published lambda model
  std::vector<LemmaEntry> lemma_entries;       // i sampled in {0, 2, 4}
  std::vector<ThetaCell> corestriction_cells;  // (n, i) -> zero flag
  bool pass = false;
};

struct VerifyReport {
  int n_max = 0;
  std::vector<VerifyRow> rows;
  bool pass = false;
};

inline VerifyReport verify_table_run(SpaceCache& spaces,
                                     const std::vector<CurveRecord>& records, int n_max,
                                     const PipelineOptions& opts) {
  VerifyReport report;
  report.n_max = n_max;
  report.pass = true;
  for (const auto& rec : records) {
    if (rec.expected.empty())
      fail(errc::bad_input, "verify-table: record " + rec.label + " has no expected map");
    VerifyRow row;
    row.label = rec.label;
    row.p = rec.p;
    Curve E = rec.curve();
    row.d = static_cast<int>(local_reduction(E, rec.p).ord_delta_min);
    int n_used = 0;
    for (const auto& [n, lam] : rec.expected)
      if (n <= n_max) n_used = std::max(n_used, n);
    if (n_used == 0) fail(errc::bad_input, "verify-table: no expected n within n_max");
    row.n_used = n_used;

    std::vector<int> is{0};
    if (rec.additive) {
      // sample components {0, 2, 4} reduced mod the order p-1 of omega
      for (int i : {2, 4}) {
        int r = i % static_cast<int>(rec.p - 1);
        if (std::find(is.begin(), is.end(), r) == is.end()) is.push_back(r);
      }
      std::sort(is.begin(), is.end());
    }
    ThetaRun run = theta_run(spaces, E, rec.p, n_used, is, opts);
    bool row_pass = true;

    std::vector<std::pair<int, Int>> lambda_points, residual_points;
    for (int n = 1; n <= n_used; ++n) {
      const auto& c = run.cell(n, 0);
      VerifyEntry e;
      e.n = n;
      e.inv = c.inv;
      auto it = rec.expected.find(n);
      if (it == rec.expected.end())
        fail(errc::bad_input, "verify-table: expected map of " + rec.label +
                                  " skips n = " + std::to_string(n));
      e.expected = it->second;
      e.match = c.inv.valid && c.inv.mu == 0 && Int(c.inv.lambda) == e.expected;
      row_pass = row_pass && e.match;
      row.entries.push_back(e);
      if (c.inv.valid) {
        lambda_points.push_back({n, Int(c.inv.lambda)});
        residual_points.push_back({n, Int(c.inv.lambda) - f(n, rec.p, row.d)});
      }
    }

    if (rec.residual_model) {
      const auto& m = *rec.residual_model;
      ResidualModel published;
      published.b = m.b;
      published.c_even = m.c_even;
      published.c_odd = m.c_odd;
      published.index_convention = m.conv;
      published.p = rec.p;
      for (const auto& [n, r] : residual_points) {
        ResidualEntry e;
        e.n = n;
        e.observed = r;
        Rat pred = published.eval(n);
        e.predicted = Int(pred.get_num());  // published models are integral
        e.match = (pred.get_den() == 1) && (e.predicted == r);
        row_pass = row_pass && e.match;
        row.residual_entries.push_back(e);
      }
      // recover the column by fitting when the points pin it down
      bool even_seen = false, odd_seen = false;
      for (const auto& [n, r] : residual_points) (n % 2 == 0 ? even_seen : odd_seen) = true;
      if (residual_points.size() >= 3 && even_seen && odd_seen) {
        row.residual_fit_performed = true;
        try {
          ResidualModel fitted = fit_residual(residual_points, rec.p);
          row.residual_fit_matches = fitted.index_convention == m.conv &&
                                     fitted.b == m.b && fitted.c_even == m.c_even &&
                                     fitted.c_odd == m.c_odd;
        } catch (const error&) {
          row.residual_fit_matches = false;
        }
        row_pass = row_pass && row.residual_fit_matches;
      }
    }

    if (rec.lambda_model) {
      const auto& m = *rec.lambda_model;
      bool even_seen = false, odd_seen = false;
      for (const auto& [n, lam] : lambda_points) (n % 2 == 0 ? even_seen : odd_seen) = true;
      if (lambda_points.size() >= 3 && even_seen && odd_seen) {
        row.growth_fit_performed = true;
        try {
          GrowthModel fitted = fit_growth(lambda_points, rec.p);
          row.growth_fit_matches = fitted.index_convention == m.conv && fitted.a == m.a &&
                                   fitted.b == m.b && fitted.c_even == m.c_even &&
                                   fitted.c_odd == m.c_odd;
        } catch (const error&) {
          row.growth_fit_matches = false;
        }
        row_pass = row_pass && row.growth_fit_matches;
      }
    }

    if (rec.additive) {
      for (const auto& c : run.cells) {
        LemmaEntry le;
        le.n = c.n;
        le.i = c.i;
        le.lambda = c.inv.valid ? c.inv.lambda : -1;
        le.bound = pow_int(rec.p, static_cast<unsigned>(c.n - 1));
        le.ok = c.inv.valid && Int(c.inv.lambda) >= le.bound;
        row_pass = row_pass && le.ok;
        row.lemma_entries.push_back(le);
        row_pass = row_pass && c.corestriction_zero;
      }
      row.corestriction_cells = run.cells;
    }

    row.pass = row_pass;
    report.pass = report.pass && row_pass;
    report.rows.push_back(std::move(row));
  }
  return report;
}

// ---------------------------------------------------------------------------

struct QuadEntry {
  int n = 0;
  IwasawaInvariants inv;
  Int predicted;
  bool match = false;
  bool required = false;  // n >= 2 must match; n = 1 is reported only
};

struct QuadReport {
  std::string label, twist_label;
  int64_t p = 0;
  int i = 0, i_twist = 0;
  std::string twist_reduction, alpha_desc;
  std::vector<IwasawaInvariants> twist_by_n;
  int64_t lambda_stable = -1;
  std::vector<QuadEntry> entries;
  bool pass = false;
};

inline QuadReport quad_check_run(SpaceCache& spaces, const CurveRecord& rec, int i,
                                 int n_max, const PipelineOptions& opts) {
  if (i % 2 != 0) fail(errc::bad_input, "quad-check: the twist theorem needs i even");
  if (n_max < 2) fail(errc::bad_input, "quad-check: need n_max >= 2 for the n >> 0 regime");
  Curve E = rec.curve();
  Curve tw = rec.twist_curve();  // bad_input when the record has no twist data
  const int64_t p = rec.p;
  const int i_twist = static_cast<int>((p - 1) / 2) + i;
  if (i_twist > p - 2)
    fail(errc::bad_input, "quad-check: twist component (p-1)/2 + i out of range");

  QuadReport rep;
  rep.label = rec.label;
  rep.twist_label = tw.label;
  rep.p = p;
  rep.i = i;
  rep.i_twist = i_twist;

  StabilizedRun srun = stabilized_run(spaces, tw, p, i_twist, n_max, opts);
  rep.twist_reduction = srun.reduction;
  rep.alpha_desc = srun.alpha_desc;
  rep.twist_by_n = srun.by_n;
  rep.lambda_stable = stable_lambda(srun.by_n);

  ThetaRun erun = theta_run(spaces, E, p, n_max, {i}, opts);
  bool pass = true;
  for (int n = 1; n <= n_max; ++n) {
    const auto& c = erun.cell(n, i);
    QuadEntry qe;
    qe.n = n;
    qe.inv = c.inv;
    qe.predicted = predicted_lambda_quad(p, n, rep.lambda_stable);
    qe.match = c.inv.valid && Int(c.inv.lambda) == qe.predicted;
    qe.required = n >= 2;
    if (qe.required) pass = pass && qe.match;
    rep.entries.push_back(qe);
  }
  rep.pass = pass;
  return rep;
}

// ---------------------------------------------------------------------------

struct FitReport {
  std::string label;
  int64_t p = 0;
  int i = 0;
  std::vector<std::pair<int, Int>> points;
  GrowthModel model;
  bool have_published = false;
  bool matches_published = false;
  bool pass = false;
};

inline FitReport fit_run(SpaceCache& spaces, const CurveRecord& rec, int i, int n_max,
                         const PipelineOptions& opts) {
  FitReport rep;
  rep.label = rec.label;
  rep.p = rec.p;
  rep.i = i;
  ThetaRun run = theta_run(spaces, rec.curve(), rec.p, n_max, {i}, opts);
  for (int n = 1; n <= n_max; ++n) {
    const auto& c = run.cell(n, i);
    if (!c.inv.valid)
      fail(errc::bad_input, "fit: invariants undetermined at n = " + std::to_string(n) +
                                " even at max precision");
    rep.points.push_back({n, Int(c.inv.lambda)});
  }
  rep.model = fit_growth(rep.points, rec.p);
  rep.pass = true;
  if (rec.lambda_model) {
    const auto& m = *rec.lambda_model;
    rep.have_published = true;
    rep.matches_published = rep.model.index_convention == m.conv && rep.model.a == m.a &&
                            rep.model.b == m.b && rep.model.c_even == m.c_even &&
                            rep.model.c_odd == m.c_odd;
    rep.pass = rep.matches_published;
  }
  return rep;
}

}  // namespace mtel
