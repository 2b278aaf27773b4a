#pragma once

// Rendering of pipeline reports: human-readable tables for standard output
// and a structured JSON mirror of every number printed.  Both renderings are
// deterministic functions of the report structs, so cold-cache and warm-cache
// runs emit identical bytes.

#include <json.hpp>

#include <ostream>
#include <sstream>
#include <string>

#include "mtel/pipeline.hpp"

namespace mtel {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline std::string rat_str(const Rat& r) { return r.get_str(); }
inline std::string int_str(const Int& z) { return z.get_str(); }

inline ordered_json inv_json(const IwasawaInvariants& inv) {
  ordered_json j;
  j["valid"] = inv.valid;
  if (inv.valid) {
    j["mu"] = inv.mu;
    j["lambda"] = inv.lambda;
  }
  j["precision"] = inv.precision;
  return j;
}

inline std::string inv_str(const IwasawaInvariants& inv) {
  if (!inv.valid) return "undetermined(M=" + std::to_string(inv.precision) + ")";
  return "mu=" + std::to_string(inv.mu) + " lambda=" + std::to_string(inv.lambda);
}

}  // namespace detail

// ----------------------------------------------------------------- info ----

inline ordered_json info_json(const InfoReport& r) {
  ordered_json j;
  j["command"] = "info";
  j["label"] = r.label;
  j["p"] = r.p;
  ordered_json a = ordered_json::array();
  for (const auto& ai : r.a_invariants) a.push_back(detail::int_str(ai));
  j["a_invariants"] = a;
  j["conductor"] = detail::int_str(r.conductor);
  j["disc"] = detail::int_str(r.disc);
  j["c4"] = detail::int_str(r.c4);
  j["c6"] = detail::int_str(r.c6);
  j["j_invariant"] = detail::rat_str(r.j);
  ordered_json loc;
  loc["ord_delta_min"] = r.local.ord_delta_min;
  if (r.local.ord_c4)
    loc["ord_c4"] = *r.local.ord_c4;
  else
    loc["ord_c4"] = "infinity";
  if (r.local.ord_j)
    loc["ord_j"] = *r.local.ord_j;
  else
    loc["ord_j"] = "infinity";
  loc["kodaira"] = r.local.kodaira;
  loc["reduction"] = reduction_class_name(r.local.red);
  loc["potential"] = potential_class_name(r.local.pot);
  loc["defect_e"] = r.local.defect_e;
  loc["ord_conductor"] = r.local.ord_conductor;
  j["local"] = loc;
  ordered_json fs = ordered_json::array();
  for (const auto& [n, v] : r.f_values) fs.push_back({{"n", n}, {"value", detail::int_str(v)}});
  j["f"] = fs;
  ordered_json qs = ordered_json::array();
  for (const auto& [n, v] : r.q_values) qs.push_back({{"n", n}, {"value", detail::int_str(v)}});
  j["q"] = qs;
  return j;
}

inline void info_text(const InfoReport& r, std::ostream& os) {
  os << "curve " << r.label << " at p = " << r.p << "\n";
  os << "  a-invariants: [";
  for (int k = 0; k < 5; ++k) os << (k ? ", " : "") << r.a_invariants[k];
  os << "]\n";
  os << "  conductor = " << r.conductor << "\n";
  os << "  disc = " << r.disc << ", c4 = " << r.c4 << ", c6 = " << r.c6 << "\n";
  os << "  j = " << r.j << "\n";
  os << "  local at p: ord(disc_min) = " << r.local.ord_delta_min << ", kodaira " << r.local.kodaira
     << ", " << reduction_class_name(r.local.red) << ", " << potential_class_name(r.local.pot)
     << ", defect e = " << r.local.defect_e << ", ord(conductor) = " << r.local.ord_conductor
     << "\n";
  os << "  f_n (n = 1..4):";
  for (const auto& [n, v] : r.f_values) os << " " << v;
  os << "\n  q_n (n = 1..6):";
  for (const auto& [n, v] : r.q_values) os << " " << v;
  os << "\n";
}

// ---------------------------------------------------------------- theta ----

inline ordered_json theta_json(const ThetaRun& r, int i, int precision) {
  ordered_json j;
  j["command"] = "theta";
  j["label"] = r.label;
  j["p"] = r.p;
  j["i"] = i;
  j["precision"] = precision;
  ordered_json rows = ordered_json::array();
  for (const auto& c : r.cells) {
    if (c.i != i) continue;
    ordered_json row;
    row["n"] = c.n;
    row["invariants"] = detail::inv_json(c.inv);
    row["corestriction_zero"] = c.corestriction_zero;
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j;
}

inline void theta_text(const ThetaRun& r, int i, std::ostream& os) {
  os << "theta invariants for " << r.label << " at p = " << r.p << ", i = " << i << "\n";
  for (const auto& c : r.cells) {
    if (c.i != i) continue;
    os << "  n = " << c.n << ": " << detail::inv_str(c.inv)
       << (c.corestriction_zero ? "  [corestriction == 0]" : "  [CORESTRICTION NONZERO]")
       << "\n";
  }
}

// --------------------------------------------------------- verify-table ----

inline ordered_json verify_json(const VerifyReport& r) {
  ordered_json j;
  j["command"] = "verify-table";
  j["n_max"] = r.n_max;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json rj;
    rj["label"] = row.label;
    rj["p"] = row.p;
    rj["ord_disc"] = row.d;
    rj["n_used"] = row.n_used;
    ordered_json entries = ordered_json::array();
    for (const auto& e : row.entries) {
      ordered_json ej;
      ej["n"] = e.n;
      ej["invariants"] = detail::inv_json(e.inv);
      ej["expected_lambda"] = detail::int_str(e.expected);
      ej["match"] = e.match;
      entries.push_back(ej);
    }
    rj["entries"] = entries;
    ordered_json res = ordered_json::array();
    for (const auto& e : row.residual_entries) {
      ordered_json ej;
      ej["n"] = e.n;
      ej["observed"] = detail::int_str(e.observed);
      ej["predicted"] = detail::int_str(e.predicted);
      ej["match"] = e.match;
      res.push_back(ej);
    }
    rj["residual"] = res;
    rj["residual_fit_performed"] = row.residual_fit_performed;
    if (row.residual_fit_performed) rj["residual_fit_matches"] = row.residual_fit_matches;
    rj["growth_fit_performed"] = row.growth_fit_performed;
    if (row.growth_fit_performed) rj["growth_fit_matches"] = row.growth_fit_matches;
    ordered_json lem = ordered_json::array();
    for (const auto& e : row.lemma_entries) {
      ordered_json ej;
      ej["n"] = e.n;
      ej["i"] = e.i;
      ej["lambda"] = e.lambda;
      ej["bound"] = detail::int_str(e.bound);
      ej["ok"] = e.ok;
      lem.push_back(ej);
    }
    rj["lemma_lower_bound"] = lem;
    ordered_json co = ordered_json::array();
    for (const auto& c : row.corestriction_cells)
      co.push_back({{"n", c.n}, {"i", c.i}, {"zero", c.corestriction_zero}});
    rj["corestriction"] = co;
    rj["pass"] = row.pass;
    rows.push_back(rj);
  }
  j["rows"] = rows;
  j["pass"] = r.pass;
  return j;
}

inline void verify_text(const VerifyReport& r, std::ostream& os) {
  os << "table verification up to n_max = " << r.n_max << "\n";
  for (const auto& row : r.rows) {
    os << "row " << row.label << " (p = " << row.p << ", ord disc = " << row.d << ")\n";
    for (const auto& e : row.entries)
      os << "  n = " << e.n << ": " << detail::inv_str(e.inv) << ", expected lambda = "
         << e.expected << (e.match ? "  [ok]" : "  [MISMATCH]") << "\n";
    for (const auto& e : row.residual_entries)
      os << "  residual n = " << e.n << ": lambda - f_n = " << e.observed
         << ", published model gives " << e.predicted << (e.match ? "  [ok]" : "  [MISMATCH]")
         << "\n";
    if (row.residual_fit_performed)
      os << "  residual column fit matches published: "
         << (row.residual_fit_matches ? "yes" : "NO") << "\n";
    if (row.growth_fit_performed)
      os << "  lambda growth fit matches published: " << (row.growth_fit_matches ? "yes" : "NO")
         << "\n";
    int lemma_fail = 0;
    for (const auto& e : row.lemma_entries)
      if (!e.ok) ++lemma_fail;
    if (!row.lemma_entries.empty())
      os << "  lambda >= p^(n-1) over i in {0,2,4}: "
         << (lemma_fail == 0 ? "all ok" : std::to_string(lemma_fail) + " FAILURES") << "\n";
    int co_fail = 0;
    for (const auto& c : row.corestriction_cells)
      if (!c.corestriction_zero) ++co_fail;
    if (!row.corestriction_cells.empty())
      os << "  corestriction == 0 mod p^32: "
         << (co_fail == 0 ? "all ok" : std::to_string(co_fail) + " FAILURES") << "\n";
    os << "  row " << (row.pass ? "PASS" : "FAIL") << "\n";
  }
  os << (r.pass ? "PASS" : "FAIL") << "\n";
}

// ----------------------------------------------------------- quad-check ----

inline ordered_json quad_json(const QuadReport& r) {
  ordered_json j;
  j["command"] = "quad-check";
  j["label"] = r.label;
  j["p"] = r.p;
  j["i"] = r.i;
  ordered_json tw;
  tw["label"] = r.twist_label;
  tw["i_twist"] = r.i_twist;
  tw["reduction"] = r.twist_reduction;
  tw["alpha"] = r.alpha_desc;
  ordered_json seq = ordered_json::array();
  for (size_t n = 0; n < r.twist_by_n.size(); ++n) {
    ordered_json ej;
    ej["n"] = static_cast<int>(n);
    ej["invariants"] = detail::inv_json(r.twist_by_n[n]);
    seq.push_back(ej);
  }
  tw["stabilized_sequence"] = seq;
  tw["stable_lambda"] = r.lambda_stable;
  j["twist"] = tw;
  ordered_json rows = ordered_json::array();
  for (const auto& e : r.entries) {
    ordered_json ej;
    ej["n"] = e.n;
    ej["invariants"] = detail::inv_json(e.inv);
    ej["predicted_lambda"] = detail::int_str(e.predicted);
    ej["match"] = e.match;
    ej["required"] = e.required;
    rows.push_back(ej);
  }
  j["rows"] = rows;
  j["pass"] = r.pass;
  return j;
}

inline void quad_text(const QuadReport& r, std::ostream& os) {
  os << "quadratic-twist check for " << r.label << " at p = " << r.p << ", i = " << r.i << "\n";
  os << "  twist " << r.twist_label << ": " << r.twist_reduction << ", alpha = " << r.alpha_desc
     << ", component i' = " << r.i_twist << "\n";
  os << "  stabilized twist invariants:";
  for (size_t n = 0; n < r.twist_by_n.size(); ++n)
    os << " n=" << n << ":(" << detail::inv_str(r.twist_by_n[n]) << ")";
  os << "\n  stable lambda = " << r.lambda_stable << "\n";
  for (const auto& e : r.entries)
    os << "  n = " << e.n << ": " << detail::inv_str(e.inv) << ", predicted = " << e.predicted
       << (e.match ? "  [ok]" : (e.required ? "  [MISMATCH]" : "  [mismatch, n = 1 not required]"))
       << "\n";
  os << (r.pass ? "PASS" : "FAIL") << "\n";
}

// ------------------------------------------------------------------ fit ----

inline ordered_json fit_json(const FitReport& r) {
  ordered_json j;
  j["command"] = "fit";
  j["label"] = r.label;
  j["p"] = r.p;
  j["i"] = r.i;
  ordered_json pts = ordered_json::array();
  for (const auto& [n, lam] : r.points) pts.push_back({{"n", n}, {"lambda", detail::int_str(lam)}});
  j["points"] = pts;
  ordered_json m;
  m["a"] = detail::rat_str(r.model.a);
  m["b"] = detail::rat_str(r.model.b);
  m["c_even"] = detail::int_str(r.model.c_even);
  m["c_odd"] = detail::int_str(r.model.c_odd);
  m["q_index"] = q_index_name(r.model.index_convention);
  j["model"] = m;
  if (r.have_published) j["matches_published"] = r.matches_published;
  j["pass"] = r.pass;
  return j;
}

inline void fit_text(const FitReport& r, std::ostream& os) {
  os << "growth fit for " << r.label << " at p = " << r.p << ", i = " << r.i << "\n  points:";
  for (const auto& [n, lam] : r.points) os << " (" << n << ", " << lam << ")";
  os << "\n  model: lambda_n = " << r.model.a << " * p^(n-1) + " << r.model.b << " * "
     << q_index_name(r.model.index_convention) << " + {" << r.model.c_even << " even, "
     << r.model.c_odd << " odd}\n";
  if (r.have_published)
    os << "  matches published column: " << (r.matches_published ? "yes" : "NO") << "\n";
  os << (r.pass ? "PASS" : "FAIL") << "\n";
}

}  // namespace mtel
