#pragma once

// Line-delimited curve dataset: one record per line, space-separated
// key=value fields, versioned header line.  Curve coefficients for the
// table labels were resolved from the standard database at authoring time;
// nothing is fetched at runtime.

#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mtel/arith.hpp"
#include "mtel/ec.hpp"
#include "mtel/errors.hpp"
#include "mtel/growth.hpp"

namespace mtel {

inline constexpr const char* kDatasetVersionLine = "mtel-dataset v1";

// published Table 1 residual column, r_n = b·q_idx(n) + c_parity
struct PublishedResidual {
  QIndex conv = QIndex::q_n_minus_1;
  Rat b;
  Int c_even, c_odd;
};

// published Table 1 lambda column, λ_n = a·p^{n−1} + b·q_idx(n) + c_parity
struct PublishedGrowth {
  QIndex conv = QIndex::q_n_minus_1;
  Rat a, b;
  Int c_even, c_odd;
};

struct CurveRecord {
  std::string label;
  std::array<Int, 5> a_invariants{};
  Int conductor;
  int64_t p = 0;  // the odd prime to analyze
  bool additive = false;
  std::map<int, Int> expected;  // n -> lambda (verification rows)
  std::optional<std::string> twist_label;
  std::optional<std::array<Int, 5>> twist_a_invariants;
  std::optional<Int> twist_conductor;
  std::optional<PublishedResidual> residual_model;
  std::optional<PublishedGrowth> lambda_model;

  Curve curve() const { return Curve(label, a_invariants, conductor); }
  Curve twist_curve() const {
    if (!twist_a_invariants || !twist_label || !twist_conductor)
      fail(errc::bad_input, "record " + label + " carries no twist data");
    return Curve(*twist_label, *twist_a_invariants, *twist_conductor);
  }
};

namespace detail {

inline Int parse_int(const std::string& s, const std::string& ctx) {
  try {
    return Int(s);
  } catch (const std::invalid_argument&) {
    fail(errc::bad_input, "dataset: bad integer '" + s + "' in " + ctx);
  }
}

inline Rat parse_rat(const std::string& s, const std::string& ctx) {
  try {
    Rat r(s);
    r.canonicalize();
    return r;
  } catch (const std::invalid_argument&) {
    fail(errc::bad_input, "dataset: bad rational '" + s + "' in " + ctx);
  }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::array<Int, 5> parse_a_invariants(const std::string& v, const std::string& ctx) {
  auto parts = split(v, ',');
  if (parts.size() != 5) fail(errc::bad_input, "dataset: need 5 a-invariants in " + ctx);
  std::array<Int, 5> a;
  for (int k = 0; k < 5; ++k) a[k] = parse_int(parts[k], ctx);
  return a;
}

inline QIndex parse_qindex(const std::string& v, const std::string& ctx) {
  if (v == "qn1") return QIndex::q_n_minus_1;
  if (v == "qn") return QIndex::q_n;
  fail(errc::bad_input, "dataset: bad q-index '" + v + "' in " + ctx + " (want qn1|qn)");
}

inline const char* qindex_token(QIndex c) { return c == QIndex::q_n_minus_1 ? "qn1" : "qn"; }

}  // namespace detail

inline CurveRecord parse_record(const std::string& line, int lineno) {
  const std::string ctx = "line " + std::to_string(lineno);
  std::istringstream is(line);
  std::string tok;
  is >> tok;
  if (tok != "record") fail(errc::bad_input, "dataset: expected 'record' at " + ctx);
  CurveRecord rec;
  bool seen_label = false, seen_a = false, seen_cond = false, seen_p = false;
  while (is >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos)
      fail(errc::bad_input, "dataset: field '" + tok + "' is not key=value at " + ctx);
    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "label") {
      rec.label = val;
      seen_label = true;
    } else if (key == "a") {
      rec.a_invariants = detail::parse_a_invariants(val, ctx);
      seen_a = true;
    } else if (key == "conductor") {
      rec.conductor = detail::parse_int(val, ctx);
      seen_cond = true;
    } else if (key == "p") {
      rec.p = detail::parse_int(val, ctx).get_si();
      seen_p = true;
    } else if (key == "additive") {
      rec.additive = (val == "1");
    } else if (key == "expected") {
      for (const auto& pair : detail::split(val, ',')) {
        auto kv = detail::split(pair, ':');
        if (kv.size() != 2) fail(errc::bad_input, "dataset: bad expected pair at " + ctx);
        rec.expected[static_cast<int>(detail::parse_int(kv[0], ctx).get_si())] =
            detail::parse_int(kv[1], ctx);
      }
    } else if (key == "twist_label") {
      rec.twist_label = val;
    } else if (key == "twist_a") {
      rec.twist_a_invariants = detail::parse_a_invariants(val, ctx);
    } else if (key == "twist_conductor") {
      rec.twist_conductor = detail::parse_int(val, ctx);
    } else if (key == "residual_model" || key == "lambda_model") {
      // conv;coeff[;coeff];ce;co with coefficients as exact rationals
      auto parts = detail::split(val, ';');
      const size_t want = (key == "lambda_model") ? 5 : 4;
      if (parts.size() != want)
        fail(errc::bad_input, "dataset: bad " + key + " shape at " + ctx);
      if (key == "residual_model") {
        PublishedResidual m;
        m.conv = detail::parse_qindex(parts[0], ctx);
        m.b = detail::parse_rat(parts[1], ctx);
        m.c_even = detail::parse_int(parts[2], ctx);
        m.c_odd = detail::parse_int(parts[3], ctx);
        rec.residual_model = m;
      } else {
        PublishedGrowth m;
        m.conv = detail::parse_qindex(parts[0], ctx);
        m.a = detail::parse_rat(parts[1], ctx);
        m.b = detail::parse_rat(parts[2], ctx);
        m.c_even = detail::parse_int(parts[3], ctx);
        m.c_odd = detail::parse_int(parts[4], ctx);
        rec.lambda_model = m;
      }
    } else {
      fail(errc::bad_input, "dataset: unknown field '" + key + "' at " + ctx);
    }
  }
  if (!seen_label || !seen_a || !seen_cond || !seen_p)
    fail(errc::bad_input, "dataset: record missing label/a/conductor/p at " + ctx);
  if (rec.p < 3 || rec.p % 2 == 0 || !is_prime64(rec.p))
    fail(errc::bad_input, "dataset: p must be an odd prime at " + ctx);
  // invariant checks: nonsingular curve, additive flag consistency
  Curve E = rec.curve();  // throws SingularCurve when degenerate
  if (rec.additive && rec.conductor % (Int(rec.p) * rec.p) != 0)
    fail(errc::bad_input, "dataset: additive record without p^2 | conductor at " + ctx);
  if (rec.twist_a_invariants) (void)rec.twist_curve();
  return rec;
}

inline std::vector<CurveRecord> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "dataset: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) fail(errc::bad_input, "dataset: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kDatasetVersionLine)
    fail(errc::bad_input, "dataset: version mismatch in " + path + " (got '" + line +
                              "', want '" + kDatasetVersionLine + "')");
  std::vector<CurveRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    out.push_back(parse_record(line, lineno));
  }
  for (size_t i = 0; i < out.size(); ++i)
    for (size_t j = i + 1; j < out.size(); ++j)
      if (out[i].label == out[j].label)
        fail(errc::bad_input, "dataset: duplicate label " + out[i].label);
  return out;
}

inline const CurveRecord& find_record(const std::vector<CurveRecord>& records,
                                      const std::string& label) {
  for (const auto& r : records)
    if (r.label == label) return r;
  fail(errc::unknown_label, "no dataset record with label " + label);
}

inline std::string format_record(const CurveRecord& rec) {
  std::ostringstream os;
  os << "record label=" << rec.label << " a=";
  for (int k = 0; k < 5; ++k) os << (k ? "," : "") << rec.a_invariants[k];
  os << " conductor=" << rec.conductor << " p=" << rec.p;
  if (rec.additive) os << " additive=1";
  if (!rec.expected.empty()) {
    os << " expected=";
    bool first = true;
    for (const auto& [n, lam] : rec.expected) {
      os << (first ? "" : ",") << n << ":" << lam;
      first = false;
    }
  }
  if (rec.twist_label) os << " twist_label=" << *rec.twist_label;
  if (rec.twist_a_invariants) {
    os << " twist_a=";
    for (int k = 0; k < 5; ++k) os << (k ? "," : "") << (*rec.twist_a_invariants)[k];
  }
  if (rec.twist_conductor) os << " twist_conductor=" << *rec.twist_conductor;
  if (rec.lambda_model) {
    const auto& m = *rec.lambda_model;
    os << " lambda_model=" << detail::qindex_token(m.conv) << ";" << m.a << ";" << m.b << ";"
       << m.c_even << ";" << m.c_odd;
  }
  if (rec.residual_model) {
    const auto& m = *rec.residual_model;
    os << " residual_model=" << detail::qindex_token(m.conv) << ";" << m.b << ";" << m.c_even
       << ";" << m.c_odd;
  }
  return os.str();
}

inline void write_dataset(const std::vector<CurveRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_error, "dataset: cannot write " + path);
  out << kDatasetVersionLine << "\n";
  for (const auto& r : records) out << format_record(r) << "\n";
  if (!out) fail(errc::io_error, "dataset: write failed for " + path);
}

}  // namespace mtel
