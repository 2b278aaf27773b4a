// Mazur-Tate layer: theta coefficients, omega projection, binomial transform,
// Iwasawa invariants, corestriction, alpha-stabilization.

#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>

#include "mtel/eigensymbol.hpp"
#include "mtel/mazur_tate.hpp"

using namespace mtel;

namespace {

struct Fixture121 {
  std::shared_ptr<const SymbolSpace> sp = std::make_shared<const SymbolSpace>(121);
  Curve E{"121c1", {Int(1), Int(1), Int(0), Int(-2), Int(-7)}, Int(121)};
  Eigensymbol plus = normalize_at_p(eigensymbol(sp, E, +1), 11);
  Eigensymbol minus = normalize_at_p(eigensymbol(sp, E, -1), 11);
};

Fixture121& fix() {
  static Fixture121 f;
  return f;
}

}  // namespace

TEST_CASE("teichmuller character: fixed values and defining properties",
          "[mazur-tate][property]") {
  CHECK(teichmuller(2, 5, 2) == 7);
  CHECK(teichmuller(1, 7, 5) == 1);
  std::mt19937_64 rng(17);
  int done = 0;
  while (done < 220) {
    const int64_t ps[] = {5, 7, 11, 13};
    int64_t p = ps[rng() % 4];
    int M = 1 + static_cast<int>(rng() % 8);
    int64_t a = 1 + static_cast<int64_t>(rng() % 10000);
    int64_t b = 1 + static_cast<int64_t>(rng() % 10000);
    if (a % p == 0 || b % p == 0) continue;
    ++done;
    Int mod = pow_int(p, static_cast<unsigned>(M));
    Int ta = teichmuller(a, p, M), tb = teichmuller(b, p, M);
    // t == a mod p and t^(p-1) == 1 mod p^M
    CHECK(mod_i64(ta, p) == a % p);
    Int chk;
    mpz_powm_ui(chk.get_mpz_t(), ta.get_mpz_t(), static_cast<unsigned long>(p - 1),
                mod.get_mpz_t());
    CHECK(chk == 1);
    // multiplicativity
    Int tab = teichmuller(mulmod64(a % p, b % p, p), p, M);
    CHECK((ta * tb - tab) % mod == 0);
  }
  CHECK_THROWS_AS(teichmuller(10, 5, 3), error);
}

TEST_CASE("discrete log on 1 + pZ_p", "[mazur-tate][property]") {
  for (int64_t p : {3, 7}) {
    const int n = (p == 3) ? 2 : 3;
    int64_t P = 1;
    for (int k = 0; k < n + 1; ++k) P *= p;
    int64_t pn = P / p;
    int64_t w = 1;
    for (int64_t j = 0; j < pn; ++j) {
      CHECK(discrete_log_one_plus_p(w, p, n) == j);
      w = mulmod64(w, 1 + p, P);
    }
  }
  CHECK_THROWS_AS(discrete_log_one_plus_p(2, 3, 2), error);
}

TEST_CASE("invariants of explicit polynomials", "[mazur-tate]") {
  auto iv = invariants({Int(5), Int(5), Int(1), Int(0)}, 5, 3);
  CHECK((iv.valid && iv.mu == 0 && iv.lambda == 2));
  auto iv0 = invariants(std::vector<Int>(4, Int(0)), 5, 3);
  CHECK(!iv0.valid);
  auto iv2 = invariants({Int(25), Int(25), Int(5), Int(0)}, 5, 3);
  CHECK((iv2.valid && iv2.mu == 1 && iv2.lambda == 2));
}

TEST_CASE("invariants: scaling by p shifts mu, multiplying by a unit fixes both",
          "[mazur-tate][property]") {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 200; ++t) {
    const int64_t p = 7;
    const int M = 6;
    Int mod = pow_int(p, M);
    std::vector<Int> poly(8);
    bool nonzero = false;
    for (auto& c : poly) {
      c = Int(static_cast<long>(rng() % 3000)) % mod;
      nonzero = nonzero || c != 0;
    }
    if (!nonzero) continue;
    auto base = invariants(poly, p, M);
    if (!base.valid || base.mu + 1 >= M) continue;
    std::vector<Int> scaled = poly;
    for (auto& c : scaled) c = c * p % mod;
    auto up = invariants(scaled, p, M);
    CHECK(up.valid);
    CHECK(up.mu == base.mu + 1);
    CHECK(up.lambda == base.lambda);
  }
}

TEST_CASE("binomial transform round trip", "[mazur-tate][property]") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    IsotypicElement e;
    e.p = 7;
    e.n = 2;
    e.i = 3;
    e.M = 6;
    Int mod = pow_int(7, 6u);
    e.coeffs.resize(49);
    for (auto& c : e.coeffs) c = Int(static_cast<long>(rng() % 100000)) % mod;
    auto poly = to_polynomial(e);
    REQUIRE(poly.size() == e.coeffs.size());
    // inverse: c_j = sum_k (-1)^(k-j) C(k,j) a_k
    for (size_t j = 0; j < e.coeffs.size(); ++j) {
      Int c(0);
      for (size_t k = j; k < poly.size(); ++k) {
        Int term = poly[k] * binom(static_cast<unsigned long>(k), static_cast<unsigned long>(j)) %
                   mod;
        if ((k - j) % 2 == 1) term = -term;
        c = (c + term) % mod;
      }
      c %= mod;
      if (c < 0) c += mod;
      CHECK(c == e.coeffs[j]);
    }
  }
}

TEST_CASE("raw theta: shape, preconditions", "[mazur-tate]") {
  auto& f = fix();
  auto raw0 = raw_theta(f.plus, f.minus, 11, 0);
  CHECK(raw0.coeffs.size() == 10);
  CHECK(raw0.padic_modulus == 0);
  int64_t prev = -1;
  for (const auto& [a, v] : raw0.coeffs) {
    CHECK(a > prev);
    CHECK(a % 11 != 0);
    prev = a;
  }
  CHECK_THROWS_MATCHES(raw_theta(f.plus, f.plus, 11, 0), error,
                       Catch::Matchers::Predicate<error>(
                           [](const error& e) { return e.kind() == errc::bad_input; }));
  CHECK_THROWS_AS(raw_theta(f.plus, f.minus, 9, 0), error);   // not prime
  CHECK_THROWS_AS(raw_theta(f.plus, f.minus, 2, 0), error);   // even prime
  CHECK_THROWS_AS(raw_theta(f.plus, f.minus, 11, -1), error);
}

TEST_CASE("121c1 at 11: frozen invariants, corestriction, orthogonality",
          "[mazur-tate][oracle]") {
  auto& f = fix();

  SECTION("n = 0: mu = 0, lambda = 0") {
    auto raw = raw_theta(f.plus, f.minus, 11, 0);
    auto e = omega_project(raw, 0, 32);
    auto iv = invariants(to_polynomial(e), 11, 32);
    CHECK((iv.valid && iv.mu == 0 && iv.lambda == 0));
  }

  auto raw = raw_theta(f.plus, f.minus, 11, 1, 2);
  REQUIRE(raw.coeffs.size() == 110);

  SECTION("n = 1 frozen (mu, lambda) table and corestriction vanishing") {
    const std::map<int, std::pair<int, int>> expect = {
        {0, {0, 7}}, {2, {0, 7}}, {4, {0, 6}}, {5, {1, 4}}};
    for (auto [i, ml] : expect) {
      INFO("i = " << i);
      auto e = omega_project(raw, i, 32);
      REQUIRE(e.coeffs.size() == 11);
      auto iv = invariants(to_polynomial(e), 11, 32);
      CHECK(iv.valid);
      CHECK(iv.mu == ml.first);
      CHECK(iv.lambda == ml.second);
      auto co = corestrict(e);
      for (const auto& c : co.coeffs) CHECK(c == 0);
    }
  }

  SECTION("omega orthogonality reconstructs raw coefficients") {
    const int M = 8;
    Int mod = pow_int(11, static_cast<unsigned>(M));
    std::vector<IsotypicElement> projs;
    for (int i = 0; i <= 9; ++i) projs.push_back(omega_project(raw, i, M));
    for (const auto& [a, v] : raw.coeffs) {
      int64_t b = a % 11;
      int64_t d = mod_i64(teichmuller(b, 11, 2), 121);
      int64_t g = mulmod64(a % 121, invmod64(d, 121), 121);
      int64_t j = discrete_log_one_plus_p(g, 11, 1);
      Int omega = teichmuller(b, 11, M);
      Int oinv;
      mpz_invert(oinv.get_mpz_t(), omega.get_mpz_t(), mod.get_mpz_t());
      Int acc(0), opow(1);
      for (int i = 0; i <= 9; ++i) {
        acc = (acc + opow * projs[i].coeffs[static_cast<size_t>(j)]) % mod;
        opow = opow * oinv % mod;
      }
      Int want = Int(10) * Int(v.get_num()) % mod;
      Int dinv;
      mpz_invert(dinv.get_mpz_t(), Int(v.get_den()).get_mpz_t(), mod.get_mpz_t());
      want = want * dinv % mod;
      want %= mod;
      if (want < 0) want += mod;
      acc %= mod;
      if (acc < 0) acc += mod;
      CHECK(acc == want);
    }
  }

  SECTION("multiplicative stabilization with alpha = ±1") {
    auto st = raw_theta_stabilized(f.plus, f.minus, 11, 1, UnitRoot::rational(Rat(1)));
    CHECK(st.padic_modulus == 0);
    REQUIRE(st.coeffs.size() == raw.coeffs.size());
    for (size_t k = 0; k < st.coeffs.size(); ++k) {
      CHECK(st.coeffs[k].first == raw.coeffs[k].first);
      CHECK(st.coeffs[k].second == raw.coeffs[k].second);
    }
    auto st2 = raw_theta_stabilized(f.plus, f.minus, 11, 1, UnitRoot::rational(Rat(-1)));
    for (size_t k = 0; k < st2.coeffs.size(); ++k)
      CHECK(st2.coeffs[k].second == raw.coeffs[k].second);  // (-1)^(n+1) = 1 at n = 1
  }

  SECTION("parallel evaluation is deterministic") {
    auto raw4 = raw_theta(f.plus, f.minus, 11, 1, 4);
    REQUIRE(raw4.coeffs.size() == raw.coeffs.size());
    for (size_t k = 0; k < raw.coeffs.size(); ++k) {
      CHECK(raw4.coeffs[k].first == raw.coeffs[k].first);
      CHECK(raw4.coeffs[k].second == raw.coeffs[k].second);
    }
  }
}

TEST_CASE("omega projection guards", "[mazur-tate]") {
  RawTheta raw;
  raw.p = 5;
  raw.n = 0;
  raw.coeffs = {{1, Rat(1)}, {2, Rat(1, 5)}, {3, Rat(0)}, {4, Rat(2)}};
  CHECK_THROWS_MATCHES(omega_project(raw, 0, 4), error,
                       Catch::Matchers::Predicate<error>([](const error& e) {
                         return e.kind() == errc::non_integral_coefficient;
                       }));
  RawTheta ok = raw;
  ok.coeffs[1].second = Rat(1, 3);  // denominator prime to p is fine
  CHECK_NOTHROW(omega_project(ok, 0, 4));
  CHECK_THROWS_AS(omega_project(ok, -1, 4), error);
  CHECK_THROWS_AS(omega_project(ok, 4, 4), error);  // i > p-2
  CHECK_THROWS_AS(omega_project(ok, 0, 0), error);

  // stabilized element carries only p^8 of precision: M = 10 must refuse
  RawTheta st = ok;
  st.padic_modulus = pow_int(5, 8u);
  CHECK_THROWS_AS(omega_project(st, 0, 10), error);
  CHECK_NOTHROW(omega_project(st, 0, 8));
}

TEST_CASE("corestriction: level precondition and index arithmetic", "[mazur-tate]") {
  IsotypicElement e;
  e.p = 5;
  e.n = 0;
  e.i = 0;
  e.M = 4;
  e.coeffs = {Int(1)};
  CHECK_THROWS_MATCHES(corestrict(e), error,
                       Catch::Matchers::Predicate<error>(
                           [](const error& e2) { return e2.kind() == errc::bad_input; }));

  IsotypicElement e2;
  e2.p = 5;
  e2.n = 2;
  e2.i = 0;
  e2.M = 4;
  e2.coeffs.resize(25);
  for (size_t j = 0; j < 25; ++j) e2.coeffs[j] = Int(static_cast<long>(j));
  auto co = corestrict(e2);
  REQUIRE(co.coeffs.size() == 5);
  CHECK(co.n == 1);
  for (size_t j = 0; j < 5; ++j) {
    // indices of Gamma_{n} collapse mod p^(n-1): j, j+5, ..., j+20
    Int want = Int(static_cast<long>(j + (j + 5) + (j + 10) + (j + 15) + (j + 20)));
    CHECK(co.coeffs[j] == want % pow_int(5, 4u));
  }
}

TEST_CASE("Hensel unit root", "[mazur-tate]") {
  auto al = UnitRoot::hensel(-2, 5, 10);
  CHECK(!al.is_exact);
  CHECK(mod_i64(al.approx, 5) == 3);
  Int w = pow_int(5, 10u);
  CHECK(al.modulus == w);
  CHECK((al.approx * al.approx - Int(-2) * al.approx + 5) % w == 0);
  CHECK_THROWS_MATCHES(UnitRoot::hensel(55, 5, 10), error,
                       Catch::Matchers::Predicate<error>(
                           [](const error& e) { return e.kind() == errc::not_unit_root; }));
  // an exact root with positive p-valuation is rejected at stabilization time
  auto& f = fix();
  CHECK_THROWS_MATCHES(
      raw_theta_stabilized(f.plus, f.minus, 11, 0, UnitRoot::rational(Rat(11))), error,
      Catch::Matchers::Predicate<error>(
          [](const error& e) { return e.kind() == errc::not_unit_root; }));
}
