// Manin symbols on P^1(Z/N): relation quotient dimension, Hecke action,
// iota involution, Heilbronn family.

#include <catch2/catch_amalgamated.hpp>

#include <numeric>

#include "mtel/modsym.hpp"

using namespace mtel;

namespace {

// Independent dimension oracle: dim = 2 g(X_0(N)) + nu_inf - 1 via the
// classical genus formula.
int64_t dim_formula(int64_t N) {
  if (N == 1) return 0;
  auto fac = factor64(N);
  int64_t mu = N;
  for (auto [p, e] : fac) mu = mu / p * (p + 1);
  int64_t nu2 = 1, nu3 = 1;
  if (N % 4 == 0) {
    nu2 = 0;
  } else {
    for (auto [p, e] : fac) {
      if (p == 2) continue;
      nu2 *= (p % 4 == 1) ? 2 : 0;
    }
  }
  if (N % 9 == 0) {
    nu3 = 0;
  } else {
    for (auto [p, e] : fac) {
      if (p == 3) continue;
      nu3 *= (p % 3 == 1) ? 2 : 0;
    }
  }
  int64_t nuinf = 0;
  for (int64_t d = 1; d <= N; ++d) {
    if (N % d) continue;
    int64_t g = std::gcd(d, N / d), phi = g, m = g;
    for (int64_t q = 2; q * q <= m; ++q)
      if (m % q == 0) {
        phi = phi / q * (q - 1);
        while (m % q == 0) m /= q;
      }
    if (m > 1) phi = phi / m * (m - 1);
    nuinf += phi;
  }
  int64_t twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * nuinf;
  REQUIRE(twelve_g % 12 == 0);
  return 2 * (twelve_g / 12) + nuinf - 1;
}

using Mat = std::vector<std::vector<Rat>>;

Mat mul(const Mat& X, const Mat& Y) {
  const size_t n = X.size();
  Mat Z(n, std::vector<Rat>(n, Rat(0)));
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < n; ++k) {
      if (X[i][k] == 0) continue;
      for (size_t j = 0; j < n; ++j) Z[i][j] += X[i][k] * Y[k][j];
    }
  return Z;
}

}  // namespace

TEST_CASE("quotient dimensions at the levels used downstream", "[modsym]") {
  struct {
    int64_t N;
    int64_t dim;
  } fixed[] = {{1, 0}, {11, 3}, {32, 9}, {121, 23}, {800, 241}, {968, 265}, {1089, 265}};
  for (auto [N, d] : fixed) {
    INFO("N = " << N);
    SymbolSpace sp(N);
    CHECK(sp.dimension() == d);
    CHECK(verify_relations(sp));
  }
}

TEST_CASE("quotient dimension equals 2g + nu_inf - 1 for all N <= 60", "[modsym][property]") {
  for (int64_t N = 1; N <= 60; ++N) {
    INFO("N = " << N);
    SymbolSpace sp(N);
    CHECK(sp.dimension() == dim_formula(N));
    CHECK(verify_relations(sp));
  }
}

TEST_CASE("Heilbronn family: determinants and frozen sizes", "[modsym]") {
  CHECK(heilbronn_merel(2).size() == 4);
  CHECK(heilbronn_merel(3).size() == 7);
  for (int64_t ell : {2, 3, 5, 7, 11, 13}) {
    for (const auto& m : heilbronn_merel(ell)) {
      CHECK(m.a * m.d - m.b * m.c == ell);
    }
  }
}

TEST_CASE("Hecke eigenvalues of T_2 at level 11", "[modsym]") {
  SymbolSpace sp(11);
  auto T = hecke_matrix(sp, 2);
  REQUIRE(T.size() == 3);
  // the characteristic roots are a_2(11a1) = -2 (twice) and 2 + 1 = 3 (Eisenstein)
  auto det3 = [](const Mat& M) {
    // store into a Rat before returning: gmpxx expressions are lazy views
    Rat d = M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
            M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
            M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    return d;
  };
  auto A = T;
  for (int i = 0; i < 3; ++i) A[i][i] += 2;
  CHECK(det3(A) == 0);
  auto B = T;
  for (int i = 0; i < 3; ++i) B[i][i] -= 3;
  CHECK(det3(B) == 0);
}

TEST_CASE("Hecke operators commute with each other and with iota", "[modsym][property]") {
  for (int64_t N : {11, 15, 21, 33, 49}) {
    INFO("N = " << N);
    SymbolSpace sp(N);
    std::vector<int64_t> ells;
    for (int64_t ell : {2, 3, 5, 7}) {
      if (N % ell) ells.push_back(ell);
      if (ells.size() == 2) break;
    }
    REQUIRE(ells.size() == 2);
    auto T1 = hecke_matrix(sp, ells[0]);
    auto T2 = hecke_matrix(sp, ells[1]);
    auto I = sp.iota_matrix();
    CHECK(mul(T1, T2) == mul(T2, T1));
    CHECK(mul(T1, I) == mul(I, T1));
    CHECK(mul(T2, I) == mul(I, T2));
    // iota is an involution
    auto I2 = mul(I, I);
    for (size_t r = 0; r < I2.size(); ++r)
      for (size_t c = 0; c < I2.size(); ++c) CHECK(I2[r][c] == Rat(r == c ? 1 : 0));
  }
}

TEST_CASE("hecke_matrix rejects ell dividing the level", "[modsym]") {
  SymbolSpace sp(11);
  CHECK_THROWS_MATCHES(hecke_matrix(sp, 11), error,
                       Catch::Matchers::Predicate<error>(
                           [](const error& e) { return e.kind() == errc::bad_prime; }));
}

TEST_CASE("reduction rows express every symbol in the quotient basis", "[modsym][property]") {
  SymbolSpace sp(121);
  const auto dim = sp.dimension();
  for (int32_t x = 0; x < static_cast<int32_t>(sp.p1().size()); ++x) {
    for (const auto& [b, c] : sp.reduction_row(x)) {
      CHECK(b >= 0);
      CHECK(b < dim);
      CHECK(c != 0);
    }
  }
}
