// ec_arith: Weierstrass invariants, point counting, local reduction data.

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mtel/ec.hpp"

using namespace mtel;

namespace {

Curve c11a1() { return Curve("11a1", {Int(0), Int(-1), Int(1), Int(-10), Int(-20)}, Int(11)); }
Curve c121c1() { return Curve("121c1", {Int(1), Int(1), Int(0), Int(-2), Int(-7)}, Int(121)); }
Curve c800q1() { return Curve("800q1", {Int(0), Int(0), Int(0), Int(100), Int(0)}, Int(800)); }

}  // namespace

TEST_CASE("Weierstrass invariants of fixed curves", "[ec]") {
  auto E = c121c1();
  CHECK(E.disc == -14641);
  CHECK(E.c4 == 121);
  CHECK(E.c6 == 5203);
  CHECK(E.j_invariant() == Rat(-121));

  auto F = c11a1();
  CHECK(F.disc == -161051);
  CHECK(F.c4 == 496);
  CHECK(F.c6 == 20008);
  CHECK(F.j_invariant() == Rat(Int(-122023936), Int(161051)));
}

TEST_CASE("b-invariant and c-invariant identities on random curves", "[ec][property]") {
  std::mt19937_64 rng(41);
  int built = 0;
  while (built < 220) {
    std::array<Int, 5> a;
    for (auto& x : a) x = Int(static_cast<long>(rng() % 41) - 20);
    try {
      Curve E("rnd", a);
      ++built;
      CHECK(Int(4) * E.b8 == E.b2 * E.b6 - E.b4 * E.b4);
      CHECK(E.c4 * E.c4 * E.c4 - E.c6 * E.c6 == Int(1728) * E.disc);
    } catch (const error& e) {
      REQUIRE(e.kind() == errc::singular_curve);
    }
  }
}

TEST_CASE("singular curves are rejected", "[ec]") {
  CHECK_THROWS_MATCHES((Curve{"cusp", {Int(0), Int(0), Int(0), Int(0), Int(0)}}), error,
                       Catch::Matchers::Predicate<error>(
                           [](const error& e) { return e.kind() == errc::singular_curve; }));
  CHECK_THROWS_AS((Curve{"node", {Int(0), Int(0), Int(0), Int(-3), Int(2)}}), error);
}

TEST_CASE("a_ell for 11a1 and 121c1", "[ec]") {
  auto E = c11a1();
  CHECK(ap(E, 2) == -2);
  CHECK(ap(E, 3) == -1);
  CHECK(ap(E, 5) == 1);
  CHECK(ap(E, 7) == -2);
  CHECK(ap(E, 13) == 4);
  CHECK_THROWS_MATCHES(ap(E, 11), error, Catch::Matchers::Predicate<error>([](const error& e) {
                         return e.kind() == errc::bad_reduction;
                       }));
  CHECK(ap(c121c1(), 2) == 1);
}

TEST_CASE("count_points matches the naive enumeration oracle", "[ec][property]") {
  std::mt19937_64 rng(43);
  const int64_t primes[] = {3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};
  int done = 0;
  while (done < 200) {
    std::array<Int, 5> a;
    for (auto& x : a) x = Int(static_cast<long>(rng() % 19) - 9);
    try {
      Curve E("rnd", a);
      int64_t ell = primes[rng() % std::size(primes)];
      if (E.disc % ell == 0) continue;
      ++done;
      int64_t n1 = count_points(E, ell), n2 = count_points_naive(E, ell);
      CHECK(n1 == n2);
      // Hasse: |a_ell| <= 2 sqrt(ell)
      int64_t t = ell + 1 - n1;
      CHECK(t * t <= 4 * ell);
    } catch (const error&) {
      continue;
    }
  }
}

TEST_CASE("local reduction data at additive primes (Table rows)", "[ec]") {
  struct Row {
    Curve E;
    int64_t p, vd, e, f;
    const char* kod;
    potential_class pot;
  };
  const Row rows[] = {
      {c121c1(), 11, 4, 3, 2, "IV", potential_class::pot_good_supersingular},
      {Curve("968d1", {Int(0), Int(0), Int(0), Int(-11), Int(22)}, Int(968)), 11, 2, 6, 2, "II",
       potential_class::pot_good_supersingular},
      {Curve("2890h1", {Int(1), Int(1), Int(0), Int(3), Int(-1)}, Int(2890)), 17, 2, 6, 2, "II",
       potential_class::pot_good_supersingular},
      {Curve("4232i1", {Int(0), Int(-1), Int(0), Int(-93280), Int(14810844)}, Int(4232)), 23, 10,
       6, 2, "II*", potential_class::pot_good_supersingular},
      {Curve("2890e1", {Int(1), Int(0), Int(1), Int(716), Int(-10284)}, Int(2890)), 17, 8, 3, 2,
       "IV*", potential_class::pot_good_supersingular},
      {Curve("1089a1", {Int(0), Int(0), Int(1), Int(0), Int(30)}, Int(1089)), 11, 4, 3, 2, "IV",
       potential_class::pot_good_supersingular},
      {c800q1(), 5, 6, 2, 2, "I0*", potential_class::pot_good_ordinary},
  };
  for (const auto& r : rows) {
    INFO(r.E.label);
    auto ld = local_reduction(r.E, r.p);
    CHECK(ld.ord_delta_min == r.vd);
    CHECK(ld.red == reduction_class::additive);
    CHECK(ld.defect_e == r.e);
    CHECK(ld.ord_conductor == r.f);
    CHECK(ld.kodaira == r.kod);
    CHECK(ld.pot == r.pot);
  }
}

TEST_CASE("local reduction at good and multiplicative primes", "[ec]") {
  auto E = c11a1();
  auto good = local_reduction(E, 5);
  CHECK(good.red == reduction_class::good_ordinary);
  CHECK(good.pot == potential_class::already_semistable);
  CHECK(good.kodaira == "I0");
  CHECK(good.ord_conductor == 0);

  auto mult = local_reduction(E, 11);
  CHECK(mult.red == reduction_class::multiplicative);
  CHECK(mult.pot == potential_class::already_semistable);
  CHECK(mult.kodaira == "I5");
  CHECK(mult.ord_conductor == 1);

  CHECK_THROWS_MATCHES(local_reduction(E, 3), error,
                       Catch::Matchers::Predicate<error>(
                           [](const error& e) { return e.kind() == errc::small_prime; }));
}

TEST_CASE("star discriminant has the (-1/p) sign", "[ec]") {
  CHECK(star_discriminant(5) == 5);
  CHECK(star_discriminant(13) == 13);
  CHECK(star_discriminant(7) == -7);
  CHECK(star_discriminant(11) == -11);
  CHECK(star_discriminant(23) == -23);
}

TEST_CASE("quadratic twist multiplies a_ell by the twist character", "[ec][property]") {
  auto E = c800q1();
  Int dstar = star_discriminant(5);
  REQUIRE(dstar == 5);
  Curve tw = quadratic_twist(E, dstar);
  // after minimization at 5 the twist is good ordinary with a_5 = -2
  CHECK(ell_good_ap_after_minimization(tw, 5) == -2);
  for (int64_t ell : {3, 7, 11, 13, 17, 19, 23, 29}) {
    if (tw.disc % ell == 0 || E.disc % ell == 0) continue;
    Curve Egood("e", E.a);   // conductor left unknown: a_ell via the discriminant test
    Curve Tgood("t", tw.a);
    int chi = mpz_legendre(dstar.get_mpz_t(), Int(ell).get_mpz_t());
    CHECK(ap(Tgood, ell) == chi * ap(Egood, ell));
  }
}

TEST_CASE("twisting preserves j; twisting twice preserves a_ell", "[ec][property]") {
  std::mt19937_64 rng(47);
  const long squarefree[] = {-7, -5, -3, -2, -1, 1, 2, 3, 5, 6, 7, 10};
  int done = 0;
  while (done < 200) {
    std::array<Int, 5> a;
    for (auto& x : a) x = Int(static_cast<long>(rng() % 15) - 7);
    long d = squarefree[rng() % std::size(squarefree)];
    try {
      Curve E("rnd", a);
      Curve T1 = quadratic_twist(E, Int(d));
      Curve T2 = quadratic_twist(T1, Int(d));
      ++done;
      CHECK(T1.j_invariant() == E.j_invariant());
      CHECK(T2.j_invariant() == E.j_invariant());
      // E^(d^2) is isomorphic to E over Q: equal traces at good primes
      for (int64_t ell : {5, 7, 11, 13}) {
        if (E.disc % ell == 0 || T2.disc % ell == 0) continue;
        CHECK(ap(T2, ell) == ap(E, ell));
      }
    } catch (const error&) {
      continue;
    }
  }
  CHECK_THROWS_MATCHES(quadratic_twist(c11a1(), Int(12)), error,
                       Catch::Matchers::Predicate<error>(
                           [](const error& e) { return e.kind() == errc::invalid_twist; }));
  CHECK_THROWS_AS(quadratic_twist(c11a1(), Int(0)), error);
}

TEST_CASE("additive a_p contribution is zero", "[ec]") {
  CHECK(eigenvalue_for_additive_prime(c121c1(), 11) == 0);
  CHECK_THROWS_MATCHES(eigenvalue_for_additive_prime(c11a1(), 5), error,
                       Catch::Matchers::Predicate<error>(
                           [](const error& e) { return e.kind() == errc::not_additive; }));
}
