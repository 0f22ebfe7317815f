#include <doctest.h>

#include "arbor/errors.hpp"
#include "arbor/random.hpp"
#include "arbor/square_class.hpp"
#include "arbor/verify/oracles.hpp"

using namespace arbor;

namespace {

Rational q(const char* text) { return parse_rational(text); }

SquareClass cls(bool negative, std::vector<int> primes) {
  SquareClass out;
  out.negative = negative;
  for (int p : primes) out.primes.emplace_back(p);
  return out;
}

}  // namespace

TEST_CASE("square classes") {
  CHECK(square_class(q("12")) == cls(false, {3}));
  CHECK(square_class(q("-5/9")) == cls(true, {5}));
  CHECK(square_class(q("4")).is_trivial());
  CHECK(square_class(q("4")).to_string() == "1");
  CHECK(square_class(q("-6/7")).to_string() == "-1*2*3*7");
  CHECK(square_class(q("8/27")) == cls(false, {2, 3}));
  CHECK_THROWS_AS(square_class(q("0")), DomainError);

  // Cofactors beyond the trial-division bound.
  CHECK(square_class(Rational(BigInt(1000003))) == cls(false, {1000003}));
  const BigInt big_prime("1000000000039");
  CHECK(square_class(Rational(big_prime * 6)).primes == std::vector<BigInt>{2, 3, big_prime});
  CHECK(square_class(Rational(BigInt(10000019) * 10000019 * 5)) == cls(false, {5}));
  CHECK_THROWS_AS(square_class(Rational(BigInt(10000019) * 10000079)), UnfactoredError);

  // Multiplication of classes is symmetric difference.
  CHECK(cls(true, {2, 3}) * cls(true, {3, 5}) == cls(false, {2, 5}));
  Rng rng(31);
  for (int t = 0; t < 200; ++t) {
    const Rational a(rng.between(-5000, 5000) | 1, rng.between(1, 300));
    const Rational b(rng.between(-5000, 5000) | 1, rng.between(1, 300));
    CHECK(square_class(a * b) == square_class(a) * square_class(b));
    CHECK(square_class(a * a).is_trivial());
    CHECK(square_class(a).is_trivial() == oracle::is_rational_square(a));
  }
}

TEST_CASE("parsing rationals") {
  CHECK(parse_rational("3") == Rational(3));
  CHECK(parse_rational("-6/4") == Rational(-3, 2));
  CHECK(parse_rational("+7/1") == Rational(7));
  CHECK(to_string(parse_rational("-6/4")) == "-3/2");
  CHECK(parse_rational("123456789012345678901234567890") == Rational(BigInt("123456789012345678901234567890")));
  for (const char* bad : {"", "-", "1/", "/2", "1/0", "1.5", "a", "1/-2", "--1", " 1"}) {
    CHECK_THROWS_AS(parse_rational(bad), DomainError);
  }
}

TEST_CASE("discriminant sequence") {
  CHECK(disc_sequence(q("-1"), q("5"), 2) == std::vector<Rational>{6, -5});
  CHECK(disc_sequence(q("0"), q("3"), 1) == std::vector<Rational>{3});
  CHECK(disc_sequence(q("-1"), q("3"), 2) == std::vector<Rational>{4, -3});
  CHECK(disc_sequence(q("-1"), q("3"), 0).empty());
  CHECK_THROWS_AS(disc_sequence(q("-1"), q("-1"), 2), DomainError);
  CHECK_THROWS_AS(disc_sequence(q("-1"), q("0"), 2), DomainError);
  CHECK_THROWS_AS(disc_sequence(q("-1"), q("5"), -1), DomainError);
}

TEST_CASE("discriminants of iterates match D_i up to squares") {
  Rng rng(32);
  for (int t = 0; t < 12; ++t) {
    const Rational c(rng.between(-9, 9), rng.between(1, 4));
    Rational x0;
    do {
      x0 = Rational(rng.between(-20, 20), rng.between(1, 5));
    } while (x0 == c);
    std::vector<Rational> d;
    try {
      d = disc_sequence(c, x0, 6);
    } catch (const DomainError&) {
      continue;
    }
    for (int i = 1; i <= 6; ++i) {
      const Rational disc = oracle::iterate_discriminant(c, x0, i);
      REQUIRE(disc != 0);
      CHECK_MESSAGE(oracle::is_rational_square(disc * d[i - 1]), "c=", c.str(), " x0=", x0.str(), " i=", i);
    }
  }
  // z^2 + c - x0 has discriminant 4 (x0 - c).
  CHECK(oracle::iterate_discriminant(q("-1"), q("5"), 1) == 24);
}

TEST_CASE("condition one") {
  const auto holds = check_condition_one(q("-1"), q("5"), 2);
  CHECK(holds.condition);
  CHECK(holds.rank == 4);
  CHECK(holds.dependencies.empty());
  CHECK(holds.labels == std::vector<std::string>{"-1", "2", "D1", "D2"});

  const auto square = check_condition_one(q("-1"), q("3"), 2);
  CHECK_FALSE(square.condition);
  CHECK(square.dependencies == std::vector<std::vector<int>>{{2}});

  const auto collide = check_condition_one(q("0"), q("2"), 1);
  CHECK_FALSE(collide.condition);
  CHECK(collide.dependencies == std::vector<std::vector<int>>{{1, 2}});

  CHECK_THROWS_AS(check_condition_one(q("-1"), q("5"), 3), UnsupportedError);
  CHECK_THROWS_AS(check_condition_one(q("-1"), q("5"), 0), DomainError);
  CHECK_THROWS_AS(check_condition_one(q("1"), q("5"), 2), ContractError);
  CHECK_THROWS_AS(check_condition_one(q("0"), q("5"), 2), ContractError);
}

TEST_CASE("Aut(T_n) criterion") {
  CHECK(check_aut_tn(q("-1"), q("5"), 2).condition);
  CHECK(check_aut_tn(q("-1"), q("5"), 2).rank == 2);
  CHECK_FALSE(check_aut_tn(q("-1"), q("3"), 1).condition);
  CHECK(check_aut_tn(q("0"), q("-1"), 1).condition);
  CHECK_THROWS_AS(check_aut_tn(q("0"), q("-1"), 0), DomainError);

  Rng rng(33);
  for (int t = 0; t < 300; ++t) {
    const Rational c = rng.coin() ? Rational(0) : Rational(-1);
    const Rational x0(rng.between(-40, 40), rng.between(1, 9));
    std::vector<Rational> d;
    try {
      d = disc_sequence(c, x0, 10);
    } catch (const DomainError&) {
      continue;
    }
    bool earlier_failed = false;
    for (int n = 1; n <= 10; ++n) {
      const bool ok = check_aut_tn(c, x0, n).condition;
      CHECK(ok == !oracle::subset_dependent(std::span(d).first(n)));
      if (earlier_failed) CHECK_FALSE(ok);
      earlier_failed = earlier_failed || !ok;
    }
  }
}

TEST_CASE("independence certificates") {
  const std::vector<Rational> values{2, 3, 6, 5, 10, 4};
  const auto result = square_class_independence(values);
  CHECK_FALSE(result.independent);
  CHECK(result.rank == 3);
  // 6 = 2*3, 10 = 2*5, 4 = square.
  CHECK(result.dependencies == std::vector<std::vector<int>>{{0, 1, 2}, {0, 3, 4}, {5}});
  for (const auto& dep : result.dependencies) {
    Rational product = 1;
    for (int i : dep) product *= values[i];
    CHECK(oracle::is_rational_square(product));
  }
  CHECK(square_class_independence(std::vector<Rational>{}).independent);
  CHECK(square_class_independence(std::vector<Rational>{-1, 2, -2}).dependencies ==
        std::vector<std::vector<int>>{{0, 1, 2}});
}
