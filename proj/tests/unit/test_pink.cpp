#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "arbor/errors.hpp"
#include "arbor/parity.hpp"
#include "arbor/pink.hpp"

using namespace arbor;

TEST_CASE("alpha generators") {
  const auto a32 = alpha_generator(2, 3, 8);
  std::vector<std::string> set_words;
  for (std::size_t id = 0; id < a32.node_count(); ++id) {
    if (a32.parity_at(id)) set_words.push_back(NodeAddress::from_flat(id).to_string());
  }
  CHECK(set_words == std::vector<std::string>{"a", "abaa", "abaabaa"});

  CHECK(alpha_generator(1, 2, 5).parity(NodeAddress::root()));
  for (int r = 1; r <= 6; ++r) {
    for (int i = 1; i <= r; ++i) {
      for (int n = 1; n <= 12; ++n) {
        std::size_t expected = 0;
        for (int m = 0; i - 1 + m * r < n; ++m) ++expected;
        CHECK(alpha_generator(i, r, n).popcount() == expected);
      }
    }
  }
  CHECK_THROWS_AS(alpha_generator(0, 2, 4), DomainError);
  CHECK_THROWS_AS(alpha_generator(3, 2, 4), DomainError);

  const auto gens = GeneratorSet::pink(3, 6);
  CHECK(gens.r == 3);
  CHECK(gens.depth == 6);
  REQUIRE(gens.elements.size() == 3);
  for (int r = 1; r <= 6; ++r) {
    for (int n = 1; n <= 12; ++n) {
      for (const auto& g : GeneratorSet::pink(r, n).elements) CHECK(in_b_prime(g, r));
    }
  }
}

TEST_CASE("closure") {
  const FiniteGroup trivial = closure(GeneratorSet{0, 3, {}}, 1);
  CHECK(trivial.order() == 1);
  CHECK(trivial.element(0).is_identity());
  CHECK(closure(GeneratorSet::pink(1, 4), 1000).order() == 16);
  CHECK(closure(GeneratorSet::pink(2, 4), 5000).order() == 4096);
  CHECK_THROWS_AS(closure(GeneratorSet::pink(1, 4), 0), DomainError);
  try {
    closure(GeneratorSet::pink(2, 4), 100);
    FAIL("expected the cap to trip");
  } catch (const CapExceeded& e) {
    CHECK(e.partial_count() > 100);
  }
  GeneratorSet mixed{0, 3, {TreeAutomorphism(3), TreeAutomorphism(4)}};
  CHECK_THROWS_AS(closure(mixed, 100), DomainError);

  // Closed under products and inverses; elements sorted.
  const FiniteGroup g = closure(GeneratorSet::pink(2, 3), 1000);
  const auto elements = g.elements();
  CHECK(std::is_sorted(elements.begin(), elements.end()));
  for (const auto& a : elements) {
    CHECK(g.contains(invert(a)));
    for (const auto& b : elements) CHECK(g.contains(a * b));
  }
  CHECK_THROWS_AS(g.element(g.order()), DomainError);
}

TEST_CASE("closure does not depend on the worker count") {
  ::setenv("ARBOR_THREADS", "1", 1);
  const FiniteGroup one = closure(GeneratorSet::pink(3, 4), 1 << 20);
  ::setenv("ARBOR_THREADS", "4", 1);
  const FiniteGroup four = closure(GeneratorSet::pink(3, 4), 1 << 20);
  ::unsetenv("ARBOR_THREADS");
  CHECK(one == four);
}

TEST_CASE("order formulas") {
  for (int r = 1; r <= 6; ++r) {
    for (int n = 1; n <= r; ++n) CHECK(log2_order_pink(r, n) == (std::int64_t{1} << n) - 1);
  }
  CHECK(log2_order_pink(2, 5) == 23);
  CHECK(log2_order_pink(3, 4) == 14);
  CHECK(log2_order_s(2, 5) == 11);
  for (int r = 1; r <= 6; ++r) {
    for (int n = 2; n <= r; ++n) CHECK(log2_order_s(r, n) == (std::int64_t{1} << (n - 1)));
    for (int n = 2; n <= 12; ++n) {
      CHECK(log2_order_pink(r, n) - log2_order_pink(r, n - 1) == log2_order_s(r, n));
    }
  }
  CHECK_THROWS_AS(log2_order_s(2, 1), DomainError);
  CHECK_THROWS_AS(log2_order_pink(0, 3), DomainError);
}

TEST_CASE("B' enumeration") {
  for (int r = 1; r <= 4; ++r) {
    for (int n = 1; n <= std::min(r, 4); ++n) {
      CHECK(enumerate_b_prime(r, n).order() == std::uint64_t{1} << ((1 << n) - 1));
    }
  }
  CHECK(enumerate_b_prime(1, 4).order() == 16);
  const FiniteGroup b24 = enumerate_b_prime(2, 4);
  CHECK(b24.order() == 4096);
  CHECK(b24 == closure(GeneratorSet::pink(2, 4), 1 << 20));
  CHECK_THROWS_AS(enumerate_b_prime(2, kEnumerationMaxDepth + 1), CapExceeded);
  CHECK_THROWS_AS(enumerate_m_prime(2, kEnumerationMaxDepth + 1), CapExceeded);

  for (int r = 1; r <= 3; ++r) {
    for (int n = 1; n <= 4; ++n) {
      const FiniteGroup pink = closure(GeneratorSet::pink(r, n), 1 << 20);
      const FiniteGroup b = enumerate_b_prime(r, n);
      const FiniteGroup m = enumerate_m_prime(r, n);
      CHECK(pink == b);
      for (const auto& s : b.elements()) CHECK(m.contains(s));
      if (n >= 2) {
        // Kernel of restriction to level n - 1.
        std::uint64_t kernel = 0;
        for (const auto& s : b.elements()) kernel += restrict(s, n - 1).is_identity();
        CHECK(kernel == std::uint64_t{1} << log2_order_s(r, n));
      }
    }
  }
}

TEST_CASE("orders table") {
  const int r2[] = {2};
  const int r1[] = {1};
  const int ns[] = {1, 2, 3, 4};
  const auto rows = orders_table(r2, ns, 1 << 20);
  REQUIRE(rows.size() == 4);
  const std::int64_t expected[] = {1, 3, 6, 12};
  for (int i = 0; i < 4; ++i) {
    CHECK(rows[i].log2_formula == expected[i]);
    CHECK(rows[i].bfs_order == std::uint64_t{1} << expected[i]);
    CHECK(rows[i].match);
  }
  const auto ones = orders_table(r1, ns, 1 << 20);
  for (int i = 0; i < 4; ++i) CHECK(ones[i].log2_formula == i + 1);
  CHECK(orders_table(r1, std::span<const int>{}, 1 << 20).empty());

  const auto capped = orders_table(r2, ns, 100);
  CHECK(capped[3].bfs_capped);
  CHECK(capped[3].match);
  CHECK_FALSE(capped[3].bfs_order.has_value());
  CHECK(capped[3].bprime_count == 4096u);

  std::ostringstream csv;
  write_orders_csv(csv, rows);
  CHECK(csv.str().rfind("r,n,log2_formula,bfs_order,bprime_count,match_flag\n2,1,1,2,2,true\n", 0) == 0);
}
