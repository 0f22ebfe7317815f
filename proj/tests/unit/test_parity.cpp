#include <doctest.h>

#include <map>
#include <set>

#include "arbor/errors.hpp"
#include "arbor/parity.hpp"
#include "arbor/pink.hpp"
#include "arbor/preimage_tree.hpp"
#include "arbor/random.hpp"
#include "arbor/verify/oracles.hpp"

using namespace arbor;

namespace {

std::vector<TreeAutomorphism> everything(int n) {
  std::vector<TreeAutomorphism> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << ((1u << n) - 1)); ++mask) {
    out.push_back(TreeAutomorphism::from_words(n, {mask}));
  }
  return out;
}

// Members of M'_{r,n} with varied P_r: the Pink generators and Frobenius
// elements of a few preimage trees.
std::vector<TreeAutomorphism> m_prime_generators(int r, int n) {
  std::vector<TreeAutomorphism> gens = GeneratorSet::pink(r, n).elements;
  for (const std::uint64_t p : {3, 5, 7, 11, 13, 17, 19, 23}) {
    const auto cs = find_pcf_c(p, r);
    if (cs.empty()) continue;
    const PcfParameter f = make_pcf(p, cs.front(), r);
    const PreimageTree tree = canonical_label(build_preimage_tree(f, smallest_x0(f), n, 1));
    if (tree.field().k() > 64) continue;
    gens.push_back(frobenius_automorphism(tree));
    if (gens.size() >= static_cast<std::size_t>(r) + 3) break;
  }
  return gens;
}

}  // namespace

TEST_CASE("e_bound") {
  for (int r = 1; r <= 4; ++r) {
    for (int n = 1; n <= 9; ++n) {
      CHECK(e_bound(n - 1, n, r) == 1);
      for (int m = 0; m < n; ++m) CHECK(e_bound(m, n, r) == oracle::exponent_definition(m, n, r));
    }
    CHECK(e_bound(0, r, r) == 1);
  }
  CHECK(e_bound(0, 5, 2) == 3);
  CHECK_THROWS_AS(e_bound(5, 5, 2), DomainError);
  CHECK_THROWS_AS(e_bound(-1, 5, 2), DomainError);
  CHECK_THROWS_AS(e_bound(0, 5, 0), DomainError);
}

TEST_CASE("W(r,i)") {
  // Words of length r i - 1 with an a at every r-th position: 2^(ri - 1 - (i - 1)).
  for (int r = 1; r <= 4; ++r) {
    for (int i = 1; i * r <= 10; ++i) {
      const auto words = w_words(r, i);
      CHECK(words.size() == (std::size_t{1} << (r * i - i)));
      for (const auto& w : words) {
        CHECK(w.level == r * i - 1);
        for (int j = r; j <= w.level; j += r) CHECK(w.symbol(j) == Symbol::a);
      }
    }
  }
  CHECK_THROWS_AS(w_words(2, 0), DomainError);
}

TEST_CASE("truncated residues") {
  const auto minus_one = TruncatedResidue::reduce(-1, 3);
  CHECK(minus_one.value == 7);
  CHECK(minus_one.congruent_to(-1));
  CHECK(minus_one.congruent_to(15));
  CHECK_FALSE(minus_one.congruent_to(1));
  const auto three = TruncatedResidue::reduce(3, 2);
  CHECK(minus_one.congruent(three));  // 7 = 3 mod 4
  const auto product = minus_one * three;
  CHECK(product.exponent == 2);
  CHECK(product.value == 1);
  CHECK(TruncatedResidue::reduce(5, 1).is_one());
  CHECK_THROWS_AS(TruncatedResidue::reduce(1, 0), DomainError);
}

TEST_CASE("Q_r") {
  for (int r = 1; r <= 3; ++r) {
    const int n = r + 1;
    CHECK(q_r_trunc(TreeAutomorphism(n), NodeAddress::root(), r) == 0);
    // One bit at a w, w in W(r, 1), seen from x = a.
    for (const auto& w : w_words(r, 1)) {
      TreeAutomorphism s(n);
      s.flip_parity(NodeAddress::parse("a").concat(w));
      CHECK(q_r_trunc(s, NodeAddress::parse("a"), r) == 2);
    }
  }
  Rng rng(12);
  for (int t = 0; t < 300; ++t) {
    const int n = 1 + static_cast<int>(rng.below(7));
    const int r = 1 + static_cast<int>(rng.below(3));
    const auto s = random_automorphism(n, rng.next());
    const ParityProfile profile(s, r);
    for (std::size_t id = 0; id < (std::size_t{1} << (n + 1)) - 1; ++id) {
      const NodeAddress x = NodeAddress::from_flat(id);
      const auto q = q_r_trunc(s, x, r);
      CHECK(q % 2 == 0);
      CHECK(q == oracle::q_definition(s, x.to_string(), r));
      CHECK(profile.q(x) == q);
    }
  }
  CHECK_THROWS_AS(q_r_trunc(TreeAutomorphism(2), NodeAddress::parse("aaa"), 1), DomainError);
}

TEST_CASE("P_r") {
  CHECK(p_r_trunc(TreeAutomorphism(4), NodeAddress::root(), 2).is_one());
  CHECK(p_r_trunc(TreeAutomorphism(4), NodeAddress::root(), 2).exponent == 2);
  for (int r = 1; r <= 3; ++r) {
    for (int n = 1; n <= r; ++n) {
      TreeAutomorphism swap(n);
      swap.flip_parity(NodeAddress::root());
      const auto res = p_r_trunc(swap, NodeAddress::root(), r);
      CHECK(res.exponent == 1);
      CHECK(res.value == 1);
    }
  }
  for (int r = 1; r <= 4; ++r) {
    for (int i = 1; i <= r; ++i) {
      const auto alpha = alpha_generator(i, r, 9);
      for (std::size_t id = 0; id < alpha.node_count(); ++id) {
        CHECK(p_r_trunc(alpha, NodeAddress::from_flat(id), r).is_one());
      }
    }
  }
  Rng rng(13);
  for (int t = 0; t < 300; ++t) {
    const int n = 1 + static_cast<int>(rng.below(7));
    const int r = 1 + static_cast<int>(rng.below(3));
    const auto s = random_automorphism(n, rng.next());
    const ParityProfile profile(s, r);
    for (std::size_t id = 0; id < s.node_count(); ++id) {
      const NodeAddress x = NodeAddress::from_flat(id);
      const auto p = p_r_trunc(s, x, r);
      CHECK(p.value % 2 == 1);
      CHECK(p.exponent == e_bound(x.level, n, r));
      CHECK(p.value == oracle::p_definition(s, x.to_string(), r));
      CHECK(profile.p(x) == p);
    }
    CHECK(profile.all_one() == in_b_prime(s, r));
    CHECK(profile.consistent() == in_m_prime(s, r));
  }
  CHECK_THROWS_AS(p_r_trunc(TreeAutomorphism(2), NodeAddress::parse("ab"), 1), DomainError);
}

TEST_CASE("membership predicates") {
  CHECK(in_b_prime(TreeAutomorphism(5), 2));
  CHECK(in_m_prime(TreeAutomorphism(5), 2));
  for (int r = 1; r <= 3; ++r) {
    for (int n = 1; n <= r; ++n) {
      for (const auto& s : everything(n)) {
        CHECK(in_b_prime(s, r));
        CHECK(in_m_prime(s, r));
      }
    }
  }
  for (int r = 1; r <= 3; ++r) {
    std::size_t bad = 0;
    for (const auto& s : everything(4)) {
      const bool b = in_b_prime(s, r);
      const bool m = in_m_prime(s, r);
      bad += b && !m;
      bad += b != oracle::in_b_prime(s, r) || m != oracle::in_m_prime(s, r);
      // Restriction keeps membership.
      bad += b && !in_b_prime(restrict(s, 3), r);
      bad += m && !in_m_prime(restrict(s, 3), r);
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("p_r_root") {
  CHECK(p_r_root(TreeAutomorphism(7), 2).is_one());
  CHECK(p_r_root(TreeAutomorphism(7), 2).exponent == e_bound(0, 7, 2));
  Rng rng(14);
  TreeAutomorphism outside(4);
  do {
    outside = random_automorphism(4, rng.next());
  } while (in_m_prime(outside, 1));
  CHECK_THROWS_AS(p_r_root(outside, 1), ContractError);
}

TEST_CASE("homomorphism, kernel and cosets on full enumerations") {
  for (int r = 1; r <= 3; ++r) {
    for (int n = 1; n <= 3; ++n) {
      const auto m_prime = enumerate_m_prime(r, n).elements();
      const int e = e_bound(0, n, r);
      std::map<std::uint64_t, std::size_t> fibers;
      std::size_t bad = 0;
      for (const auto& s : m_prime) {
        const auto ps = p_r_root(s, r);
        ++fibers[ps.value];
        bad += ps.is_one() != in_b_prime(s, r);
        for (const auto& t : m_prime) bad += p_r_root(s * t, r) != ps * p_r_root(t, r);
      }
      CHECK(bad == 0);
      // Every odd residue mod 2^e is hit, with equal fibers.
      CHECK(fibers.size() == (std::size_t{1} << (e - 1)));
      for (const auto& [value, count] : fibers) CHECK(count == m_prime.size() >> (e - 1));
    }
  }
  // n = 4 fibers.
  for (int r = 1; r <= 3; ++r) {
    std::map<std::uint64_t, std::size_t> fibers;
    const auto m_prime = enumerate_m_prime(r, 4);
    for (const auto& s : m_prime.elements()) ++fibers[p_r_root(s, r).value];
    const int e = e_bound(0, 4, r);
    CHECK(fibers.size() == (std::size_t{1} << (e - 1)));
    for (const auto& [value, count] : fibers) CHECK(count == m_prime.order() >> (e - 1));
  }
}

TEST_CASE("homomorphism on sampled pairs at n = 8") {
  const int n = 8;
  for (int r = 1; r <= 3; ++r) {
    const auto gens = m_prime_generators(r, n);
    REQUIRE(gens.size() > static_cast<std::size_t>(r));
    Rng rng(100 + r);
    auto sample = [&] {
      TreeAutomorphism s(n);
      for (int step = 0; step < 12; ++step) s = s * gens[rng.below(gens.size())];
      return s;
    };
    std::size_t bad = 0;
    std::set<std::uint64_t> residues;
    for (int t = 0; t < 10000 / 3 + 1; ++t) {
      const auto s = sample();
      const auto u = sample();
      if (!in_m_prime(s, r) || !in_m_prime(u, r)) {
        ++bad;
        continue;
      }
      const auto su = s * u;
      residues.insert(p_r_root(su, r).value);
      bad += !in_m_prime(su, r) || p_r_root(su, r) != p_r_root(s, r) * p_r_root(u, r);
    }
    CHECK(bad == 0);
    CHECK(residues.size() > 1);
  }
}
