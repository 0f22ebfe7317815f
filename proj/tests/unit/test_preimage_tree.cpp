#include <doctest.h>

#include <algorithm>
#include <bit>
#include <tuple>

#include "arbor/errors.hpp"
#include "arbor/preimage_tree.hpp"
#include "arbor/verify/oracles.hpp"

using namespace arbor;

namespace {

PreimageTree labeled(std::uint64_t p, std::uint64_t c, int r, std::uint64_t x0, int n) {
  return canonical_label(build_preimage_tree(make_pcf(p, c, r), x0, n));
}

}  // namespace

TEST_CASE("PCF parameters") {
  CHECK(find_pcf_c(7, 2) == std::vector<std::uint64_t>{6});
  for (const std::uint64_t p : {3, 5, 7, 11, 101}) CHECK(find_pcf_c(p, 1) == std::vector<std::uint64_t>{0});
  // c f^3(0) = c (c^3 + 2c^2 + c + 1): the roots of the cubic mod 11.
  std::vector<std::uint64_t> cubic;
  for (std::uint64_t c = 1; c < 11; ++c) {
    if ((c * c * c + 2 * c * c + c + 1) % 11 == 0) cubic.push_back(c);
  }
  CHECK(find_pcf_c(11, 3) == cubic);
  CHECK(find_pcf_c(11, 3) == std::vector<std::uint64_t>{8});
  CHECK(find_pcf_c(13, 3).empty());
  CHECK(find_pcf_c(23, 3) == std::vector<std::uint64_t>{14, 15});

  CHECK_THROWS_AS(find_pcf_c(16777259, 2), CapExceeded);
  CHECK_THROWS_AS(find_pcf_c(7, 0), DomainError);
  CHECK_THROWS_AS(find_pcf_c(7, kPcfMaxPeriod + 1), DomainError);
  CHECK_THROWS_AS(find_pcf_c(15, 2), DomainError);

  CHECK_THROWS_AS(make_pcf(7, 0, 2), DomainError);  // period 1, not 2
  CHECK_THROWS_AS(make_pcf(7, 1, 2), DomainError);
  const PcfParameter basilica = make_pcf(7, 6, 2);
  CHECK(forward_orbit(basilica) == std::vector<std::uint64_t>{0, 6});
  CHECK(smallest_x0(basilica) == 1);
  CHECK(smallest_x0(make_pcf(5, 0, 1)) == 1);
}

TEST_CASE("tree construction") {
  const PcfParameter f = make_pcf(5, 4, 2);
  const PreimageTree one = build_preimage_tree(f, 2, 1);
  CHECK(one.value(NodeAddress::parse("a")) == -one.value(NodeAddress::parse("b")));
  CHECK(one.value(NodeAddress::root()) == one.field().from_int(2));

  const PreimageTree tree = build_preimage_tree(f, 2, 3);
  CHECK(oracle::structural_failures(tree) == 0);
  std::size_t checks = 0;
  CHECK(oracle::product_identity_failures(tree, &checks) == 0);
  CHECK(checks > 0);
  CHECK(std::has_single_bit(static_cast<unsigned>(tree.field().k())));
  CHECK_FALSE(tree.labeled());

  // Deterministic in the seed.
  const PreimageTree again = build_preimage_tree(f, 2, 3);
  CHECK(again.values() == tree.values());

  CHECK_THROWS_AS(build_preimage_tree(f, 0, 3), DomainError);
  CHECK_THROWS_AS(build_preimage_tree(f, 4, 3), DomainError);
  CHECK_THROWS_AS(build_preimage_tree(f, 2, 0), DomainError);
  CHECK_THROWS_AS(build_preimage_tree(f, 5, 3), DomainError);  // reduces to 0
}

TEST_CASE("canonical labeling") {
  const PreimageTree tree = labeled(7, 6, 2, 1, 7);
  CHECK(tree.labeled());
  CHECK(oracle::structural_failures(tree) == 0);
  const auto& zeta = tree.tower();
  REQUIRE(static_cast<int>(zeta.size()) == tree.tower_exponent());

  // Level 1: [a]/[b] = -1.
  CHECK(tree.value(NodeAddress::parse("a")) == -tree.value(NodeAddress::parse("b")));
  // Root, i = 1: ratio equals zeta_4.
  const auto [A, B] = perprod_halves(tree, NodeAddress::root(), 1);
  CHECK(A == zeta[1] * B);

  const PerprodReport report = verify_perprod(tree);
  CHECK(report.ok());
  CHECK(report.checks > 0);
  std::size_t checks = 0;
  CHECK(oracle::perprod_failures(tree, &checks) == 0);
  CHECK(checks == report.checks);
  CHECK(oracle::gamma_chain_failures(tree) == 0);

  // Depth at most r: nothing to check.
  const PreimageTree shallow = labeled(7, 6, 2, 1, 2);
  CHECK(verify_perprod(shallow).checks == 0);

  // Swapping labels breaks the identity.
  PreimageTree top = tree;
  top.swap_children(NodeAddress::root());
  CHECK_FALSE(verify_perprod(top).ok());
  PreimageTree designated = tree;
  designated.swap_children(NodeAddress::parse("ba"));
  CHECK_FALSE(verify_perprod(designated).ok());
  CHECK(oracle::structural_failures(designated) == 0);

  // Labeling is idempotent.
  CHECK(canonical_label(tree).values() == tree.values());
}

TEST_CASE("Frobenius on the tree") {
  for (const auto& [p, c, r, x0, n] : std::vector<std::tuple<std::uint64_t, std::uint64_t, int, std::uint64_t, int>>{
           {7, 6, 2, 1, 6}, {5, 0, 1, 2, 6}, {11, 8, 3, 1, 7}, {3, 2, 2, 1, 5}}) {
    const PreimageTree tree = labeled(p, c, r, x0, n);
    const TreeAutomorphism sigma = frobenius_automorphism(tree);
    CHECK(in_m_prime(sigma, r));
    CHECK(p_r_root(sigma, r).congruent_to(static_cast<std::int64_t>(p)));
    const int k = tree.field().k();
    CHECK(power(sigma, static_cast<std::uint64_t>(k)).is_identity());
    CHECK(verify_pembed(tree, sigma));
    const PembedReport report = pembed_report(tree, sigma);
    CHECK(report.ok());
    CHECK(report.nodes_checked == sigma.node_count());
    // A wrong automorphism is rejected.
    TreeAutomorphism wrong = sigma;
    wrong.flip_parity(NodeAddress::root());
    CHECK_FALSE(verify_pembed(tree, wrong));
  }

  SUBCASE("published configuration") {
    const PreimageTree tree = labeled(5, 4, 2, 2, 5);
    const TreeAutomorphism sigma = frobenius_automorphism(tree);
    const PembedReport report = pembed_report(tree, sigma);
    CHECK(report.ok());
    CHECK(report.root.exponent == 3);
    CHECK(report.root.value == 5);
  }

  SUBCASE("fully rational tree") {
    // Search for a configuration whose tree lives in F_p itself.
    bool found = false;
    for (const std::uint64_t p : {17, 41, 73, 89, 97, 113, 193, 241, 257}) {
      const PcfParameter f = make_pcf(p, 0, 1);
      for (std::uint64_t x0 = 1; x0 < p && !found; ++x0) {
        const PreimageTree tree = canonical_label(build_preimage_tree(f, x0, 3));
        if (tree.field().k() != 1) continue;
        found = true;
        const TreeAutomorphism sigma = frobenius_automorphism(tree);
        CHECK(sigma.is_identity());
        CHECK(verify_pembed(tree, sigma));
      }
      if (found) break;
    }
    CHECK(found);
  }
}

TEST_CASE("unlabeled trees") {
  const PreimageTree raw = build_preimage_tree(make_pcf(7, 6, 2), 1, 5);
  CHECK(oracle::gamma_chain_failures(raw) == 0);
}
