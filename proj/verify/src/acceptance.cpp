#include "arbor/verify/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <set>

#include "arbor/errors.hpp"
#include "arbor/parity.hpp"
#include "arbor/preimage_tree.hpp"
#include "arbor/random.hpp"
#include "arbor/square_class.hpp"
#include "arbor/verify/oracles.hpp"

namespace arbor::verify {

namespace {

using Clock = std::chrono::steady_clock;

// Counts a check and records a note for the first few failures.
class Tally {
 public:
  explicit Tally(CriterionResult& result) : result_(result) {}

  void check(bool ok, const std::function<std::string()>& describe) {
    ++result_.checks;
    if (ok) return;
    ++result_.failures;
    if (result_.failures <= kMaxNotes) result_.notes.push_back("FAIL " + describe());
  }
  void note(std::string text) { result_.notes.push_back(std::move(text)); }

 private:
  static constexpr std::size_t kMaxNotes = 8;
  CriterionResult& result_;
};

CriterionResult timed(int id, std::string title, double budget,
                      const std::function<void(CriterionResult&)>& body) {
  CriterionResult result;
  result.id = id;
  result.title = std::move(title);
  result.budget_seconds = budget;
  const auto start = Clock::now();
  try {
    body(result);
  } catch (const std::exception& e) {
    ++result.failures;
    result.notes.push_back(std::string("FAIL exception: ") + e.what());
  }
  result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

std::vector<TreeAutomorphism> all_automorphisms(int n) {
  std::vector<TreeAutomorphism> out;
  const std::uint64_t count = std::uint64_t{1} << ((1u << n) - 1);
  for (std::uint64_t mask = 0; mask < count; ++mask) out.push_back(TreeAutomorphism::from_words(n, {mask}));
  return out;
}

std::vector<std::uint32_t> compose_perm(const std::vector<std::uint32_t>& outer,
                                        const std::vector<std::uint32_t>& inner) {
  std::vector<std::uint32_t> out(inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) out[i] = outer[inner[i]];
  return out;
}

std::string hex(const TreeAutomorphism& s) { return s.to_hex(); }

// Subgroup generators of `group`, chosen greedily; closure(result) == group.
std::vector<TreeAutomorphism> greedy_generators(const FiniteGroup& group) {
  std::vector<TreeAutomorphism> gens;
  FiniteGroup span = closure(GeneratorSet{0, group.depth(), {}}, 1);
  for (std::size_t i = 0; i < group.order() && span.order() < group.order(); ++i) {
    const TreeAutomorphism g = group.element(i);
    if (span.contains(g)) continue;
    gens.push_back(g);
    span = closure(GeneratorSet{0, group.depth(), gens}, group.order());
  }
  return gens;
}

}  // namespace

Profile parse_profile(std::string_view name) {
  if (name == "quick") return Profile::quick;
  if (name == "full") return Profile::full;
  throw DomainError("unknown profile '" + std::string(name) + "' (expected quick or full)");
}

std::string_view profile_name(Profile profile) { return profile == Profile::quick ? "quick" : "full"; }

GeneratorSet acceptance_generators(int r, int n, bool tamper) {
  GeneratorSet gens = GeneratorSet::pink(r, n);
  if (tamper && n >= 2) {
    // a^(n-1) carries no parity of alpha_1 for n >= 2.
    gens.elements.front().flip_parity(NodeAddress{n - 1, 0});
  }
  return gens;
}

// 1 ---------------------------------------------------------------------------

CriterionResult criterion_group_algebra(const AcceptanceOptions& options) {
  return timed(1, "group law and action compatibility", 5.0, [&](CriterionResult& result) {
    Tally tally(result);
    for (int n = 1; n <= 3; ++n) {
      const auto elements = all_automorphisms(n);
      const TreeAutomorphism id(n);
      std::vector<std::vector<std::uint32_t>> perms;
      for (const auto& s : elements) perms.push_back(oracle::leaf_permutation(s));
      std::vector<TreeAutomorphism> inverses;
      for (const auto& s : elements) inverses.push_back(invert(s));
      for (std::size_t i = 0; i < elements.size(); ++i) {
        const auto& s = elements[i];
        tally.check(s * id == s && id * s == s, [&] { return "identity law at " + hex(s); });
        tally.check(s * inverses[i] == id && inverses[i] * s == id, [&] { return "inverse law at " + hex(s); });
        tally.check(oracle::leaf_permutation(inverses[i]) ==
                        [&] {
                          std::vector<std::uint32_t> inv(perms[i].size());
                          for (std::size_t l = 0; l < inv.size(); ++l) inv[perms[i][l]] = static_cast<std::uint32_t>(l);
                          return inv;
                        }(),
                    [&] { return "inverse permutation at " + hex(s); });
        tally.check(TreeAutomorphism::from_hex(s.to_hex()) == s, [&] { return "hex round trip at " + hex(s); });
      }
      for (std::size_t i = 0; i < elements.size(); ++i) {
        for (std::size_t j = 0; j < elements.size(); ++j) {
          const TreeAutomorphism st = elements[i] * elements[j];
          bool action = oracle::leaf_permutation(st) == compose_perm(perms[i], perms[j]);
          for (int level = 0; level <= n && action; ++level) {
            for (std::uint32_t path = 0; path < (1u << level); ++path) {
              const NodeAddress x{level, path};
              if (st.apply(x) != elements[i].apply(elements[j].apply(x))) action = false;
            }
          }
          tally.check(action, [&] { return "action of " + hex(elements[i]) + " * " + hex(elements[j]); });
          if (n == 3) continue;  // associativity at n = 3 runs below over all triples
          for (const auto& rho : elements) {
            tally.check(st * rho == elements[i] * (elements[j] * rho), [&] { return std::string("associativity"); });
          }
        }
      }
      if (n == 3) {
        std::size_t bad = 0;
        for (const auto& a : elements) {
          for (const auto& b : elements) {
            const TreeAutomorphism ab = a * b;
            for (const auto& c : elements) {
              if (ab * c != a * (b * c)) ++bad;
            }
          }
        }
        result.checks += elements.size() * elements.size() * elements.size();
        result.failures += bad;
        if (bad) tally.note("FAIL associativity at n = 3: " + std::to_string(bad) + " triples");
      }
    }
    Rng rng(options.seed);
    const int n = 8;
    for (int t = 0; t < 10'000; ++t) {
      const auto a = random_automorphism(n, rng.next());
      const auto b = random_automorphism(n, rng.next());
      const auto c = random_automorphism(n, rng.next());
      const TreeAutomorphism abc = (a * b) * c;
      tally.check(abc == a * (b * c), [&] { return "associativity at n = 8, triple " + std::to_string(t); });
      if (t % 10 == 0) {
        const auto pa = oracle::leaf_permutation(a);
        const auto pb = oracle::leaf_permutation(b);
        const auto pc = oracle::leaf_permutation(c);
        tally.check(oracle::leaf_permutation(abc) == compose_perm(pa, compose_perm(pb, pc)),
                    [&] { return "leaf action at n = 8, triple " + std::to_string(t); });
      } else {
        const NodeAddress leaf{n, static_cast<std::uint32_t>(rng.below(1u << n))};
        tally.check(abc.apply(leaf) == a.apply(b.apply(c.apply(leaf))),
                    [&] { return "node action at n = 8, triple " + std::to_string(t); });
      }
      tally.check(a * invert(a) == TreeAutomorphism(n), [&] { return "inverse at n = 8"; });
    }
  });
}

// 2 ---------------------------------------------------------------------------

CriterionResult criterion_homomorphism(const AcceptanceOptions& options) {
  return timed(2, "P_r multiplicative on M' with unit fiber B'", 30.0, [&](CriterionResult& result) {
    Tally tally(result);
    Rng rng(options.seed ^ 2);
    constexpr std::uint64_t kAllPairsLimit = std::uint64_t{1} << 22;
    constexpr int kSampledPairs = 200'000;
    for (int r = 1; r <= 3; ++r) {
      for (int n = 1; n <= 4; ++n) {
        const FiniteGroup m_prime = enumerate_m_prime(r, n);
        const FiniteGroup b_prime = enumerate_b_prime(r, n);
        const auto elements = m_prime.elements();
        std::vector<TruncatedResidue> residues;
        std::vector<std::uint64_t> fiber;
        for (const auto& s : elements) {
          residues.push_back(p_r_root(s, r));
          if (residues.back().is_one()) fiber.push_back(s.words()[0]);
        }
        const std::string where = "r=" + std::to_string(r) + " n=" + std::to_string(n);
        tally.check(FiniteGroup(n, fiber) == b_prime, [&] { return "unit fiber differs from B' at " + where; });

        auto check_pair = [&](std::size_t i, const TreeAutomorphism& t, const TruncatedResidue& pt) {
          const TreeAutomorphism st = elements[i] * t;
          const bool inside = m_prime.contains(st);
          tally.check(inside && p_r_root(st, r) == residues[i] * pt,
                      [&] { return "P not multiplicative at " + where + ": " + hex(elements[i]) + " * " + hex(t); });
        };
        const std::uint64_t size = m_prime.order();
        if (size * size <= kAllPairsLimit) {
          for (std::size_t i = 0; i < elements.size(); ++i) {
            for (std::size_t j = 0; j < elements.size(); ++j) check_pair(i, elements[j], residues[j]);
          }
        } else {
          // Multiplicativity against a generating set, for every left factor,
          // implies it for all pairs; random pairs add a direct sample.
          const auto gens = greedy_generators(m_prime);
          tally.check(closure(GeneratorSet{0, n, gens}, size) == m_prime,
                      [&] { return "generators do not span M' at " + where; });
          for (std::size_t i = 0; i < elements.size(); ++i) {
            for (const auto& g : gens) check_pair(i, g, p_r_root(g, r));
          }
          for (int t = 0; t < kSampledPairs; ++t) {
            const std::size_t j = rng.below(size);
            check_pair(rng.below(size), elements[j], residues[j]);
          }
          tally.note(where + ": " + std::to_string(gens.size()) + " generators, all left factors, " +
                     std::to_string(kSampledPairs) + " sampled pairs");
        }
      }
    }
  });
}

// 3 ---------------------------------------------------------------------------

CriterionResult criterion_pink_closure(const AcceptanceOptions& options) {
  return timed(3, "closure of Pink generators equals B'", 600.0, [&](CriterionResult& result) {
    Tally tally(result);
    // Orders 2^(2^n - 1 - sum_m 2^(n-1-m) floor(m/r)), frozen.
    struct Case {
      int r;
      int n;
      std::uint64_t order;
    };
    const Case cases[] = {{1, 3, 8}, {1, 4, 16}, {2, 3, 64}, {2, 4, 4096}, {3, 4, 16384}};
    for (const auto& c : cases) {
      const std::string where = "(r,n)=(" + std::to_string(c.r) + "," + std::to_string(c.n) + ")";
      const FiniteGroup g = closure(acceptance_generators(c.r, c.n, options.tamper_generators), 1u << 20);
      const FiniteGroup b = enumerate_b_prime(c.r, c.n);
      tally.check(g == b, [&] { return "closure differs from B' at " + where; });
      tally.check(g.order() == c.order && (std::uint64_t{1} << log2_order_pink(c.r, c.n)) == c.order,
                  [&] { return "order " + std::to_string(g.order()) + " at " + where; });
      tally.note(where + ": |closure| = " + std::to_string(g.order()) + ", |B'| = " + std::to_string(b.order()));
    }
    if (options.profile == Profile::full) {
      const FiniteGroup g = closure(acceptance_generators(2, 5, options.tamper_generators), std::uint64_t{1} << 24);
      tally.check(g.order() == (std::uint64_t{1} << 23), [&] { return "order " + std::to_string(g.order()) + " at (2,5)"; });
      tally.note("(r,n)=(2,5): |closure| = " + std::to_string(g.order()));
    } else {
      tally.note("(r,n)=(2,5) skipped in the quick profile");
    }
  });
}

// 4 ---------------------------------------------------------------------------

CriterionResult criterion_generator_membership(const AcceptanceOptions& options) {
  return timed(4, "Pink generators lie in B' at n = 12", 5.0, [&](CriterionResult& result) {
    Tally tally(result);
    const int n = 12;
    for (int r = 1; r <= 6; ++r) {
      const auto gens = acceptance_generators(r, n, options.tamper_generators);
      for (int i = 1; i <= r; ++i) {
        const auto& alpha = gens.elements[i - 1];
        const std::string where = "alpha_" + std::to_string(i) + " r=" + std::to_string(r);
        tally.check(in_b_prime(alpha, r), [&] { return where + " not in B'"; });
        tally.check(oracle::in_b_prime(alpha, r), [&] { return where + " rejected by the definition oracle"; });
      }
    }
  });
}

// 5 ---------------------------------------------------------------------------

CriterionResult criterion_index(const AcceptanceOptions& options) {
  return timed(5, "|M'| / |B'| = 2^(e(0,n)-1)", 60.0, [&](CriterionResult& result) {
    Tally tally(result);
    Rng rng(options.seed ^ 5);
    for (int r = 1; r <= 3; ++r) {
      for (int n = 1; n <= 4; ++n) {
        const FiniteGroup m_prime = enumerate_m_prime(r, n);
        const FiniteGroup b_prime = enumerate_b_prime(r, n);
        const std::uint64_t index = std::uint64_t{1} << (e_bound(0, n, r) - 1);
        const std::string where = "r=" + std::to_string(r) + " n=" + std::to_string(n);
        tally.check(m_prime.order() == index * b_prime.order(), [&] {
          return where + ": |M'| = " + std::to_string(m_prime.order()) + ", |B'| = " + std::to_string(b_prime.order());
        });
        // Membership against the definition oracle: every element up to n = 3, a sample at n = 4.
        auto agree = [&](const TreeAutomorphism& s) {
          tally.check(m_prime.contains(s) == oracle::in_m_prime(s, r) && b_prime.contains(s) == oracle::in_b_prime(s, r),
                      [&] { return where + ": membership disagrees at " + hex(s); });
        };
        if (n <= 3) {
          for (const auto& s : all_automorphisms(n)) agree(s);
        } else {
          for (int t = 0; t < 2000; ++t) agree(random_automorphism(n, rng.next()));
        }
      }
    }
  });
}

// 6 ---------------------------------------------------------------------------

std::vector<FrobeniusConfig> frobenius_sweep(Profile profile, std::uint64_t seed) {
  struct Shape {
    std::uint64_t p;
    int r;
    int n;
  };
  static const Shape quick[] = {
      {3, 1, 5},  {3, 2, 6},  {5, 1, 6},  {5, 2, 5},  {5, 3, 7},  {7, 1, 7},  {7, 2, 7},
      {7, 3, 6},  {11, 1, 5}, {11, 2, 6}, {11, 3, 7}, {13, 1, 6}, {13, 2, 7}, {17, 2, 5},
      {17, 3, 6}, {19, 1, 7}, {19, 3, 5}, {23, 2, 6}, {23, 3, 7}, {37, 3, 6},
  };
  static const Shape full[] = {
      {3, 1, 7},  {3, 2, 8},  {5, 1, 8},  {5, 2, 9},  {5, 3, 9},  {7, 1, 9},  {7, 2, 9},  {7, 3, 8},
      {11, 1, 8}, {11, 2, 8}, {11, 3, 9}, {13, 1, 8}, {13, 2, 9}, {17, 2, 8}, {17, 3, 9}, {19, 1, 9},
      {19, 3, 8}, {23, 2, 8}, {23, 3, 9}, {37, 3, 9}, {41, 2, 7}, {43, 3, 9}, {3, 2, 4},  {29, 1, 6},
  };
  std::vector<FrobeniusConfig> out;
  Rng rng(seed ^ 6);
  auto add = [&](const Shape& s) {
    const auto c = find_pcf_c(s.p, s.r).front();
    const PcfParameter f{s.p, c, s.r};
    const auto orbit = forward_orbit(f);
    std::uint64_t x0;
    do {
      x0 = rng.below(s.p);
    } while (std::find(orbit.begin(), orbit.end(), x0) != orbit.end());
    out.push_back({s.p, c, s.r, x0, s.n});
  };
  if (profile == Profile::quick) {
    for (const auto& s : quick) add(s);
  } else {
    for (const auto& s : full) add(s);
  }
  return out;
}

CriterionResult criterion_frobenius(const AcceptanceOptions& options) {
  return timed(6, "Frobenius lies in M' with P = p; tree identities", 120.0, [&](CriterionResult& result) {
    Tally tally(result);
    for (const auto& cfg : frobenius_sweep(options.profile, options.seed)) {
      const std::string where = "p=" + std::to_string(cfg.p) + " c=" + std::to_string(cfg.c) +
                                " r=" + std::to_string(cfg.r) + " x0=" + std::to_string(cfg.x0) +
                                " n=" + std::to_string(cfg.n);
      const PcfParameter f = make_pcf(cfg.p, cfg.c, cfg.r);
      const PreimageTree raw = build_preimage_tree(f, cfg.x0, cfg.n, options.seed);
      std::size_t checks = 0;

      tally.check(oracle::structural_failures(raw) == 0, [&] { return where + ": structural invariants"; });
      const std::size_t product_failures = oracle::product_identity_failures(raw, &checks);
      result.checks += checks;
      tally.check(product_failures == 0, [&] { return where + ": product identity, " + std::to_string(product_failures) + " failures"; });
      const std::size_t raw_gamma = oracle::gamma_chain_failures(raw, &checks);
      result.checks += checks;
      tally.check(raw_gamma == 0, [&] { return where + ": gamma chain on the raw tree"; });

      const PreimageTree tree = canonical_label(raw);
      tally.check(oracle::structural_failures(tree) == 0, [&] { return where + ": structural invariants after labeling"; });
      const std::size_t gamma = oracle::gamma_chain_failures(tree, &checks);
      result.checks += checks;
      tally.check(gamma == 0, [&] { return where + ": gamma chain on the labeled tree"; });
      tally.check(verify_perprod(tree).ok(), [&] { return where + ": verify_perprod"; });
      const std::size_t perprod = oracle::perprod_failures(tree, &checks);
      result.checks += checks;
      tally.check(perprod == 0, [&] { return where + ": product ratios, " + std::to_string(perprod) + " failures"; });

      const TreeAutomorphism sigma = frobenius_automorphism(tree);
      tally.check(in_m_prime(sigma, cfg.r), [&] { return where + ": Frobenius not in M'"; });
      tally.check(oracle::in_m_prime(sigma, cfg.r), [&] { return where + ": Frobenius rejected by the pairwise oracle"; });
      bool residues = true;
      for (std::size_t id = 0; id < sigma.node_count(); ++id) {
        const NodeAddress x = NodeAddress::from_flat(id);
        if (!p_r_trunc(sigma, x, cfg.r).congruent_to(static_cast<std::int64_t>(cfg.p))) residues = false;
      }
      tally.check(residues, [&] { return where + ": P_r(sigma, x) != p mod 2^e somewhere"; });
      tally.check(verify_pembed(tree, sigma), [&] { return where + ": verify_pembed"; });
      const int k = tree.field().k();
      const bool order_k = power(sigma, static_cast<std::uint64_t>(k)).is_identity() &&
                           (k == 1 || !power(sigma, static_cast<std::uint64_t>(k / 2)).is_identity());
      tally.check(order_k, [&] { return where + ": Frobenius order differs from k = " + std::to_string(k); });
      tally.note(where + ": k=" + std::to_string(k) + " swaps=" + std::to_string(tree.swaps()));
    }
  });
}

// 7 ---------------------------------------------------------------------------

CriterionResult criterion_square_classes(const AcceptanceOptions& options) {
  return timed(7, "square-class independence over Q", 30.0, [&](CriterionResult& result) {
    Tally tally(result);
    const auto holds = check_condition_one(Rational(-1), Rational(5), 2);
    tally.check(holds.condition && holds.rank == 4, [&] { return std::string("(c,x0,r)=(-1,5,2) should satisfy the condition"); });
    const auto fails = check_condition_one(Rational(-1), Rational(3), 2);
    const bool certificate = fails.dependencies.size() == 1 && fails.dependencies[0] == std::vector<int>{2} &&
                             fails.labels[2] == "D1";
    tally.check(!fails.condition && certificate, [&] { return std::string("(c,x0,r)=(-1,3,2) should fail with D1 a square"); });

    Rng rng(options.seed ^ 7);
    const std::int64_t small_primes[] = {2, 3, 5, 7, 11, 13};
    for (int t = 0; t < 1000; ++t) {
      const int n = static_cast<int>(rng.between(1, 8));
      std::vector<Rational> values;
      std::string where;
      if (t % 2 == 0) {
        const Rational c = rng.coin() ? Rational(0) : Rational(-1);
        Rational x0;
        do {
          x0 = Rational(rng.between(-60, 60), rng.between(1, 12));
        } while (x0 == 0 || x0 == c);
        values = disc_sequence(c, x0, n);
        where = "c=" + to_string(c) + " x0=" + to_string(x0) + " n=" + std::to_string(n);
        const bool rank_independent = square_class_independence(values).independent;
        tally.check(check_aut_tn(c, x0, n).condition == rank_independent, [&] { return where + ": check_aut_tn"; });
        if (n >= 2) {
          const bool shorter = square_class_independence(std::span(values).first(n - 1)).independent;
          tally.check(shorter || !rank_independent, [&] { return where + ": independence not monotone"; });
        }
      } else {
        for (int j = 0; j < n; ++j) {
          BigInt num = rng.coin() ? -1 : 1;
          BigInt den = 1;
          for (const auto p : small_primes) {
            for (auto e = rng.between(0, 2); e > 0; --e) num *= p;
            if (rng.below(4) == 0) den *= p;
          }
          values.emplace_back(num, den);
        }
        where = "random product list, n=" + std::to_string(n);
      }
      tally.check(square_class_independence(values).independent == !oracle::subset_dependent(values),
                  [&] { return where + ": rank method and subset oracle disagree"; });
    }
  });
}

// 8 ---------------------------------------------------------------------------

CriterionResult criterion_negative_controls(const AcceptanceOptions& options) {
  return timed(8, "negative controls are rejected", 0.0, [&](CriterionResult& result) {
    Tally tally(result);
    const FrobeniusConfig configs[] = {{7, 6, 2, 2, 6}, {5, 0, 1, 3, 5}, {11, 8, 3, 1, 7}};
    for (const auto& cfg : configs) {
      const std::string where = "p=" + std::to_string(cfg.p) + " r=" + std::to_string(cfg.r);
      const PreimageTree tree =
          canonical_label(build_preimage_tree(make_pcf(cfg.p, cfg.c, cfg.r), cfg.x0, cfg.n, options.seed));
      tally.check(verify_perprod(tree).ok(), [&] { return where + ": labeled tree should pass before mutation"; });
      // The designated pair for (root, i = 1) sits below b a^(r-1).
      PreimageTree designated = tree;
      designated.swap_children(NodeAddress{cfg.r, 1});
      tally.check(!verify_perprod(designated).ok() && oracle::perprod_failures(designated) > 0,
                  [&] { return where + ": swapped designated pair went unnoticed"; });
      PreimageTree top = tree;
      top.swap_children(NodeAddress::root());
      tally.check(!verify_perprod(top).ok() && oracle::perprod_failures(top) > 0,
                  [&] { return where + ": swapped top-level pair went unnoticed"; });
    }
    Rng rng(options.seed ^ 8);
    for (int r = 1; r <= 3; ++r) {
      const FiniteGroup b_prime = enumerate_b_prime(r, 4);
      TreeAutomorphism candidate(4);
      int draws = 0;
      do {
        candidate = random_automorphism(4, rng.next());
        ++draws;
      } while (b_prime.contains(candidate) && draws < 10'000);
      tally.check(!b_prime.contains(candidate) && !in_b_prime(candidate, r) && !oracle::in_b_prime(candidate, r),
                  [&] { return "random non-member accepted for r=" + std::to_string(r); });
      tally.note("r=" + std::to_string(r) + ": non-member " + hex(candidate) + " after " + std::to_string(draws) + " draws");
    }
    const auto tampered = acceptance_generators(2, 4, true);
    tally.check(!in_b_prime(tampered.elements.front(), 2), [&] { return std::string("tampered alpha_1 accepted"); });
  });
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  return {criterion_group_algebra(options),        criterion_homomorphism(options),
          criterion_pink_closure(options),         criterion_generator_membership(options),
          criterion_index(options),                criterion_frobenius(options),
          criterion_square_classes(options),       criterion_negative_controls(options)};
}

}  // namespace arbor::verify
