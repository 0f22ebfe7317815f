#include "arbor/preimage_tree.hpp"

#include <algorithm>
#include <string>

#include "arbor/errors.hpp"

namespace arbor {

namespace {

__extension__ typedef unsigned __int128 u128;

std::uint64_t iterate_f(std::uint64_t z, std::uint64_t c, std::uint64_t p) {
  const auto sq = static_cast<std::uint64_t>(static_cast<u128>(z) * z % p);
  return (sq + c) % p;
}

void check_prime(std::uint64_t p) {
  if (p % 2 == 0 || !is_prime_u64(p)) throw DomainError(std::to_string(p) + " is not an odd prime");
  if (p >= kMaxCharacteristic) throw DomainError("characteristic exceeds 2^40");
}

// Exact period of 0 under z^2 + c, or 0 if it is not periodic within `limit` steps.
int period_of_zero(std::uint64_t p, std::uint64_t c, int limit) {
  std::uint64_t z = 0;
  for (int s = 1; s <= limit; ++s) {
    z = iterate_f(z, c, p);
    if (z == 0) return s;
  }
  return 0;
}

}  // namespace

PcfParameter make_pcf(std::uint64_t p, std::uint64_t c, int r) {
  check_prime(p);
  if (r < 1) throw DomainError("period must be at least 1");
  c %= p;
  if (period_of_zero(p, c, r) != r) {
    throw DomainError("0 does not have exact period " + std::to_string(r) + " under z^2 + " +
                      std::to_string(c) + " mod " + std::to_string(p));
  }
  return {p, c, r};
}

std::vector<std::uint64_t> find_pcf_c(std::uint64_t p, int r) {
  if (r < 1 || r > kPcfMaxPeriod) {
    throw DomainError("period must lie in [1, " + std::to_string(kPcfMaxPeriod) + "]");
  }
  if (p > kPcfScanBound) throw CapExceeded("find_pcf_c scans primes up to 2^24 only", 0);
  check_prime(p);
  std::vector<std::uint64_t> out;
  for (std::uint64_t c = 0; c < p; ++c) {
    if (period_of_zero(p, c, r) == r) out.push_back(c);
  }
  return out;
}

std::vector<std::uint64_t> forward_orbit(const PcfParameter& f) {
  std::vector<std::uint64_t> orbit{0};
  std::uint64_t z = 0;
  for (int s = 1; s < f.r; ++s) {
    z = iterate_f(z, f.c, f.p);
    orbit.push_back(z);
  }
  return orbit;
}

std::uint64_t smallest_x0(const PcfParameter& f) {
  const auto orbit = forward_orbit(f);
  for (std::uint64_t x = 0; x < f.p; ++x) {
    if (std::find(orbit.begin(), orbit.end(), x) == orbit.end()) return x;
  }
  throw DomainError("every element of F_p lies in the forward orbit of 0");
}

void PreimageTree::swap_children(NodeAddress y) {
  if (y.level >= depth_) throw DomainError("swap_children: node has no children");
  const std::uint32_t b_bit = std::uint32_t{1} << y.level;
  for (int level = y.level + 1; level <= depth_; ++level) {
    const int free_bits = level - y.level - 1;
    for (std::uint32_t u = 0; u < (std::uint32_t{1} << free_bits); ++u) {
      const std::uint32_t tail = u << (y.level + 1);
      const NodeAddress xa{level, y.path | tail};
      const NodeAddress xb{level, y.path | b_bit | tail};
      std::swap(values_[xa.flat_id()], values_[xb.flat_id()]);
    }
  }
}

PreimageTree build_preimage_tree(const PcfParameter& f, std::uint64_t x0, int n, std::uint64_t seed) {
  check_depth(n);
  make_pcf(f.p, f.c, f.r);
  x0 %= f.p;
  const auto orbit = forward_orbit(f);
  if (std::find(orbit.begin(), orbit.end(), x0) != orbit.end()) {
    throw DomainError("x0 = " + std::to_string(x0) + " lies in the forward orbit of 0");
  }

  PreimageTree tree;
  tree.f_ = f;
  tree.x0_ = x0;
  tree.depth_ = n;
  const std::size_t total = (std::size_t{1} << (n + 1)) - 1;

  for (int k = 1;; k *= 2) {
    if (k > kMaxExtensionDegree) {
      throw CapExceeded("preimage tree needs an extension of degree above " +
                            std::to_string(kMaxExtensionDegree),
                        static_cast<std::uint64_t>(k / 2));
    }
    auto ctx = fq_make(f.p, k, seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(k));
    const FqElement c = ctx->from_int(static_cast<std::int64_t>(f.c));
    std::vector<FqElement> values(total);
    values[0] = ctx->from_int(static_cast<std::int64_t>(x0));
    bool complete = true;
    for (std::size_t id = 0; complete && id < (total - 1) / 2; ++id) {
      const NodeAddress x = NodeAddress::from_flat(id);
      const auto root = sqrt_fq(*ctx, values[id] - c);
      if (!root) {
        complete = false;
        break;
      }
      values[x.child(Symbol::a).flat_id()] = *root;
      values[x.child(Symbol::b).flat_id()] = -*root;
    }
    if (!complete) {
      ++tree.restarts_;
      continue;
    }
    tree.ctx_ = std::move(ctx);
    tree.values_ = std::move(values);
    try {
      tree.tower_ = root_of_unity_tower(*tree.ctx_, tree.tower_exponent());
    } catch (const UnavailableError&) {
      tree.tower_.clear();
    }
    return tree;
  }
}

std::pair<FqElement, FqElement> perprod_halves(const PreimageTree& tree, NodeAddress x, int i) {
  const int r = tree.parameter().r;
  if (i < 1 || x.level + r * i + 1 > tree.depth()) throw DomainError("perprod_halves: (x, i) not admissible");
  const NodeAddress xa = x.child(Symbol::a);
  const NodeAddress xb = x.child(Symbol::b);
  FqElement a_prod = tree.field().one();
  FqElement b_prod = a_prod;
  for (const NodeAddress w : w_words(r, i)) {
    a_prod = a_prod * tree.value(xa.concat(w).child(Symbol::a));
    b_prod = b_prod * tree.value(xb.concat(w).child(Symbol::a));
  }
  return {std::move(a_prod), std::move(b_prod)};
}

PreimageTree canonical_label(PreimageTree tree) {
  const int n = tree.depth();
  const int r = tree.parameter().r;
  if (n > r && tree.tower_.empty()) {
    throw IntegrityError("no 2^" + std::to_string(tree.tower_exponent()) +
                         "-th roots of unity in the tree field");
  }
  for (int level = r + 1; level <= n; ++level) {
    for (int i = (level - 1) / r; i >= 1; --i) {
      const FqElement& zeta = tree.tower_[i];
      const int base = level - (r * i + 1);
      for (std::uint32_t path = 0; path < (std::uint32_t{1} << base); ++path) {
        const NodeAddress x{base, path};
        const auto [a_prod, b_prod] = perprod_halves(tree, x, i);
        const FqElement target = zeta * b_prod;
        if (a_prod == target) continue;
        if (a_prod != -target) {
          throw IntegrityError("ratio at node " + x.to_string() + ", i = " + std::to_string(i) +
                               " is not +-zeta_" + std::to_string(1 << (i + 1)));
        }
        // y = x b a^(ri-1); its children carry symbol a at the (ri+1)-th position.
        const NodeAddress y{base + r * i, path | (std::uint32_t{1} << base)};
        tree.swap_children(y);
        ++tree.swaps_;
      }
    }
  }
  tree.labeled_ = true;
  return tree;
}

PerprodReport verify_perprod(const PreimageTree& tree) {
  PerprodReport report;
  const int n = tree.depth();
  const int r = tree.parameter().r;
  for (int level = 0; level + r + 1 <= n; ++level) {
    const int max_i = (n - level - 1) / r;
    for (std::uint32_t path = 0; path < (std::uint32_t{1} << level); ++path) {
      const NodeAddress x{level, path};
      for (int i = 1; i <= max_i; ++i) {
        ++report.checks;
        if (static_cast<std::size_t>(i) >= tree.tower().size()) {
          report.failures.push_back({x, i});
          continue;
        }
        const auto [a_prod, b_prod] = perprod_halves(tree, x, i);
        if (a_prod != tree.tower()[i] * b_prod) report.failures.push_back({x, i});
      }
    }
  }
  return report;
}

TreeAutomorphism frobenius_automorphism(const PreimageTree& tree) {
  const int n = tree.depth();
  const FqContext& ctx = tree.field();
  TreeAutomorphism sigma(n);
  std::vector<std::uint32_t> image{0};
  for (int level = 0; level < n; ++level) {
    std::vector<std::uint32_t> next(std::size_t{1} << (level + 1));
    for (std::uint32_t path = 0; path < image.size(); ++path) {
      const NodeAddress x{level, path};
      const NodeAddress sx{level, image[path]};
      const FqElement target = ctx.frobenius(tree.value(x.child(Symbol::a)));
      bool swapped;
      if (target == tree.value(sx.child(Symbol::a))) {
        swapped = false;
      } else if (target == tree.value(sx.child(Symbol::b))) {
        swapped = true;
      } else {
        throw IntegrityError("Frobenius image of " + x.child(Symbol::a).to_string() +
                             " is not a child of " + sx.to_string());
      }
      sigma.set_parity(x, swapped);
      const std::uint32_t b_bit = std::uint32_t{1} << level;
      next[path] = image[path] | (swapped ? b_bit : 0);
      next[path | b_bit] = image[path] | (swapped ? 0 : b_bit);
    }
    image = std::move(next);
  }
  return sigma;
}

PembedReport pembed_report(const PreimageTree& tree, const TreeAutomorphism& sigma) {
  if (sigma.depth() != tree.depth()) throw DomainError("pembed: depth mismatch");
  const std::uint64_t p = tree.parameter().p;
  const ParityProfile profile(sigma, tree.parameter().r);
  PembedReport report;
  for (std::size_t id = 0; id < sigma.node_count(); ++id) {
    ++report.nodes_checked;
    if (!profile.residues()[id].congruent_to(static_cast<std::int64_t>(p))) report.residues_match = false;
  }
  report.consistent = profile.consistent();
  report.root = profile.p(NodeAddress::root());

  const auto& tower = tree.tower();
  if (tower.size() != static_cast<std::size_t>(tree.tower_exponent())) {
    report.tower_action = false;
  } else {
    const FqContext& ctx = tree.field();
    for (std::size_t j = 1; j <= tower.size(); ++j) {
      const std::uint64_t e = report.root.value & ((std::uint64_t{1} << j) - 1);
      if (ctx.frobenius(tower[j - 1]) != ctx.pow(tower[j - 1], e)) report.tower_action = false;
    }
  }
  return report;
}

bool verify_pembed(const PreimageTree& tree, const TreeAutomorphism& sigma) {
  return pembed_report(tree, sigma).ok();
}

}  // namespace arbor
