#include "arbor/parity.hpp"

#include <algorithm>
#include <string>

#include "arbor/errors.hpp"

namespace arbor {

namespace {

void check_r(int r) {
  if (r < 1) throw DomainError("r must be at least 1");
}

std::uint64_t mask(int exponent) { return (std::uint64_t{1} << exponent) - 1; }

}  // namespace

TruncatedResidue TruncatedResidue::reduce(std::int64_t v, int exponent) {
  if (exponent < 1 || exponent > 62) throw DomainError("residue exponent out of range");
  // Two's complement makes the mask a correct reduction for negative v.
  return {static_cast<std::uint64_t>(v) & mask(exponent), exponent};
}

bool TruncatedResidue::congruent(const TruncatedResidue& other) const noexcept {
  const std::uint64_t m = mask(std::min(exponent, other.exponent));
  return (value & m) == (other.value & m);
}

bool TruncatedResidue::congruent_to(std::int64_t v) const noexcept {
  return value == (static_cast<std::uint64_t>(v) & mask(exponent));
}

TruncatedResidue operator*(const TruncatedResidue& lhs, const TruncatedResidue& rhs) {
  const int e = std::min(lhs.exponent, rhs.exponent);
  return {(lhs.value * rhs.value) & mask(e), e};
}

int e_bound(int m, int n, int r) {
  check_r(r);
  if (m < 0 || m >= n) {
    throw DomainError("e_bound: need 0 <= m < n (m=" + std::to_string(m) +
                      ", n=" + std::to_string(n) + ")");
  }
  return (n - 1 - m) / r + 1;
}

std::vector<NodeAddress> w_words(int r, int i) {
  check_r(r);
  if (i < 1) throw DomainError("W(r,i) needs i >= 1");
  const int length = r * i - 1;
  if (length > kMaxDepth) throw DomainError("W(r,i) words longer than the maximum depth");
  std::vector<int> free_bits;
  for (int j = 1; j <= length; ++j) {
    if (j % r != 0) free_bits.push_back(j - 1);
  }
  std::vector<NodeAddress> words;
  words.reserve(std::size_t{1} << free_bits.size());
  for (std::uint32_t counter = 0; counter < (1u << free_bits.size()); ++counter) {
    std::uint32_t path = 0;
    for (std::size_t k = 0; k < free_bits.size(); ++k) {
      path |= ((counter >> k) & 1u) << free_bits[k];
    }
    words.push_back({length, path});
  }
  std::sort(words.begin(), words.end());
  return words;
}

std::int64_t q_r_trunc(const TreeAutomorphism& sigma, NodeAddress x, int r) {
  check_r(r);
  const int n = sigma.depth();
  if (x.level < 0 || x.level > n) throw DomainError("q_r_trunc: node outside the tree");
  std::int64_t total = 0;
  for (int i = 1; x.level + r * i - 1 <= n - 1; ++i) {
    std::int64_t count = 0;
    for (NodeAddress w : w_words(r, i)) count += sigma.parity_at(x.concat(w).flat_id());
    total += count << i;
  }
  return total;
}

TruncatedResidue p_r_trunc(const TreeAutomorphism& sigma, NodeAddress x, int r) {
  const int n = sigma.depth();
  if (x.level < 0 || x.level >= n) {
    throw DomainError("p_r_trunc: node must lie below the top level");
  }
  const std::int64_t sign = sigma.parity_at(x.flat_id()) ? -1 : 1;
  const std::int64_t v =
      sign + q_r_trunc(sigma, x.child(Symbol::b), r) - q_r_trunc(sigma, x.child(Symbol::a), r);
  return TruncatedResidue::reduce(v, e_bound(x.level, n, r));
}

ParityProfile::ParityProfile(const TreeAutomorphism& sigma, int r)
    : depth_(sigma.depth()), r_(r) {
  check_r(r);
  const int n = depth_;
  q_.assign((std::size_t{1} << (n + 1)) - 1, 0);
  // Q at level m is nonzero only when level m + r - 1 still carries parities.
  for (int level = n - r; level >= 0; --level) {
    const std::size_t width = std::size_t{1} << level;
    const std::size_t fan = std::size_t{1} << (r - 1);
    for (std::uint32_t path = 0; path < width; ++path) {
      const NodeAddress y{level, path};
      std::int64_t sum = 0;
      for (std::uint32_t w = 0; w < fan; ++w) {
        const NodeAddress yw = y.concat({r - 1, w});
        sum += sigma.parity_at(yw.flat_id());
        sum += q_[yw.child(Symbol::a).flat_id()];
      }
      q_[y.flat_id()] = 2 * sum;
    }
  }
  p_.resize(sigma.node_count());
  for (std::size_t id = 0; id < p_.size(); ++id) {
    const NodeAddress x = NodeAddress::from_flat(id);
    const std::int64_t sign = sigma.parity_at(id) ? -1 : 1;
    p_[id] = TruncatedResidue::reduce(
        sign + q_[x.child(Symbol::b).flat_id()] - q_[x.child(Symbol::a).flat_id()],
        (n - 1 - x.level) / r + 1);
  }
}

bool ParityProfile::all_one() const noexcept {
  return std::all_of(p_.begin(), p_.end(), [](const TruncatedResidue& v) { return v.is_one(); });
}

bool ParityProfile::consistent() const noexcept {
  const TruncatedResidue& root = p_.front();
  return std::all_of(p_.begin(), p_.end(),
                     [&](const TruncatedResidue& v) { return v.congruent(root); });
}

bool in_b_prime(const TreeAutomorphism& sigma, int r) {
  return ParityProfile(sigma, r).all_one();
}

bool in_m_prime(const TreeAutomorphism& sigma, int r) {
  return ParityProfile(sigma, r).consistent();
}

TruncatedResidue p_r_root(const TreeAutomorphism& sigma, int r) {
  ParityProfile profile(sigma, r);
  if (!profile.consistent()) {
    throw ContractError("p_r_root: automorphism is not in M'_{r,n}");
  }
  return profile.p(NodeAddress::root());
}

}  // namespace arbor
