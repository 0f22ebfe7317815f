#pragma once

// Truncated 2-adic parity functionals on Aut(T_n).
//
// For a word x and r >= 1,
//   Q_r(sigma, x) = sum_{i>=1} 2^i sum_{w in W(r,i)} Par(sigma, x w)
//   P_r(sigma, x) = (-1)^Par(sigma,x) + Q_r(sigma, x b) - Q_r(sigma, x a)
// where W(r,i) is the set of words of length r*i - 1 whose every r-th symbol
// is a. On T_n only the terms whose node lies at level <= n-1 exist; with
// that truncation P_r(sigma, x) is exact modulo 2^e(m,n) for x at level m,
// e(m,n) = floor((n-1-m)/r) + 1.

#include <cstdint>
#include <vector>

#include "arbor/tree.hpp"

namespace arbor {

/// An odd residue modulo 2^exponent.
struct TruncatedResidue {
  std::uint64_t value = 1;
  int exponent = 1;

  /// Reduces an arbitrary (odd) integer modulo 2^exponent.
  static TruncatedResidue reduce(std::int64_t v, int exponent);

  std::uint64_t modulus() const noexcept { return std::uint64_t{1} << exponent; }
  bool is_one() const noexcept { return value == 1 % modulus(); }
  /// Agreement modulo 2^min(exponents).
  bool congruent(const TruncatedResidue& other) const noexcept;
  /// Congruence with an ordinary integer modulo 2^exponent.
  bool congruent_to(std::int64_t v) const noexcept;

  friend bool operator==(const TruncatedResidue&, const TruncatedResidue&) = default;
};

/// Product, taken modulo 2^min(exponents).
TruncatedResidue operator*(const TruncatedResidue& lhs, const TruncatedResidue& rhs);

/// e(m, n) = floor((n-1-m)/r) + 1 for 0 <= m < n.
int e_bound(int m, int n, int r);

/// Words of W(r,i) as NodeAddress suffixes (level r*i - 1), in increasing path order.
std::vector<NodeAddress> w_words(int r, int i);

/// Truncated Q_r(sigma, x), summed directly over the W(r,i). x may lie on level n.
std::int64_t q_r_trunc(const TreeAutomorphism& sigma, NodeAddress x, int r);

/// Truncated P_r(sigma, x) modulo 2^e(level(x), n); requires level(x) < n.
TruncatedResidue p_r_trunc(const TreeAutomorphism& sigma, NodeAddress x, int r);

/// All truncated Q_r and P_r values of one automorphism, computed bottom-up with
///   Q_r(sigma, y) = 2 sum_{w in {a,b}^(r-1)} (Par(sigma, y w) + Q_r(sigma, y w a)).
class ParityProfile {
 public:
  ParityProfile(const TreeAutomorphism& sigma, int r);

  int depth() const noexcept { return depth_; }
  int r() const noexcept { return r_; }
  /// Q at a node of level 0..n.
  std::int64_t q(NodeAddress x) const { return q_[x.flat_id()]; }
  /// P at a node of level 0..n-1.
  const TruncatedResidue& p(NodeAddress x) const { return p_[x.flat_id()]; }
  const std::vector<TruncatedResidue>& residues() const noexcept { return p_; }

  /// Every residue is 1 (membership in B'_{r,n}).
  bool all_one() const noexcept;
  /// Every residue agrees with the root's modulo its own exponent
  /// (membership in M'_{r,n}).
  bool consistent() const noexcept;

 private:
  int depth_;
  int r_;
  std::vector<std::int64_t> q_;
  std::vector<TruncatedResidue> p_;
};

/// P_r(sigma, x) == 1 mod 2^e(m,n) at every node of levels 0..n-1.
bool in_b_prime(const TreeAutomorphism& sigma, int r);
/// The truncated residues at all nodes agree pairwise modulo the smaller modulus.
bool in_m_prime(const TreeAutomorphism& sigma, int r);
/// The common value P_r(sigma) modulo 2^e(0,n); throws ContractError unless in_m_prime.
TruncatedResidue p_r_root(const TreeAutomorphism& sigma, int r);

}  // namespace arbor
