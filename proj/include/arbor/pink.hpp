#pragma once

// Pink's generators alpha_1..alpha_r at finite depth, subgroup closure, the
// order formulas for G^Pink_{r,n} and for the level kernel S_{r,n}, and
// exhaustive scans of B'_{r,n} and M'_{r,n} on small trees.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "arbor/tree.hpp"

namespace arbor {

/// Parities of alpha_i: set exactly at the words a^(i-1) (b a^(r-1))^m below level n.
TreeAutomorphism alpha_generator(int i, int r, int n);

struct GeneratorSet {
  int r = 0;  // 0 for sets that are not Pink generators
  int depth = 1;
  std::vector<TreeAutomorphism> elements;

  /// {alpha_1, ..., alpha_r} at depth n.
  static GeneratorSet pink(int r, int n);
};

/// A finite subgroup of Aut(T_n), elements kept sorted in canonical order.
class FiniteGroup {
 public:
  FiniteGroup(int depth, std::vector<std::uint64_t> sorted_words);

  int depth() const noexcept { return depth_; }
  std::uint64_t order() const noexcept { return count_; }
  TreeAutomorphism element(std::size_t index) const;
  std::vector<TreeAutomorphism> elements() const;
  bool contains(const TreeAutomorphism& sigma) const;

  friend bool operator==(const FiniteGroup&, const FiniteGroup&) = default;

 private:
  std::span<const std::uint64_t> key(std::size_t index) const {
    return {words_.data() + index * stride_, stride_};
  }

  int depth_;
  std::size_t stride_;
  std::uint64_t count_;
  std::vector<std::uint64_t> words_;
};

/// Breadth-first closure of the generators under left multiplication, starting
/// from the identity. Throws CapExceeded (with the count reached) once the
/// group would exceed `cap` elements.
FiniteGroup closure(const GeneratorSet& gens, std::uint64_t cap);

/// log2 |G^Pink_{r,n}| = 2^n - 1 - sum_{m=0}^{n-1} 2^(n-1-m) floor(m/r).
std::int64_t log2_order_pink(int r, int n);
/// log2 |S_{r,n}| = 2^(n-1) - sum_{i=1}^{floor((n-1)/r)} 2^(n-1-ir), for n >= 2.
std::int64_t log2_order_s(int r, int n);

/// Largest depth accepted by the exhaustive scans (2^15 candidates).
inline constexpr int kEnumerationMaxDepth = 4;

/// Every sigma in Aut(T_n) with in_b_prime(sigma, r).
FiniteGroup enumerate_b_prime(int r, int n);
/// Every sigma in Aut(T_n) with in_m_prime(sigma, r).
FiniteGroup enumerate_m_prime(int r, int n);

struct OrderRow {
  int r = 0;
  int n = 0;
  std::int64_t log2_formula = 0;
  std::optional<std::uint64_t> bfs_order;       // absent when skipped or capped
  std::optional<std::uint64_t> bprime_count;    // absent beyond kEnumerationMaxDepth
  bool bfs_capped = false;
  bool match = true;
};

/// One row per (r, n); BFS runs when 2^log2_formula <= bfs_cap.
std::vector<OrderRow> orders_table(std::span<const int> rs, std::span<const int> ns,
                                   std::uint64_t bfs_cap);
/// CSV with header r,n,log2_formula,bfs_order,bprime_count,match_flag.
void write_orders_csv(std::ostream& out, std::span<const OrderRow> rows);

}  // namespace arbor
