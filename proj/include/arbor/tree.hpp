#pragma once

// Automorphisms of the rooted binary tree T_n, stored by their parities.
//
// A node at level m is a word s_1...s_m over {a,b}. We encode it as
// (level, path) with symbol s_j in bit j-1 of `path` (a = 0, b = 1), so the
// child x.s is (m+1, path + s*2^m). Nodes are numbered breadth first by the
// flat id 2^m - 1 + path.
//
// An automorphism of T_n is determined by one bit per node of levels 0..n-1:
// Par(sigma, x) = 1 iff sigma sends the children of x crosswise, i.e.
// sigma(x s) = sigma(x) (s XOR Par(sigma, x)). Every bit pattern is valid.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace arbor {

/// Largest depth any tree operation accepts.
inline constexpr int kMaxDepth = 24;

enum class Symbol : std::uint8_t { a = 0, b = 1 };

struct NodeAddress {
  int level = 0;
  std::uint32_t path = 0;

  static constexpr NodeAddress root() noexcept { return {}; }
  /// Inverse of flat_id().
  static NodeAddress from_flat(std::size_t flat_id);
  /// Parses a word such as "abba"; "" and "()" denote the root.
  static NodeAddress parse(std::string_view word);

  constexpr std::size_t flat_id() const noexcept {
    return ((std::size_t{1} << level) - 1) + path;
  }
  constexpr NodeAddress child(Symbol s) const noexcept {
    return {level + 1, path | (static_cast<std::uint32_t>(s) << level)};
  }
  constexpr NodeAddress parent() const noexcept {
    return {level - 1, path & ((std::uint32_t{1} << (level - 1)) - 1)};
  }
  /// Symbol s_j for 1 <= j <= level.
  constexpr Symbol symbol(int j) const noexcept {
    return static_cast<Symbol>((path >> (j - 1)) & 1u);
  }
  /// This word followed by `suffix`.
  constexpr NodeAddress concat(NodeAddress suffix) const noexcept {
    return {level + suffix.level, path | (suffix.path << level)};
  }

  std::string to_string() const;

  friend constexpr bool operator==(NodeAddress, NodeAddress) = default;
  friend constexpr auto operator<=>(NodeAddress, NodeAddress) = default;
};

class TreeAutomorphism {
 public:
  /// The identity of Aut(T_depth).
  explicit TreeAutomorphism(int depth);

  static TreeAutomorphism identity(int depth) { return TreeAutomorphism(depth); }
  /// Builds from packed parity words (bit i of the vector is flat node i).
  static TreeAutomorphism from_words(int depth, std::vector<std::uint64_t> words);
  /// Builds from one bool per node, in flat order; size must be 2^depth - 1.
  static TreeAutomorphism from_bits(int depth, const std::vector<bool>& bits);
  /// Parses the hex serialization produced by to_hex().
  static TreeAutomorphism from_hex(std::string_view hex);

  int depth() const noexcept { return depth_; }
  /// Number of parity-carrying nodes, 2^depth - 1.
  std::size_t node_count() const noexcept { return (std::size_t{1} << depth_) - 1; }

  bool parity(NodeAddress x) const;
  bool parity_at(std::size_t flat_id) const noexcept {
    return (words_[flat_id >> 6] >> (flat_id & 63)) & 1u;
  }
  void set_parity(NodeAddress x, bool value);
  void set_parity_at(std::size_t flat_id, bool value) noexcept;
  void flip_parity(NodeAddress x);

  /// Image of the word w; throws DomainError if w.level > depth().
  NodeAddress apply(NodeAddress w) const;
  /// Images of all 2^m words at level m, indexed by path.
  std::vector<std::uint32_t> level_images(int m) const;

  bool is_identity() const noexcept;
  std::size_t popcount() const noexcept;
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  /// Depth byte, then parity bits packed little-endian, as lower-case hex.
  std::string to_hex() const;

  friend bool operator==(const TreeAutomorphism&, const TreeAutomorphism&) = default;
  /// Canonical order: depth, then the parity vector read as a binary number
  /// whose bit i is flat node i.
  friend std::strong_ordering operator<=>(const TreeAutomorphism& lhs,
                                          const TreeAutomorphism& rhs) noexcept;

 private:
  int depth_;
  std::vector<std::uint64_t> words_;
};

/// sigma * tau, acting as w -> sigma(tau(w)).
TreeAutomorphism compose(const TreeAutomorphism& sigma, const TreeAutomorphism& tau);
inline TreeAutomorphism operator*(const TreeAutomorphism& sigma, const TreeAutomorphism& tau) {
  return compose(sigma, tau);
}
TreeAutomorphism invert(const TreeAutomorphism& sigma);
/// Restriction to T_m (1 <= m <= depth).
TreeAutomorphism restrict(const TreeAutomorphism& sigma, int m);
/// sigma^e for e >= 0.
TreeAutomorphism power(const TreeAutomorphism& sigma, std::uint64_t e);
/// Uniform element of Aut(T_n), reproducible for a fixed seed.
TreeAutomorphism random_automorphism(int n, std::uint64_t seed);

/// Throws DomainError unless 1 <= n <= kMaxDepth.
void check_depth(int n);

namespace detail {

inline std::size_t words_for_depth(int depth) noexcept {
  return (((std::size_t{1} << depth) - 1) + 63) / 64;
}

/// Reusable buffers for compose_words.
struct ComposeScratch {
  std::vector<std::uint32_t> current;
  std::vector<std::uint32_t> next;
};

/// Writes the parity words of sigma*tau into `out`. All spans hold
/// words_for_depth(depth) words; `out` may not alias the inputs.
void compose_words(int depth, std::span<const std::uint64_t> sigma,
                   std::span<const std::uint64_t> tau, std::span<std::uint64_t> out,
                   ComposeScratch& scratch);

}  // namespace detail

}  // namespace arbor
