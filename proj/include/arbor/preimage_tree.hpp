#pragma once

// Iterated preimages of x0 under f(z) = z^2 + c over a finite field, where 0
// is periodic of exact period r under f. The values hang on the binary tree:
// [x a] and [x b] are the two square roots of [x] - c.

#include <cstdint>
#include <memory>
#include <vector>

#include "arbor/finite_field.hpp"
#include "arbor/parity.hpp"
#include "arbor/tree.hpp"

namespace arbor {

/// Largest prime find_pcf_c will scan.
inline constexpr std::uint64_t kPcfScanBound = std::uint64_t{1} << 24;
inline constexpr int kPcfMaxPeriod = 8;
/// Largest extension degree build_preimage_tree will try.
inline constexpr int kMaxExtensionDegree = 1024;

/// f(z) = z^2 + c over F_p with f^r(0) = 0 and f^s(0) != 0 for 0 < s < r.
struct PcfParameter {
  std::uint64_t p = 0;
  std::uint64_t c = 0;
  int r = 1;
};

/// Checks that 0 has exact period r under z^2 + c mod p; throws DomainError otherwise.
PcfParameter make_pcf(std::uint64_t p, std::uint64_t c, int r);

/// All c in F_p giving period exactly r, by scanning F_p. Throws CapExceeded
/// when p > kPcfScanBound and DomainError for bad p or r.
std::vector<std::uint64_t> find_pcf_c(std::uint64_t p, int r);

/// 0, f(0), ..., f^(r-1)(0).
std::vector<std::uint64_t> forward_orbit(const PcfParameter& f);

/// Smallest x0 in F_p outside the forward orbit of 0.
std::uint64_t smallest_x0(const PcfParameter& f);

class PreimageTree {
 public:
  const PcfParameter& parameter() const noexcept { return f_; }
  std::uint64_t x0() const noexcept { return x0_; }
  int depth() const noexcept { return depth_; }
  const FqContext& field() const noexcept { return *ctx_; }
  std::shared_ptr<const FqContext> field_ptr() const noexcept { return ctx_; }
  /// Number of times the field was enlarged before every square root existed.
  int restarts() const noexcept { return restarts_; }

  /// Value at a node of level 0..depth.
  const FqElement& value(NodeAddress x) const { return values_.at(x.flat_id()); }
  const std::vector<FqElement>& values() const noexcept { return values_; }

  /// zeta_2, ..., zeta_{2^E} with E = e(0, depth); empty when 2^E does not divide q - 1.
  const std::vector<FqElement>& tower() const noexcept { return tower_; }
  int tower_exponent() const noexcept { return e_bound(0, depth_, f_.r); }

  /// Exchanges the labels y a and y b, carrying their subtrees along.
  void swap_children(NodeAddress y);
  /// Label swaps made by canonical_label.
  int swaps() const noexcept { return swaps_; }
  bool labeled() const noexcept { return labeled_; }

 private:
  friend PreimageTree build_preimage_tree(const PcfParameter&, std::uint64_t, int, std::uint64_t);
  friend PreimageTree canonical_label(PreimageTree tree);
  PreimageTree() = default;

  PcfParameter f_;
  std::uint64_t x0_ = 0;
  int depth_ = 0;
  std::shared_ptr<const FqContext> ctx_;
  int restarts_ = 0;
  std::vector<FqElement> values_;  // flat ids of levels 0..depth
  std::vector<FqElement> tower_;
  int swaps_ = 0;
  bool labeled_ = false;
};

/// Builds the depth-n tree over F_{p^k}, k the least power of two in which
/// every square root exists. [x a] is the canonical root of [x] - c.
/// Throws DomainError if x0 lies in the forward orbit of 0 and CapExceeded if
/// k would exceed kMaxExtensionDegree.
PreimageTree build_preimage_tree(const PcfParameter& f, std::uint64_t x0, int n,
                                 std::uint64_t seed = 0);

/// Relabels so that for every node x and i >= 1 with level(x) + r i + 1 <= n,
///   prod_{w in W(r,i)} [x a w a] / prod_{w in W(r,i)} [x b w a] = zeta_{2^(i+1)}.
/// Throws IntegrityError if the tower is missing or a ratio is not +-zeta.
PreimageTree canonical_label(PreimageTree tree);

/// (prod [x a w a], prod [x b w a]) over w in W(r,i).
std::pair<FqElement, FqElement> perprod_halves(const PreimageTree& tree, NodeAddress x, int i);

struct PerprodFailure {
  NodeAddress x;
  int i = 0;
};

struct PerprodReport {
  std::size_t checks = 0;
  std::vector<PerprodFailure> failures;
  bool ok() const noexcept { return failures.empty(); }
};

/// Checks the product identity at every admissible (x, i).
PerprodReport verify_perprod(const PreimageTree& tree);

/// The action of v -> v^p on the labeled tree. Throws IntegrityError if some
/// image value is missing from the expected sibling pair.
TreeAutomorphism frobenius_automorphism(const PreimageTree& tree);

struct PembedReport {
  bool residues_match = true;  // P_r(sigma, x) == p mod 2^e at every node
  bool consistent = true;      // sigma in M'_{r,n}
  bool tower_action = true;    // sigma(zeta_{2^j}) == zeta_{2^j}^P for every tower entry
  TruncatedResidue root;       // P_r(sigma, root)
  std::size_t nodes_checked = 0;
  bool ok() const noexcept { return residues_match && consistent && tower_action; }
};

PembedReport pembed_report(const PreimageTree& tree, const TreeAutomorphism& sigma);
bool verify_pembed(const PreimageTree& tree, const TreeAutomorphism& sigma);

}  // namespace arbor
