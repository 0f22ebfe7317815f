#pragma once

// Slow, direct reimplementations used to cross-check the library. They work
// from definitions (words as strings, leaf permutations, exhaustive subset
// search, resultants) and share no algorithmic code with the fast paths.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "arbor/bigint.hpp"
#include "arbor/preimage_tree.hpp"
#include "arbor/tree.hpp"

namespace arbor::oracle {

/// All words of length `len` over {a,b}, as strings in lexicographic order.
std::vector<std::string> all_words(int len);

/// Image of a word under sigma, walking the word symbol by symbol.
std::string apply_word(const TreeAutomorphism& sigma, const std::string& word);

/// sigma as a permutation of the 2^depth leaves (leaf index = path bits).
std::vector<std::uint32_t> leaf_permutation(const TreeAutomorphism& sigma);

/// Q_r(sigma, x) from the definition, listing W(r,i) as filtered strings.
std::int64_t q_definition(const TreeAutomorphism& sigma, const std::string& x, int r);

/// P_r(sigma, x) mod 2^e(level(x), n), from the definition.
std::uint64_t p_definition(const TreeAutomorphism& sigma, const std::string& x, int r);

/// e(m,n) recomputed: the largest e for which every term of Q below x exists.
int exponent_definition(int m, int n, int r);

bool in_b_prime(const TreeAutomorphism& sigma, int r);
/// Residues agree pairwise modulo the smaller modulus.
bool in_m_prime(const TreeAutomorphism& sigma, int r);

/// Number of roots of a monic polynomial (constant term first) in F_p, by scanning.
std::uint64_t count_roots(std::uint64_t p, std::span<const std::uint64_t> monic);

/// Failures of: sibling negation, [child]^2 + c = [parent], distinct values per level.
std::size_t structural_failures(const PreimageTree& tree);

/// Failures of the half-product identity over f^-m(y) at every node y and
/// every 1 <= m <= depth - level(y).
std::size_t product_identity_failures(const PreimageTree& tree, std::size_t* checks = nullptr);

/// Failures of gamma_1 = -1, gamma_j^2 = gamma_(j-1), gamma_j of exact order 2^j,
/// where gamma_j at x is the ratio of products over the nodes x a w a and x b w a.
std::size_t gamma_chain_failures(const PreimageTree& tree, std::size_t* checks = nullptr);

/// Failures of ratio == zeta_{2^(i+1)} at every admissible (x, i), dividing explicitly.
std::size_t perprod_failures(const PreimageTree& tree, std::size_t* checks = nullptr);

bool is_rational_square(const Rational& q);

/// Some v_i times a product of earlier v_j is a square, by trying every subset.
bool subset_dependent(std::span<const Rational> values);

/// Discriminant of f^i(z) - x0, f = z^2 + c, as (-1)^(d(d-1)/2) Res(g, g') for the
/// monic degree d = 2^i polynomial g.
Rational iterate_discriminant(const Rational& c, const Rational& x0, int i);

}  // namespace arbor::oracle
