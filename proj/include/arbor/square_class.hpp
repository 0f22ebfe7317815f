#pragma once

// Square classes of nonzero rationals, Q^x / (Q^x)^2, as vectors over GF(2):
// one sign bit and one bit per prime with odd exponent.

#include <span>
#include <string>
#include <vector>

#include "arbor/bigint.hpp"

namespace arbor {

/// Trial division bound; a leftover cofactor must be a prime or the square of one.
inline constexpr std::uint32_t kTrialDivisionBound = 1'000'000;

struct SquareClass {
  bool negative = false;
  std::vector<BigInt> primes;  // increasing

  bool is_trivial() const noexcept { return !negative && primes.empty(); }
  /// "1" for the trivial class, else factors such as "-1*2*3".
  std::string to_string() const;
  friend bool operator==(const SquareClass&, const SquareClass&) = default;
};

/// Product of two classes (symmetric difference of the prime sets).
SquareClass operator*(const SquareClass& lhs, const SquareClass& rhs);

/// Throws DomainError for q = 0 and UnfactoredError when the factorization is incomplete.
SquareClass square_class(const Rational& q);

/// Parses "a", "-a/b" and similar; throws DomainError on bad syntax or a zero denominator.
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);

/// [D_1, ..., D_count] with D_1 = x0 - c and D_i = f^i(0) - x0 for i >= 2,
/// f(z) = z^2 + c. Throws DomainError if some D_i is zero (x0 in the forward orbit of 0).
std::vector<Rational> disc_sequence(const Rational& c, const Rational& x0, int count);

struct IndependenceResult {
  bool independent = true;
  int rank = 0;
  /// Basis of the relations: each entry lists indices whose product is a square.
  std::vector<std::vector<int>> dependencies;
};

/// GF(2) elimination over the square classes of `values`.
IndependenceResult square_class_independence(std::span<const Rational> values);

struct ConditionVerdict {
  bool condition = false;
  int rank = 0;
  std::vector<std::vector<int>> dependencies;
  std::vector<std::string> labels;  // label of each index used in dependencies
};

/// The classes of -1, 2, D_1, ..., D_r are independent (indices 0, 1, 2, ..., r + 1).
/// c must give 0 exact period r; r >= 3 throws UnsupportedError since no rational c exists.
ConditionVerdict check_condition_one(const Rational& c, const Rational& x0, int r);

/// The classes of D_1, ..., D_n are independent (indices 0, ..., n - 1).
ConditionVerdict check_aut_tn(const Rational& c, const Rational& x0, int n);

}  // namespace arbor
