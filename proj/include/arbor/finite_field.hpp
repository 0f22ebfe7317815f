#pragma once

// Arithmetic in F_q, q = p^k, p an odd prime, represented as F_p[X]/(m) with
// m a monic irreducible polynomial of degree k. Elements are coefficient
// vectors, constant term first.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arbor/bigint.hpp"

namespace arbor {

class FqContext;

/// Upper bound on the characteristic.
inline constexpr std::uint64_t kMaxCharacteristic = std::uint64_t{1} << 40;

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime_u64(std::uint64_t n);

class FqElement {
 public:
  /// A detached placeholder; it must be assigned before use in arithmetic.
  FqElement() = default;
  /// Coefficients are reduced mod p; the vector is zero padded to length k.
  FqElement(const FqContext& ctx, std::vector<std::uint64_t> coeffs);

  const FqContext& context() const { return *ctx_; }
  bool attached() const noexcept { return ctx_ != nullptr; }
  std::span<const std::uint64_t> coeffs() const noexcept { return c_; }

  bool is_zero() const noexcept;
  bool is_one() const noexcept;
  /// True when only the constant coefficient may be nonzero.
  bool in_base_field() const noexcept;
  /// Comma separated coefficients, constant term first.
  std::string to_string() const;

  FqElement operator-() const;
  friend FqElement operator+(const FqElement& a, const FqElement& b);
  friend FqElement operator-(const FqElement& a, const FqElement& b);
  friend FqElement operator*(const FqElement& a, const FqElement& b);
  friend bool operator==(const FqElement& a, const FqElement& b) noexcept {
    return a.c_ == b.c_;
  }
  /// Lexicographic order of coefficient vectors, constant term first.
  friend bool lex_less(const FqElement& a, const FqElement& b) noexcept { return a.c_ < b.c_; }

 private:
  friend class FqContext;
  const FqContext* ctx_ = nullptr;
  std::vector<std::uint64_t> c_;
};

class FqContext {
 public:
  std::uint64_t p() const noexcept { return p_; }
  int k() const noexcept { return k_; }
  /// Monic modulus of degree k, constant term first (length k + 1).
  const std::vector<std::uint64_t>& modulus() const noexcept { return modulus_; }
  /// s with 2^s exactly dividing q - 1.
  int two_adic_valuation() const noexcept { return s_; }
  const BigInt& order() const noexcept { return q_; }
  /// (q - 1) / 2^s.
  const BigInt& odd_part() const noexcept { return odd_part_; }
  std::uint64_t seed() const noexcept { return seed_; }
  /// Random candidates drawn before an irreducible modulus was found.
  int modulus_tries() const noexcept { return tries_; }

  FqElement zero() const;
  FqElement one() const;
  FqElement from_int(std::int64_t v) const;
  FqElement element(std::vector<std::uint64_t> coeffs) const { return {*this, std::move(coeffs)}; }
  /// The class of X in F_p[X]/(m).
  FqElement generator_x() const;

  FqElement pow(const FqElement& a, const BigInt& e) const;
  FqElement pow(const FqElement& a, std::uint64_t e) const;
  /// a^p.
  FqElement frobenius(const FqElement& a) const;
  /// a^(p^(2^i)) for 2^i < k.
  FqElement frobenius_power(const FqElement& a, int i) const;
  /// a^-1 for a != 0 (extended Euclid in F_p[X]).
  FqElement inverse(const FqElement& a) const;
  /// a^((q-1)/2): 1 on nonzero squares, -1 on non-squares, 0 on 0.
  FqElement euler_criterion(const FqElement& a) const;
  /// a^((t-1)/2) with t the odd part of q - 1, the Tonelli-Shanks starting power.
  FqElement half_odd_power(const FqElement& a) const;
  /// Element of exact order 2^s, from a seeded random draw.
  const FqElement& two_sylow_generator() const noexcept { return sylow_; }

  /// Arithmetic kernels on raw coefficient spans (length k).
  void mul_into(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                std::vector<std::uint64_t>& out) const;

  FqContext(const FqContext&) = delete;
  FqContext& operator=(const FqContext&) = delete;

 private:
  friend std::shared_ptr<const FqContext> fq_make(std::uint64_t p, int k, std::uint64_t seed);
  friend std::shared_ptr<const FqContext> fq_with_modulus(std::uint64_t p,
                                                          std::vector<std::uint64_t> modulus,
                                                          std::uint64_t seed);
  FqContext(std::uint64_t p, std::vector<std::uint64_t> modulus, std::uint64_t seed, int tries);

  std::uint64_t p_;
  int k_;
  std::vector<std::uint64_t> modulus_;
  std::vector<std::uint64_t> neg_modulus_;  // (p - m_j) mod p
  bool small_;                              // accumulate products in 64 bits
  std::uint64_t seed_;
  int tries_;
  BigInt q_;
  int s_ = 0;
  BigInt odd_part_;                         // (q - 1) / 2^s
  // frobenius_powers_[i] is the k x k matrix of a -> a^(p^(2^i)); row j = X^(j p^(2^i)).
  // Only [0] unless k is a power of two up to kFrobeniusChainMaxDegree.
  std::vector<std::vector<std::uint64_t>> frobenius_powers_;
  FqElement apply_linear(const std::vector<std::uint64_t>& rows, const FqElement& a) const;
  FqElement sylow_;
};

/// Random monic irreducible modulus of degree k (Rabin test), deterministic in
/// the seed. p must be an odd prime below kMaxCharacteristic.
std::shared_ptr<const FqContext> fq_make(std::uint64_t p, int k, std::uint64_t seed);
/// A context over a caller supplied modulus; throws DomainError if reducible.
std::shared_ptr<const FqContext> fq_with_modulus(std::uint64_t p,
                                                 std::vector<std::uint64_t> modulus,
                                                 std::uint64_t seed = 0);

/// Rabin irreducibility test for a monic polynomial over F_p (constant term first).
bool is_irreducible(std::uint64_t p, std::span<const std::uint64_t> monic);

/// Tonelli-Shanks square root. Returns the lexicographically smaller of the two
/// roots, or nothing when a is not a square.
std::optional<FqElement> sqrt_fq(const FqContext& ctx, const FqElement& a);

/// zeta_2, zeta_4, ..., zeta_{2^E}: zeta_2 = -1, zeta_{2^j}^2 = zeta_{2^(j-1)}.
/// Throws UnavailableError unless 2^E divides q - 1.
std::vector<FqElement> root_of_unity_tower(const FqContext& ctx, int exponent);

}  // namespace arbor
