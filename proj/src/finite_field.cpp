#include "arbor/finite_field.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "arbor/errors.hpp"
#include "arbor/random.hpp"

namespace arbor {

namespace {

__extension__ typedef unsigned __int128 u128;
using Poly = std::vector<std::uint64_t>;

// Horner exponentiation over base-p digits pays off while the digit table is small.
constexpr std::uint64_t kDigitTableMaxP = 64;
// Frobenius power matrices are precomputed up to this degree (memory k^2 log k words).
constexpr int kFrobeniusChainMaxDegree = 512;
// Small-degree factors checked by gcd before the full Rabin test.
constexpr int kPrefilterDegree = 16;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e != 0) {
    if (e & 1u) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

std::uint64_t invmod(std::uint64_t a, std::uint64_t p) { return powmod(a, p - 2, p); }

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

bool fits_small(std::uint64_t p, int k) {
  // k products plus k reduction terms, each below p^2, must fit in 64 bits.
  const u128 bound = static_cast<u128>(p - 1) * (p - 1) * (2 * static_cast<u128>(k) + 1);
  return bound < (static_cast<u128>(1) << 64);
}

// Product of two reduced polynomials modulo the monic modulus whose negated
// low coefficients are `neg`.
template <class Acc>
void mul_reduce(std::uint64_t p, int k, std::span<const std::uint64_t> neg,
                std::span<const std::uint64_t> a, std::span<const std::uint64_t> b, Poly& out) {
  std::vector<Acc> acc(2 * static_cast<std::size_t>(k) - 1, 0);
  for (int i = 0; i < k; ++i) {
    const std::uint64_t ai = a[i];
    if (ai == 0) continue;
    Acc* row = acc.data() + i;
    for (int j = 0; j < k; ++j) row[j] += static_cast<Acc>(ai) * b[j];
  }
  for (int i = 2 * k - 2; i >= k; --i) {
    const auto t = static_cast<std::uint64_t>(acc[i] % p);
    if (t == 0) continue;
    Acc* row = acc.data() + (i - k);
    for (int j = 0; j < k; ++j) row[j] += static_cast<Acc>(t) * neg[j];
  }
  out.resize(k);
  for (int i = 0; i < k; ++i) out[i] = static_cast<std::uint64_t>(acc[i] % p);
}

struct Ring {
  std::uint64_t p;
  int k;
  Poly neg;
  bool small;

  Ring(std::uint64_t p_, std::span<const std::uint64_t> monic)
      : p(p_), k(static_cast<int>(monic.size()) - 1), small(fits_small(p_, k)) {
    neg.resize(k);
    for (int j = 0; j < k; ++j) neg[j] = (p - monic[j] % p) % p;
  }

  void mul(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b, Poly& out) const {
    if (small) {
      mul_reduce<std::uint64_t>(p, k, neg, a, b, out);
    } else {
      mul_reduce<u128>(p, k, neg, a, b, out);
    }
  }

  Poly pow(Poly a, std::uint64_t e) const {
    Poly r(k, 0);
    r[0] = 1;
    Poly tmp;
    while (e != 0) {
      if (e & 1u) {
        mul(r, a, tmp);
        r.swap(tmp);
      }
      e >>= 1;
      if (e != 0) {
        mul(a, a, tmp);
        a.swap(tmp);
      }
    }
    return r;
  }

  Poly x() const {
    Poly v(k, 0);
    if (k == 1) {
      v[0] = (p - neg[0]) % p;  // X = -m_0 in F_p[X]/(X + m_0)
    } else {
      v[1] = 1;
    }
    return v;
  }
};

// Remainder of a by b (b nonzero, trimmed).
Poly poly_mod(Poly a, const Poly& b, std::uint64_t p) {
  trim(a);
  const std::size_t db = b.size() - 1;
  const std::uint64_t lead_inv = invmod(b.back(), p);
  while (a.size() >= b.size()) {
    const std::uint64_t factor = mulmod(a.back(), lead_inv, p);
    const std::size_t shift = a.size() - b.size();
    for (std::size_t j = 0; j <= db; ++j) {
      a[shift + j] = (a[shift + j] + p - mulmod(factor, b[j], p)) % p;
    }
    trim(a);
  }
  return a;
}

Poly poly_gcd(Poly a, Poly b, std::uint64_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// gcd(h - X, m) has positive degree.
bool shares_factor_with_x_difference(const Ring& ring, const Poly& h, std::span<const std::uint64_t> monic) {
  Poly diff = h;
  const Poly x = ring.x();
  for (int i = 0; i < ring.k; ++i) diff[i] = (diff[i] + ring.p - x[i]) % ring.p;
  trim(diff);
  if (diff.empty()) return true;
  const Poly g = poly_gcd(Poly(monic.begin(), monic.end()), diff, ring.p);
  return g.size() > 1;
}

std::vector<int> prime_divisors(int k) {
  std::vector<int> out;
  for (int d = 2; d * d <= k; ++d) {
    if (k % d == 0) {
      out.push_back(d);
      while (k % d == 0) k /= d;
    }
  }
  if (k > 1) out.push_back(k);
  return out;
}

void check_characteristic(std::uint64_t p) {
  if (p == 2 || p % 2 == 0) throw DomainError("characteristic must be odd");
  if (p >= kMaxCharacteristic) throw DomainError("characteristic exceeds 2^40");
  if (!is_prime_u64(p)) throw DomainError(std::to_string(p) + " is not prime");
}

void require_same(const FqElement& a, const FqElement& b) {
  if (!a.attached() || !b.attached() || &a.context() != &b.context()) {
    throw DomainError("field elements from different contexts");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t small : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % small == 0) return n == small;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1u) == 0) {
    d >>= 1;
    ++r;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

bool is_irreducible(std::uint64_t p, std::span<const std::uint64_t> monic) {
  if (monic.size() < 2 || monic.back() != 1) throw DomainError("modulus must be monic of degree >= 1");
  const int k = static_cast<int>(monic.size()) - 1;
  if (k == 1) return true;
  if (monic[0] % p == 0) return false;
  const Ring ring(p, monic);
  std::vector<int> checkpoints;
  for (int q : prime_divisors(k)) checkpoints.push_back(k / q);
  // h runs through X^(p^d) mod m.
  Poly h = ring.x();
  for (int d = 1; d <= k; ++d) {
    h = ring.pow(std::move(h), p);
    const bool prefilter = d <= kPrefilterDegree && 2 * d <= k;
    const bool checkpoint = std::find(checkpoints.begin(), checkpoints.end(), d) != checkpoints.end();
    if ((prefilter || checkpoint) && shares_factor_with_x_difference(ring, h, monic)) return false;
  }
  return h == ring.x();
}

// ---------------------------------------------------------------------------
// FqElement

FqElement::FqElement(const FqContext& ctx, std::vector<std::uint64_t> coeffs) : ctx_(&ctx) {
  const auto k = static_cast<std::size_t>(ctx.k());
  if (coeffs.size() > k) throw DomainError("more coefficients than the extension degree");
  coeffs.resize(k, 0);
  for (auto& c : coeffs) c %= ctx.p();
  c_ = std::move(coeffs);
}

bool FqElement::is_zero() const noexcept {
  return std::all_of(c_.begin(), c_.end(), [](std::uint64_t c) { return c == 0; });
}

bool FqElement::is_one() const noexcept {
  return !c_.empty() && c_[0] == 1 && std::all_of(c_.begin() + 1, c_.end(), [](std::uint64_t c) { return c == 0; });
}

bool FqElement::in_base_field() const noexcept {
  return c_.empty() || std::all_of(c_.begin() + 1, c_.end(), [](std::uint64_t c) { return c == 0; });
}

std::string FqElement::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (i != 0) out.push_back(',');
    out += std::to_string(c_[i]);
  }
  return out;
}

FqElement FqElement::operator-() const {
  FqElement r = *this;
  const std::uint64_t p = ctx_->p();
  for (auto& c : r.c_) c = c == 0 ? 0 : p - c;
  return r;
}

FqElement operator+(const FqElement& a, const FqElement& b) {
  require_same(a, b);
  FqElement r = a;
  const std::uint64_t p = a.ctx_->p();
  for (std::size_t i = 0; i < r.c_.size(); ++i) {
    const std::uint64_t s = r.c_[i] + b.c_[i];
    r.c_[i] = s >= p ? s - p : s;
  }
  return r;
}

FqElement operator-(const FqElement& a, const FqElement& b) {
  require_same(a, b);
  FqElement r = a;
  const std::uint64_t p = a.ctx_->p();
  for (std::size_t i = 0; i < r.c_.size(); ++i) {
    r.c_[i] = r.c_[i] >= b.c_[i] ? r.c_[i] - b.c_[i] : r.c_[i] + p - b.c_[i];
  }
  return r;
}

FqElement operator*(const FqElement& a, const FqElement& b) {
  require_same(a, b);
  FqElement r;
  r.ctx_ = a.ctx_;
  a.ctx_->mul_into(a.c_, b.c_, r.c_);
  return r;
}

// ---------------------------------------------------------------------------
// FqContext

FqContext::FqContext(std::uint64_t p, std::vector<std::uint64_t> modulus, std::uint64_t seed, int tries)
    : p_(p),
      k_(static_cast<int>(modulus.size()) - 1),
      modulus_(std::move(modulus)),
      small_(fits_small(p, k_)),
      seed_(seed),
      tries_(tries) {
  neg_modulus_.resize(k_);
  for (int j = 0; j < k_; ++j) neg_modulus_[j] = (p_ - modulus_[j] % p_) % p_;

  q_ = boost::multiprecision::pow(BigInt(p_), static_cast<unsigned>(k_));
  odd_part_ = q_ - 1;
  while ((odd_part_ & 1) == 0) {
    odd_part_ >>= 1;
    ++s_;
  }

  const Ring ring(p_, modulus_);
  const Poly xp = ring.pow(ring.x(), p_);
  std::vector<std::uint64_t> rows(static_cast<std::size_t>(k_) * k_, 0);
  Poly row(k_, 0);
  row[0] = 1;
  Poly tmp;
  for (int i = 0; i < k_; ++i) {
    std::copy(row.begin(), row.end(), rows.begin() + static_cast<std::ptrdiff_t>(i) * k_);
    ring.mul(row, xp, tmp);
    row.swap(tmp);
  }
  frobenius_powers_.push_back(std::move(rows));
  if (std::has_single_bit(static_cast<unsigned>(k_)) && k_ <= kFrobeniusChainMaxDegree) {
    // Row j of the next matrix is the current map applied to row j.
    for (int m = 2; m < k_; m *= 2) {
      const auto& prev = frobenius_powers_.back();
      std::vector<std::uint64_t> next(prev.size());
      for (int j = 0; j < k_; ++j) {
        const FqElement rj = element({prev.begin() + static_cast<std::ptrdiff_t>(j) * k_,
                                      prev.begin() + static_cast<std::ptrdiff_t>(j + 1) * k_});
        const FqElement img = apply_linear(prev, rj);
        std::copy(img.c_.begin(), img.c_.end(), next.begin() + static_cast<std::ptrdiff_t>(j) * k_);
      }
      frobenius_powers_.push_back(std::move(next));
    }
  }

  Rng rng(seed ^ 0x6a09e667f3bcc909ULL);
  const FqElement minus_one = -one();
  for (;;) {
    std::vector<std::uint64_t> c(k_);
    for (auto& v : c) v = rng.below(p_);
    const FqElement u = element(std::move(c));
    if (u.is_zero()) continue;
    FqElement g = pow(u, odd_part_);
    FqElement probe = g;
    for (int i = 1; i < s_; ++i) probe = probe * probe;
    if (probe == minus_one) {
      sylow_ = std::move(g);
      break;
    }
  }
}

void FqContext::mul_into(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                         std::vector<std::uint64_t>& out) const {
  if (small_) {
    mul_reduce<std::uint64_t>(p_, k_, neg_modulus_, a, b, out);
  } else {
    mul_reduce<u128>(p_, k_, neg_modulus_, a, b, out);
  }
}

FqElement FqContext::zero() const { return element({}); }

FqElement FqContext::one() const { return element({1}); }

FqElement FqContext::from_int(std::int64_t v) const {
  const auto p = static_cast<std::int64_t>(p_);
  std::int64_t r = v % p;
  if (r < 0) r += p;
  return element({static_cast<std::uint64_t>(r)});
}

FqElement FqContext::generator_x() const { return element(Ring(p_, modulus_).x()); }

FqElement FqContext::apply_linear(const std::vector<std::uint64_t>& rows, const FqElement& a) const {
  auto apply = [&](auto zero_acc) {
    using Acc = decltype(zero_acc);
    std::vector<Acc> acc(k_, 0);
    for (int i = 0; i < k_; ++i) {
      const std::uint64_t ai = a.c_[i];
      if (ai == 0) continue;
      const std::uint64_t* row = rows.data() + static_cast<std::size_t>(i) * k_;
      for (int j = 0; j < k_; ++j) acc[j] += static_cast<Acc>(ai) * row[j];
    }
    FqElement r;
    r.ctx_ = this;
    r.c_.resize(k_);
    for (int j = 0; j < k_; ++j) r.c_[j] = static_cast<std::uint64_t>(acc[j] % p_);
    return r;
  };
  return small_ ? apply(std::uint64_t{0}) : apply(u128{0});
}

FqElement FqContext::frobenius(const FqElement& a) const { return apply_linear(frobenius_powers_[0], a); }

FqElement FqContext::frobenius_power(const FqElement& a, int i) const {
  if (i < 0 || (i > 0 && (std::int64_t{1} << i) >= k_)) throw DomainError("frobenius_power: index out of range");
  if (static_cast<std::size_t>(i) < frobenius_powers_.size()) return apply_linear(frobenius_powers_[i], a);
  FqElement r = a;
  for (int j = 0; j < (1 << i); ++j) r = frobenius(r);
  return r;
}

FqElement FqContext::half_odd_power(const FqElement& a) const {
  const auto k = static_cast<unsigned>(k_);
  const bool chain = k > 1 && std::has_single_bit(k) &&
                     static_cast<std::size_t>(std::countr_zero(k)) == frobenius_powers_.size();
  if (!chain) return pow(a, (odd_part_ - 1) / 2);
  // With t_m the odd part of p^m - 1 (m a power of two), track
  // H = a^((t_m - 1)/2) and A = a^(t_m) while m doubles:
  //   t_2m = t_m h_m, h_1 = odd part of p + 1, h_m = (p^m + 1)/2 for m >= 2,
  //   H_2m = A^((h_m - 1)/2) H,  A_2m = (A^((h_m - 1)/2))^2 A.
  std::uint64_t t1 = p_ - 1;
  while ((t1 & 1u) == 0) t1 >>= 1;
  std::uint64_t h1 = p_ + 1;
  while ((h1 & 1u) == 0) h1 >>= 1;
  FqElement h = pow(a, (t1 - 1) / 2);
  FqElement big_a = h * h * a;
  FqElement g = pow(big_a, (h1 - 1) / 2);
  h = g * h;
  big_a = g * g * big_a;
  for (int i = 1; (1 << i) < k_; ++i) {
    // g = A^((p^m - 1)/4), m = 2^i, built up from m = 2 by g_2m = frob^m(g_m) g_m.
    g = pow(pow(big_a, (p_ - 1) / 2), (p_ + 1) / 2);
    for (int l = 1; l < i; ++l) g = frobenius_power(g, l) * g;
    h = g * h;
    big_a = g * g * big_a;
  }
  return h;
}

FqElement FqContext::pow(const FqElement& a, std::uint64_t e) const {
  FqElement r = one();
  FqElement base = a;
  while (e != 0) {
    if (e & 1u) r = r * base;
    e >>= 1;
    if (e != 0) base = base * base;
  }
  return r;
}

FqElement FqContext::pow(const FqElement& a, const BigInt& e) const {
  if (e < 0) throw DomainError("negative exponent");
  if (e == 0) return one();
  if (p_ <= kDigitTableMaxP && k_ > 1) {
    // a^(p E + d) = frobenius(a^E) * a^d, most significant digit first.
    std::vector<unsigned> digits;
    BigInt rest = e;
    while (rest != 0) {
      digits.push_back(static_cast<unsigned>(static_cast<std::uint64_t>(rest % p_)));
      rest /= p_;
    }
    std::vector<FqElement> table{one()};
    for (std::uint64_t d = 1; d < p_; ++d) table.push_back(table.back() * a);
    FqElement r = one();
    for (std::size_t i = digits.size(); i-- > 0;) {
      r = frobenius(r);
      if (digits[i] != 0) r = r * table[digits[i]];
    }
    return r;
  }
  FqElement r = one();
  for (std::size_t bit = boost::multiprecision::msb(e) + 1; bit-- > 0;) {
    r = r * r;
    if (boost::multiprecision::bit_test(e, static_cast<unsigned>(bit))) r = r * a;
  }
  return r;
}

FqElement FqContext::inverse(const FqElement& a) const {
  if (a.is_zero()) throw DomainError("inverse of zero");
  // Extended Euclid on (m, a): track s with s * a == r (mod m).
  Poly r0 = modulus_;
  Poly r1(a.c_.begin(), a.c_.end());
  trim(r1);
  Poly s0;
  Poly s1{1};
  while (!r1.empty()) {
    // Long division r0 = quot * r1 + rem.
    Poly rem = r0;
    trim(rem);
    Poly quot(rem.size() >= r1.size() ? rem.size() - r1.size() + 1 : 0, 0);
    const std::uint64_t lead_inv = invmod(r1.back(), p_);
    while (rem.size() >= r1.size()) {
      const std::uint64_t factor = mulmod(rem.back(), lead_inv, p_);
      const std::size_t shift = rem.size() - r1.size();
      quot[shift] = factor;
      for (std::size_t j = 0; j < r1.size(); ++j) {
        rem[shift + j] = (rem[shift + j] + p_ - mulmod(factor, r1[j], p_)) % p_;
      }
      trim(rem);
    }
    // s_next = s0 - quot * s1.
    Poly s_next(std::max(s0.size(), quot.size() + s1.size()), 0);
    std::copy(s0.begin(), s0.end(), s_next.begin());
    for (std::size_t i = 0; i < quot.size(); ++i) {
      for (std::size_t j = 0; j < s1.size(); ++j) {
        s_next[i + j] = (s_next[i + j] + p_ - mulmod(quot[i], s1[j], p_)) % p_;
      }
    }
    trim(s_next);
    r0 = std::move(r1);
    r1 = std::move(rem);
    s0 = std::move(s1);
    s1 = std::move(s_next);
  }
  if (r0.size() != 1) throw IntegrityError("modulus is not irreducible: non-unit gcd");
  const std::uint64_t scale = invmod(r0[0], p_);
  for (auto& c : s0) c = mulmod(c, scale, p_);
  s0 = poly_mod(std::move(s0), modulus_, p_);
  return element(std::move(s0));
}

FqElement FqContext::euler_criterion(const FqElement& a) const { return pow(a, (q_ - 1) / 2); }

// ---------------------------------------------------------------------------

std::shared_ptr<const FqContext> fq_with_modulus(std::uint64_t p, std::vector<std::uint64_t> modulus,
                                                 std::uint64_t seed) {
  check_characteristic(p);
  for (auto& c : modulus) c %= p;
  if (!is_irreducible(p, modulus)) throw DomainError("modulus is not irreducible");
  return std::shared_ptr<const FqContext>(new FqContext(p, std::move(modulus), seed, 1));
}

std::shared_ptr<const FqContext> fq_make(std::uint64_t p, int k, std::uint64_t seed) {
  check_characteristic(p);
  if (k < 1) throw DomainError("extension degree must be at least 1");
  if (k == 1) {
    return std::shared_ptr<const FqContext>(new FqContext(p, {0, 1}, seed, 1));
  }
  Rng rng(seed);
  for (int tries = 1;; ++tries) {
    std::vector<std::uint64_t> modulus(static_cast<std::size_t>(k) + 1);
    for (int j = 0; j < k; ++j) modulus[j] = rng.below(p);
    modulus[k] = 1;
    if (is_irreducible(p, modulus)) {
      return std::shared_ptr<const FqContext>(new FqContext(p, std::move(modulus), seed, tries));
    }
  }
}

std::optional<FqElement> sqrt_fq(const FqContext& ctx, const FqElement& a) {
  if (a.is_zero()) return ctx.zero();
  int m = ctx.two_adic_valuation();
  const FqElement w = ctx.half_odd_power(a);
  FqElement x = a * w;        // a^((t+1)/2)
  FqElement b = x * w;        // a^t
  FqElement c = ctx.two_sylow_generator();
  while (!b.is_one()) {
    int i = 0;
    FqElement probe = b;
    while (!probe.is_one()) {
      probe = probe * probe;
      if (++i == m) return std::nullopt;
    }
    FqElement t = c;
    for (int j = 0; j < m - i - 1; ++j) t = t * t;
    x = x * t;
    c = t * t;
    b = b * c;
    m = i;
  }
  FqElement neg = -x;
  return lex_less(neg, x) ? neg : x;
}

std::vector<FqElement> root_of_unity_tower(const FqContext& ctx, int exponent) {
  if (exponent < 1) throw DomainError("root_of_unity_tower needs E >= 1");
  const int s = ctx.two_adic_valuation();
  if (exponent > s) {
    throw UnavailableError("2^" + std::to_string(exponent) + " does not divide q - 1 (2-adic valuation " +
                           std::to_string(s) + ")");
  }
  FqElement top = ctx.two_sylow_generator();
  for (int j = s; j > exponent; --j) top = top * top;
  std::vector<FqElement> tower(static_cast<std::size_t>(exponent));
  tower[exponent - 1] = top;
  for (int j = exponent - 1; j >= 1; --j) tower[j - 1] = tower[j] * tower[j];
  return tower;
}

}  // namespace arbor
