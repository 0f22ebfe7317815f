#include "arbor/verify/oracles.hpp"

#include <algorithm>

#include "arbor/errors.hpp"

namespace arbor::oracle {

namespace {

__extension__ typedef unsigned __int128 u128;

bool parity_of(const TreeAutomorphism& sigma, const std::string& word) {
  return sigma.parity(NodeAddress::parse(word));
}

std::vector<std::string> w_strings(int r, int i) {
  std::vector<std::string> out;
  for (auto& w : all_words(r * i - 1)) {
    bool ok = true;
    for (std::size_t pos = 1; pos <= w.size(); ++pos) {
      if (pos % static_cast<std::size_t>(r) == 0 && w[pos - 1] != 'a') ok = false;
    }
    if (ok) out.push_back(std::move(w));
  }
  return out;
}

const FqElement& at(const PreimageTree& tree, const std::string& word) {
  return tree.value(NodeAddress::parse(word));
}

// f^m(0) in F_p.
std::uint64_t orbit_point(const PcfParameter& f, int m) {
  u128 z = 0;
  for (int s = 0; s < m; ++s) z = (z * z + f.c) % f.p;
  return static_cast<std::uint64_t>(z);
}

using RatPoly = std::vector<Rational>;  // constant term first

void trim(RatPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

RatPoly multiply(const RatPoly& a, const RatPoly& b) {
  RatPoly out(a.size() + b.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

RatPoly remainder(RatPoly a, const RatPoly& b) {
  trim(a);
  while (a.size() >= b.size() && !a.empty()) {
    const Rational factor = a.back() / b.back();
    const std::size_t shift = a.size() - b.size();
    for (std::size_t j = 0; j < b.size(); ++j) a[shift + j] -= factor * b[j];
    a.pop_back();
    trim(a);
  }
  return a;
}

Rational power(const Rational& base, std::size_t e) {
  Rational r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r;
}

// Res(A, B) by the Euclidean recursion
//   Res(A, B) = (-1)^(deg A deg B) lc(B)^(deg A - deg R) Res(B, R),  R = A mod B.
Rational resultant(RatPoly a, RatPoly b) {
  trim(a);
  trim(b);
  Rational scale = 1;
  for (;;) {
    if (a.empty() || b.empty()) return 0;
    const std::size_t da = a.size() - 1;
    const std::size_t db = b.size() - 1;
    if (db == 0) return scale * power(b[0], da);
    RatPoly rem = remainder(a, b);
    if (rem.empty()) return 0;
    const std::size_t dr = rem.size() - 1;
    if ((da * db) % 2 == 1) scale = -scale;
    scale *= power(b.back(), da - dr);
    a = std::move(b);
    b = std::move(rem);
  }
}

}  // namespace

std::vector<std::string> all_words(int len) {
  std::vector<std::string> out{""};
  for (int j = 0; j < len; ++j) {
    std::vector<std::string> next;
    next.reserve(out.size() * 2);
    for (const auto& w : out) {
      next.push_back(w + 'a');
      next.push_back(w + 'b');
    }
    out = std::move(next);
  }
  return out;
}

std::string apply_word(const TreeAutomorphism& sigma, const std::string& word) {
  std::string image;
  NodeAddress prefix = NodeAddress::root();
  for (const char s : word) {
    const bool flip = sigma.parity(prefix);
    image.push_back(flip ? (s == 'a' ? 'b' : 'a') : s);
    prefix = prefix.child(s == 'a' ? Symbol::a : Symbol::b);
  }
  return image;
}

std::vector<std::uint32_t> leaf_permutation(const TreeAutomorphism& sigma) {
  const int n = sigma.depth();
  std::vector<std::uint32_t> perm(std::size_t{1} << n);
  auto index = [](const std::string& w) {
    std::uint32_t v = 0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (w[j] == 'b') v |= std::uint32_t{1} << j;
    }
    return v;
  };
  for (const auto& w : all_words(n)) perm[index(w)] = index(apply_word(sigma, w));
  return perm;
}

std::int64_t q_definition(const TreeAutomorphism& sigma, const std::string& x, int r) {
  const int n = sigma.depth();
  std::int64_t total = 0;
  for (int i = 1;; ++i) {
    // The deepest node x w has length |x| + ri - 1; parities exist up to level n - 1.
    if (static_cast<int>(x.size()) + r * i - 1 > n - 1) break;
    std::int64_t count = 0;
    for (const auto& w : w_strings(r, i)) count += parity_of(sigma, x + w) ? 1 : 0;
    total += count * (std::int64_t{1} << i);
  }
  return total;
}

int exponent_definition(int m, int n, int r) {
  // Q(x s) at level m + 1 keeps the terms with m + 1 + ri - 1 <= n - 1.
  int i_max = 0;
  while (m + r * (i_max + 1) <= n - 1) ++i_max;
  return i_max + 1;
}

std::uint64_t p_definition(const TreeAutomorphism& sigma, const std::string& x, int r) {
  const int e = exponent_definition(static_cast<int>(x.size()), sigma.depth(), r);
  const std::int64_t v = (parity_of(sigma, x) ? -1 : 1) + q_definition(sigma, x + 'b', r) -
                         q_definition(sigma, x + 'a', r);
  const std::int64_t mod = std::int64_t{1} << e;
  return static_cast<std::uint64_t>(((v % mod) + mod) % mod);
}

bool in_b_prime(const TreeAutomorphism& sigma, int r) {
  for (int level = 0; level < sigma.depth(); ++level) {
    for (const auto& x : all_words(level)) {
      if (p_definition(sigma, x, r) != 1) return false;
    }
  }
  return true;
}

bool in_m_prime(const TreeAutomorphism& sigma, int r) {
  struct Entry {
    std::uint64_t value;
    int exponent;
  };
  std::vector<Entry> entries;
  for (int level = 0; level < sigma.depth(); ++level) {
    for (const auto& x : all_words(level)) {
      entries.push_back({p_definition(sigma, x, r), exponent_definition(level, sigma.depth(), r)});
    }
  }
  for (const auto& u : entries) {
    for (const auto& v : entries) {
      const std::uint64_t m = (std::uint64_t{1} << std::min(u.exponent, v.exponent)) - 1;
      if ((u.value & m) != (v.value & m)) return false;
    }
  }
  return true;
}

std::uint64_t count_roots(std::uint64_t p, std::span<const std::uint64_t> monic) {
  std::uint64_t roots = 0;
  for (std::uint64_t z = 0; z < p; ++z) {
    u128 acc = 0;
    for (std::size_t j = monic.size(); j-- > 0;) acc = (acc * z + monic[j]) % p;
    if (acc == 0) ++roots;
  }
  return roots;
}

std::size_t structural_failures(const PreimageTree& tree) {
  std::size_t failures = 0;
  const FqElement c = tree.field().from_int(static_cast<std::int64_t>(tree.parameter().c));
  if (tree.value(NodeAddress::root()) != tree.field().from_int(static_cast<std::int64_t>(tree.x0()))) ++failures;
  for (int level = 1; level <= tree.depth(); ++level) {
    std::vector<std::vector<std::uint64_t>> seen;
    for (const auto& w : all_words(level)) {
      const FqElement& v = at(tree, w);
      if (v * v + c != at(tree, w.substr(0, w.size() - 1))) ++failures;
      if (w.back() == 'a' && v != -at(tree, w.substr(0, w.size() - 1) + 'b')) ++failures;
      seen.emplace_back(v.coeffs().begin(), v.coeffs().end());
    }
    std::sort(seen.begin(), seen.end());
    failures += static_cast<std::size_t>(seen.end() - std::unique(seen.begin(), seen.end()));
  }
  return failures;
}

std::size_t product_identity_failures(const PreimageTree& tree, std::size_t* checks) {
  std::size_t failures = 0;
  std::size_t count = 0;
  const FqContext& ctx = tree.field();
  const auto& f = tree.parameter();
  for (int level = 0; level < tree.depth(); ++level) {
    for (const auto& y : all_words(level)) {
      for (int m = 1; level + m <= tree.depth(); ++m) {
        FqElement half = ctx.one();
        for (const auto& w : all_words(m - 1)) half = half * at(tree, y + w + 'a');
        const FqElement expected =
            m == 1 ? at(tree, y) - ctx.from_int(static_cast<std::int64_t>(f.c))
                   : ctx.from_int(static_cast<std::int64_t>(orbit_point(f, m))) - at(tree, y);
        ++count;
        if (half * half != expected) ++failures;
      }
    }
  }
  if (checks) *checks = count;
  return failures;
}

std::size_t gamma_chain_failures(const PreimageTree& tree, std::size_t* checks) {
  std::size_t failures = 0;
  std::size_t count = 0;
  const FqContext& ctx = tree.field();
  const int r = tree.parameter().r;
  const FqElement minus_one = -ctx.one();
  for (int level = 0; level < tree.depth(); ++level) {
    const int j_max = (tree.depth() - level - 1) / r + 1;
    for (const auto& x : all_words(level)) {
      FqElement previous = at(tree, x + 'a') * ctx.inverse(at(tree, x + 'b'));
      ++count;
      if (previous != minus_one) ++failures;
      for (int j = 2; j <= j_max; ++j) {
        FqElement num = ctx.one();
        FqElement den = ctx.one();
        for (const auto& w : w_strings(r, j - 1)) {
          num = num * at(tree, x + 'a' + w + 'a');
          den = den * at(tree, x + 'b' + w + 'a');
        }
        const FqElement gamma = num * ctx.inverse(den);
        FqElement probe = gamma;
        for (int s = 1; s < j; ++s) probe = probe * probe;
        ++count;
        if (gamma * gamma != previous || probe != minus_one) ++failures;
        previous = gamma;
      }
    }
  }
  if (checks) *checks = count;
  return failures;
}

std::size_t perprod_failures(const PreimageTree& tree, std::size_t* checks) {
  std::size_t failures = 0;
  std::size_t count = 0;
  const FqContext& ctx = tree.field();
  const int r = tree.parameter().r;
  const auto& tower = tree.tower();
  // The tower itself: zeta_2 = -1, zeta_{2^j}^2 = zeta_{2^(j-1)}.
  if (tower.empty() || tower[0] != -ctx.one()) ++failures;
  for (std::size_t j = 1; j < tower.size(); ++j) {
    if (tower[j] * tower[j] != tower[j - 1]) ++failures;
  }
  for (int level = 0; level < tree.depth(); ++level) {
    for (const auto& x : all_words(level)) {
      for (int i = 1; level + r * i + 1 <= tree.depth(); ++i) {
        ++count;
        if (static_cast<std::size_t>(i) >= tower.size()) {
          ++failures;
          continue;
        }
        FqElement num = ctx.one();
        FqElement den = ctx.one();
        for (const auto& w : w_strings(r, i)) {
          num = num * at(tree, x + 'a' + w + 'a');
          den = den * at(tree, x + 'b' + w + 'a');
        }
        if (num * ctx.inverse(den) != tower[i]) ++failures;
      }
    }
  }
  if (checks) *checks = count;
  return failures;
}

bool is_rational_square(const Rational& q) {
  if (q < 0) return false;
  if (q == 0) return true;
  const BigInt num = boost::multiprecision::numerator(q);
  const BigInt den = boost::multiprecision::denominator(q);
  const BigInt a = boost::multiprecision::sqrt(num);
  const BigInt b = boost::multiprecision::sqrt(den);
  return a * a == num && b * b == den;
}

bool subset_dependent(std::span<const Rational> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << i); ++mask) {
      Rational prod = values[i];
      for (std::size_t j = 0; j < i; ++j) {
        if ((mask >> j) & 1u) prod *= values[j];
      }
      if (is_rational_square(prod)) return true;
    }
  }
  return false;
}

Rational iterate_discriminant(const Rational& c, const Rational& x0, int i) {
  if (i < 1) throw DomainError("iterate_discriminant needs i >= 1");
  RatPoly g{Rational(0), Rational(1)};  // z
  for (int k = 0; k < i; ++k) {
    g = multiply(g, g);
    g[0] += c;
  }
  g[0] -= x0;
  RatPoly dg(g.size() - 1);
  for (std::size_t j = 1; j < g.size(); ++j) dg[j - 1] = g[j] * static_cast<long long>(j);
  const std::size_t d = g.size() - 1;
  Rational res = resultant(g, dg);
  return (d * (d - 1) / 2) % 2 == 1 ? Rational(-res) : res;
}

}  // namespace arbor::oracle
