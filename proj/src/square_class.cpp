#include "arbor/square_class.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <limits>

#include <boost/multiprecision/miller_rabin.hpp>

#include "arbor/errors.hpp"

namespace arbor {

namespace {

using boost::multiprecision::numerator;
using boost::multiprecision::denominator;

// Below this a cofactor free of primes up to kTrialDivisionBound is prime.
const BigInt kCertainPrimeBound = BigInt(kTrialDivisionBound) * kTrialDivisionBound;
constexpr unsigned kMillerRabinRounds = 32;

const std::vector<std::uint32_t>& small_primes() {
  static const std::vector<std::uint32_t> primes = [] {
    std::vector<bool> composite(kTrialDivisionBound + 1, false);
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 2; i <= kTrialDivisionBound; ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (std::uint64_t j = std::uint64_t{i} * i; j <= kTrialDivisionBound; j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

bool is_prime_cofactor(const BigInt& m) {
  return m < kCertainPrimeBound || boost::multiprecision::miller_rabin_test(m, kMillerRabinRounds);
}

// Appends the primes dividing n > 0 to an odd power.
void odd_primes(BigInt n, std::vector<BigInt>& out) {
  const auto& primes = small_primes();
  std::size_t index = 0;
  bool exhausted = true;
  // Multi-limb phase, until n fits a machine word.
  for (; index < primes.size() && n > std::numeric_limits<std::uint64_t>::max(); ++index) {
    const std::uint32_t p = primes[index];
    if (BigInt(p) * p > n) {
      exhausted = false;
      break;
    }
    if (static_cast<std::uint32_t>(n % p) != 0) continue;
    int e = 0;
    while (static_cast<std::uint32_t>(n % p) == 0) {
      n /= p;
      ++e;
    }
    if (e % 2 == 1) out.emplace_back(p);
  }
  if (exhausted && n <= std::numeric_limits<std::uint64_t>::max()) {
    auto m = static_cast<std::uint64_t>(n);
    for (; index < primes.size(); ++index) {
      const std::uint64_t p = primes[index];
      if (p * p > m) {
        exhausted = false;
        break;
      }
      if (m % p != 0) continue;
      int e = 0;
      while (m % p == 0) {
        m /= p;
        ++e;
      }
      if (e % 2 == 1) out.emplace_back(p);
    }
    n = m;
  }
  if (n == 1) return;
  if (!exhausted || is_prime_cofactor(n)) {
    out.push_back(n);
    return;
  }
  const BigInt root = boost::multiprecision::sqrt(n);
  if (root * root == n && is_prime_cofactor(root)) return;
  throw UnfactoredError("cannot factor " + n.str() + " by trial division up to " +
                        std::to_string(kTrialDivisionBound));
}

// Exact period of 0 under z^2 + c over Q, or 0 when not periodic within `limit` steps.
int rational_period(const Rational& c, int limit) {
  Rational z = 0;
  for (int s = 1; s <= limit; ++s) {
    z = z * z + c;
    if (z == 0) return s;
  }
  return 0;
}

bool is_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isdigit(ch); });
}

}  // namespace

std::string SquareClass::to_string() const {
  if (is_trivial()) return "1";
  std::string out = negative ? "-1" : "";
  for (const auto& p : primes) {
    if (!out.empty()) out += '*';
    out += p.str();
  }
  return out;
}

SquareClass operator*(const SquareClass& lhs, const SquareClass& rhs) {
  SquareClass out;
  out.negative = lhs.negative != rhs.negative;
  std::set_symmetric_difference(lhs.primes.begin(), lhs.primes.end(), rhs.primes.begin(),
                                rhs.primes.end(), std::back_inserter(out.primes));
  return out;
}

SquareClass square_class(const Rational& q) {
  if (q == 0) throw DomainError("square class of zero");
  SquareClass out;
  out.negative = q < 0;
  // num * den has the same class as num / den.
  odd_primes(boost::multiprecision::abs(numerator(q)), out.primes);
  odd_primes(denominator(q), out.primes);
  std::sort(out.primes.begin(), out.primes.end());
  return out;
}

Rational parse_rational(const std::string& text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  const auto slash = s.find('/');
  const std::string_view num = s.substr(0, slash);
  const std::string_view den = slash == std::string_view::npos ? "1" : s.substr(slash + 1);
  if (!is_digits(num) || !is_digits(den)) throw DomainError("not a rational number: '" + text + "'");
  const BigInt d{std::string(den)};
  if (d == 0) throw DomainError("zero denominator in '" + text + "'");
  Rational q(BigInt{std::string(num)}, d);
  return negative ? Rational(-q) : q;
}

std::string to_string(const Rational& q) { return q.str(); }

std::vector<Rational> disc_sequence(const Rational& c, const Rational& x0, int count) {
  if (count < 0) throw DomainError("disc_sequence: negative count");
  std::vector<Rational> out;
  Rational orbit = 0;
  for (int i = 1; i <= count; ++i) {
    orbit = orbit * orbit + c;
    Rational d = i == 1 ? Rational(x0 - c) : Rational(orbit - x0);
    if (d == 0) {
      throw DomainError("D_" + std::to_string(i) + " = 0: x0 lies in the forward orbit of 0");
    }
    out.push_back(std::move(d));
  }
  return out;
}

IndependenceResult square_class_independence(std::span<const Rational> values) {
  std::vector<SquareClass> classes;
  classes.reserve(values.size());
  for (const auto& q : values) classes.push_back(square_class(q));

  // Coordinates: bit 0 is the sign, then one bit per distinct prime.
  std::vector<BigInt> basis;
  for (const auto& cls : classes) basis.insert(basis.end(), cls.primes.begin(), cls.primes.end());
  std::sort(basis.begin(), basis.end());
  basis.erase(std::unique(basis.begin(), basis.end()), basis.end());
  const std::size_t dim = basis.size() + 1;
  const std::size_t count = values.size();
  auto words = [](std::size_t bits) { return (bits + 63) / 64; };

  struct Row {
    std::vector<std::uint64_t> vec;
    std::vector<std::uint64_t> combo;  // which inputs were summed into vec
  };
  std::vector<Row> pivots;             // pivots[j] has leading bit pivot_bit[j]
  std::vector<std::size_t> pivot_bit;
  IndependenceResult result;

  for (std::size_t i = 0; i < count; ++i) {
    Row row{std::vector<std::uint64_t>(words(dim), 0), std::vector<std::uint64_t>(words(count), 0)};
    if (classes[i].negative) row.vec[0] |= 1u;
    for (const auto& p : classes[i].primes) {
      const auto bit = static_cast<std::size_t>(std::lower_bound(basis.begin(), basis.end(), p) - basis.begin()) + 1;
      row.vec[bit / 64] |= std::uint64_t{1} << (bit % 64);
    }
    row.combo[i / 64] |= std::uint64_t{1} << (i % 64);
    for (std::size_t j = 0; j < pivots.size(); ++j) {
      const std::size_t b = pivot_bit[j];
      if ((row.vec[b / 64] >> (b % 64)) & 1u) {
        for (std::size_t w = 0; w < row.vec.size(); ++w) row.vec[w] ^= pivots[j].vec[w];
        for (std::size_t w = 0; w < row.combo.size(); ++w) row.combo[w] ^= pivots[j].combo[w];
      }
    }
    std::size_t lead = dim;
    for (std::size_t b = 0; b < dim; ++b) {
      if ((row.vec[b / 64] >> (b % 64)) & 1u) {
        lead = b;
        break;
      }
    }
    if (lead == dim) {
      std::vector<int> relation;
      for (std::size_t k = 0; k < count; ++k) {
        if ((row.combo[k / 64] >> (k % 64)) & 1u) relation.push_back(static_cast<int>(k));
      }
      result.dependencies.push_back(std::move(relation));
      continue;
    }
    // Keep the pivot rows reduced against each other at their leading bits.
    for (std::size_t j = 0; j < pivots.size(); ++j) {
      if ((pivots[j].vec[lead / 64] >> (lead % 64)) & 1u) {
        for (std::size_t w = 0; w < row.vec.size(); ++w) pivots[j].vec[w] ^= row.vec[w];
        for (std::size_t w = 0; w < row.combo.size(); ++w) pivots[j].combo[w] ^= row.combo[w];
      }
    }
    pivots.push_back(std::move(row));
    pivot_bit.push_back(lead);
  }
  result.rank = static_cast<int>(pivots.size());
  result.independent = result.dependencies.empty();
  return result;
}

ConditionVerdict check_condition_one(const Rational& c, const Rational& x0, int r) {
  if (r < 1) throw DomainError("period must be at least 1");
  if (r >= 3) throw UnsupportedError("no rational c gives 0 exact period " + std::to_string(r));
  if (rational_period(c, r) != r) {
    throw ContractError("0 does not have exact period " + std::to_string(r) + " under z^2 + " + to_string(c));
  }
  std::vector<Rational> values{Rational(-1), Rational(2)};
  ConditionVerdict verdict;
  verdict.labels = {"-1", "2"};
  const auto d = disc_sequence(c, x0, r);
  for (int i = 0; i < r; ++i) {
    values.push_back(d[i]);
    verdict.labels.push_back("D" + std::to_string(i + 1));
  }
  const auto result = square_class_independence(values);
  verdict.condition = result.independent;
  verdict.rank = result.rank;
  verdict.dependencies = result.dependencies;
  return verdict;
}

ConditionVerdict check_aut_tn(const Rational& c, const Rational& x0, int n) {
  if (n < 1) throw DomainError("check_aut_tn needs n >= 1");
  const auto d = disc_sequence(c, x0, n);
  ConditionVerdict verdict;
  for (int i = 1; i <= n; ++i) verdict.labels.push_back("D" + std::to_string(i));
  const auto result = square_class_independence(d);
  verdict.condition = result.independent;
  verdict.rank = result.rank;
  verdict.dependencies = result.dependencies;
  return verdict;
}

}  // namespace arbor
