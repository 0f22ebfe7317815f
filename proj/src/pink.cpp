#include "arbor/pink.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <string>

#include "arbor/errors.hpp"
#include "arbor/parallel.hpp"
#include "arbor/parity.hpp"

namespace arbor {

namespace {

// Lexicographic on words, most significant word first: the canonical order.
bool key_less(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Insertion-ordered set of fixed-width keys with open addressing.
class ElementTable {
 public:
  explicit ElementTable(std::size_t stride) : stride_(stride), slots_(1024, 0) {}

  std::size_t size() const noexcept { return count_; }

  std::span<const std::uint64_t> at(std::size_t index) const {
    return {words_.data() + index * stride_, stride_};
  }

  bool insert(std::span<const std::uint64_t> key) {
    if (4 * (count_ + 1) > 3 * slots_.size()) grow();
    std::size_t h = hash(key) & (slots_.size() - 1);
    while (slots_[h] != 0) {
      if (std::equal(key.begin(), key.end(), at(slots_[h] - 1).begin())) return false;
      h = (h + 1) & (slots_.size() - 1);
    }
    words_.insert(words_.end(), key.begin(), key.end());
    slots_[h] = static_cast<std::uint32_t>(++count_);
    return true;
  }

  std::vector<std::uint64_t> sorted_words() const {
    std::vector<std::uint32_t> order(count_);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return key_less(at(a), at(b)); });
    std::vector<std::uint64_t> out;
    out.reserve(words_.size());
    for (std::uint32_t i : order) {
      auto k = at(i);
      out.insert(out.end(), k.begin(), k.end());
    }
    return out;
  }

 private:
  std::uint64_t hash(std::span<const std::uint64_t> key) const {
    std::uint64_t h = 0;
    for (std::uint64_t w : key) h = mix(h ^ w);
    return h;
  }

  void grow() {
    std::vector<std::uint32_t> bigger(2 * slots_.size(), 0);
    for (std::size_t i = 0; i < count_; ++i) {
      std::size_t h = hash(at(i)) & (bigger.size() - 1);
      while (bigger[h] != 0) h = (h + 1) & (bigger.size() - 1);
      bigger[h] = static_cast<std::uint32_t>(i + 1);
    }
    slots_ = std::move(bigger);
  }

  std::size_t stride_;
  std::size_t count_ = 0;
  std::vector<std::uint64_t> words_;
  std::vector<std::uint32_t> slots_;
};

template <class Predicate>
FiniteGroup scan_all(int r, int n, Predicate keep) {
  if (r < 1) throw DomainError("r must be at least 1");
  check_depth(n);
  if (n > kEnumerationMaxDepth) {
    throw CapExceeded("exhaustive scan is limited to depth " +
                          std::to_string(kEnumerationMaxDepth),
                      0);
  }
  const std::uint64_t candidates = std::uint64_t{1} << ((1u << n) - 1);
  std::vector<char> member(candidates, 0);
  parallel_for(candidates, [&](std::size_t mask) {
    const auto sigma = TreeAutomorphism::from_words(n, {mask});
    member[mask] = keep(sigma) ? 1 : 0;
  });
  std::vector<std::uint64_t> words;
  for (std::uint64_t mask = 0; mask < candidates; ++mask) {
    if (member[mask]) words.push_back(mask);
  }
  return FiniteGroup(n, std::move(words));
}

}  // namespace

TreeAutomorphism alpha_generator(int i, int r, int n) {
  if (r < 1) throw DomainError("r must be at least 1");
  if (i < 1 || i > r) {
    throw DomainError("alpha_generator: index " + std::to_string(i) + " outside [1, " +
                      std::to_string(r) + "]");
  }
  check_depth(n);
  TreeAutomorphism alpha(n);
  // a^(i-1) followed by m copies of b a^(r-1); the b's sit at positions i + k r.
  std::uint32_t path = 0;
  for (int level = i - 1; level < n; level += r) {
    alpha.set_parity(NodeAddress{level, path}, true);
    path |= std::uint32_t{1} << level;
  }
  return alpha;
}

GeneratorSet GeneratorSet::pink(int r, int n) {
  GeneratorSet gens{r, n, {}};
  for (int i = 1; i <= r; ++i) gens.elements.push_back(alpha_generator(i, r, n));
  return gens;
}

FiniteGroup::FiniteGroup(int depth, std::vector<std::uint64_t> sorted_words)
    : depth_(depth), stride_(detail::words_for_depth(depth)), words_(std::move(sorted_words)) {
  check_depth(depth);
  if (words_.size() % stride_ != 0) throw DomainError("group storage is not a whole number of elements");
  count_ = words_.size() / stride_;
}

TreeAutomorphism FiniteGroup::element(std::size_t index) const {
  if (index >= count_) throw DomainError("group element index out of range");
  auto k = key(index);
  return TreeAutomorphism::from_words(depth_, {k.begin(), k.end()});
}

std::vector<TreeAutomorphism> FiniteGroup::elements() const {
  std::vector<TreeAutomorphism> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < count_; ++i) out.push_back(element(i));
  return out;
}

bool FiniteGroup::contains(const TreeAutomorphism& sigma) const {
  if (sigma.depth() != depth_) return false;
  std::size_t lo = 0;
  std::size_t hi = count_;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (key_less(key(mid), sigma.words())) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo < count_ && std::ranges::equal(key(lo), sigma.words());
}

FiniteGroup closure(const GeneratorSet& gens, std::uint64_t cap) {
  if (cap < 1) throw DomainError("closure cap must be at least 1");
  const int n = gens.depth;
  check_depth(n);
  for (const auto& g : gens.elements) {
    if (g.depth() != n) throw DomainError("closure: generator depth mismatch");
  }
  const std::size_t stride = detail::words_for_depth(n);
  ElementTable table(stride);
  table.insert(TreeAutomorphism(n).words());
  std::vector<std::uint64_t> current(stride);
  std::vector<std::uint64_t> product(stride);
  detail::ComposeScratch scratch;
  for (std::size_t index = 0; index < table.size(); ++index) {
    auto element = table.at(index);
    std::copy(element.begin(), element.end(), current.begin());
    for (const auto& g : gens.elements) {
      detail::compose_words(n, g.words(), current, product, scratch);
      if (table.insert(product) && table.size() > cap) {
        throw CapExceeded("closure exceeded cap of " + std::to_string(cap) + " elements",
                          table.size());
      }
    }
  }
  return FiniteGroup(n, table.sorted_words());
}

std::int64_t log2_order_pink(int r, int n) {
  if (r < 1 || n < 1) throw DomainError("log2_order_pink needs r, n >= 1");
  if (n > 62) throw DomainError("log2_order_pink: n too large for 64-bit arithmetic");
  std::int64_t value = (std::int64_t{1} << n) - 1;
  for (int m = 0; m < n; ++m) value -= (std::int64_t{1} << (n - 1 - m)) * (m / r);
  return value;
}

std::int64_t log2_order_s(int r, int n) {
  if (r < 1) throw DomainError("r must be at least 1");
  if (n < 2) throw DomainError("log2_order_s needs n >= 2");
  if (n > 62) throw DomainError("log2_order_s: n too large for 64-bit arithmetic");
  std::int64_t value = std::int64_t{1} << (n - 1);
  for (int i = 1; i <= (n - 1) / r; ++i) value -= std::int64_t{1} << (n - 1 - i * r);
  return value;
}

FiniteGroup enumerate_b_prime(int r, int n) {
  return scan_all(r, n, [r](const TreeAutomorphism& s) { return in_b_prime(s, r); });
}

FiniteGroup enumerate_m_prime(int r, int n) {
  return scan_all(r, n, [r](const TreeAutomorphism& s) { return in_m_prime(s, r); });
}

std::vector<OrderRow> orders_table(std::span<const int> rs, std::span<const int> ns,
                                   std::uint64_t bfs_cap) {
  std::vector<OrderRow> rows;
  for (int r : rs) {
    for (int n : ns) {
      OrderRow row;
      row.r = r;
      row.n = n;
      row.log2_formula = log2_order_pink(r, n);
      const bool fits = row.log2_formula < 63 &&
                        (std::uint64_t{1} << row.log2_formula) <= bfs_cap;
      if (fits) {
        row.bfs_order = closure(GeneratorSet::pink(r, n), bfs_cap).order();
      } else {
        row.bfs_capped = true;
      }
      if (n <= kEnumerationMaxDepth) row.bprime_count = enumerate_b_prime(r, n).order();
      const std::uint64_t expected =
          row.log2_formula < 63 ? std::uint64_t{1} << row.log2_formula : 0;
      row.match = (!row.bfs_order || *row.bfs_order == expected) &&
                  (!row.bprime_count || *row.bprime_count == expected);
      rows.push_back(row);
    }
  }
  return rows;
}

void write_orders_csv(std::ostream& out, std::span<const OrderRow> rows) {
  out << "r,n,log2_formula,bfs_order,bprime_count,match_flag\n";
  for (const auto& row : rows) {
    out << row.r << ',' << row.n << ',' << row.log2_formula << ',';
    if (row.bfs_order) {
      out << *row.bfs_order;
    } else if (row.bfs_capped) {
      out << "capped";
    }
    out << ',';
    if (row.bprime_count) out << *row.bprime_count;
    out << ',' << (row.match ? "true" : "false") << '\n';
  }
}

}  // namespace arbor
