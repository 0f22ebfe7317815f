#include "arbor/tree.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "arbor/errors.hpp"
#include "arbor/random.hpp"

namespace arbor {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Zeroes the bits past the last node so equal automorphisms have equal words.
void mask_tail(int depth, std::vector<std::uint64_t>& words) {
  const std::size_t nodes = (std::size_t{1} << depth) - 1;
  const std::size_t used = nodes & 63;
  if (used != 0) words.back() &= (std::uint64_t{1} << used) - 1;
}

}  // namespace

void check_depth(int n) {
  if (n < 1 || n > kMaxDepth) {
    throw DomainError("tree depth " + std::to_string(n) + " outside [1, " +
                      std::to_string(kMaxDepth) + "]");
  }
}

// ---------------------------------------------------------------------------
// NodeAddress

NodeAddress NodeAddress::from_flat(std::size_t flat_id) {
  const int level = std::bit_width(flat_id + 1) - 1;
  return {level, static_cast<std::uint32_t>(flat_id + 1 - (std::size_t{1} << level))};
}

NodeAddress NodeAddress::parse(std::string_view word) {
  if (word == "()") return root();
  if (word.size() > static_cast<std::size_t>(kMaxDepth)) {
    throw DomainError("word longer than the maximum depth");
  }
  NodeAddress x;
  for (char ch : word) {
    if (ch == 'a') {
      x = x.child(Symbol::a);
    } else if (ch == 'b') {
      x = x.child(Symbol::b);
    } else {
      throw DomainError(std::string("invalid symbol '") + ch + "' in word");
    }
  }
  return x;
}

std::string NodeAddress::to_string() const {
  std::string s;
  s.reserve(static_cast<std::size_t>(level));
  for (int j = 1; j <= level; ++j) s.push_back(symbol(j) == Symbol::a ? 'a' : 'b');
  return s;
}

// ---------------------------------------------------------------------------
// TreeAutomorphism

TreeAutomorphism::TreeAutomorphism(int depth) : depth_(depth) {
  check_depth(depth);
  words_.assign(detail::words_for_depth(depth), 0);
}

TreeAutomorphism TreeAutomorphism::from_words(int depth, std::vector<std::uint64_t> words) {
  check_depth(depth);
  if (words.size() != detail::words_for_depth(depth)) {
    throw DomainError("parity word count does not match depth");
  }
  TreeAutomorphism sigma(depth);
  mask_tail(depth, words);
  sigma.words_ = std::move(words);
  return sigma;
}

TreeAutomorphism TreeAutomorphism::from_bits(int depth, const std::vector<bool>& bits) {
  TreeAutomorphism sigma(depth);
  if (bits.size() != sigma.node_count()) {
    throw DomainError("parity bit count does not match depth");
  }
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) sigma.words_[i >> 6] |= std::uint64_t{1} << (i & 63);
  }
  return sigma;
}

TreeAutomorphism TreeAutomorphism::from_hex(std::string_view hex) {
  if (hex.size() < 2 || hex.size() % 2 != 0) {
    throw DomainError("automorphism hex must have an even number of digits");
  }
  std::vector<std::uint8_t> bytes(hex.size() / 2);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw DomainError("invalid hex digit in automorphism");
    bytes[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  const int depth = bytes[0];
  check_depth(depth);
  TreeAutomorphism sigma(depth);
  const std::size_t nodes = sigma.node_count();
  if (bytes.size() != 1 + (nodes + 7) / 8) {
    throw DomainError("automorphism hex length does not match its depth byte");
  }
  for (std::size_t i = 0; i < nodes; ++i) {
    if ((bytes[1 + i / 8] >> (i % 8)) & 1u) sigma.set_parity_at(i, true);
  }
  for (std::size_t i = nodes; i < 8 * (bytes.size() - 1); ++i) {
    if ((bytes[1 + i / 8] >> (i % 8)) & 1u) {
      throw DomainError("automorphism hex has bits set beyond the last node");
    }
  }
  return sigma;
}

bool TreeAutomorphism::parity(NodeAddress x) const {
  if (x.level < 0 || x.level >= depth_) {
    throw DomainError("parity requested at level " + std::to_string(x.level) +
                      " of a depth-" + std::to_string(depth_) + " automorphism");
  }
  return parity_at(x.flat_id());
}

void TreeAutomorphism::set_parity_at(std::size_t flat_id, bool value) noexcept {
  const std::uint64_t bit = std::uint64_t{1} << (flat_id & 63);
  if (value) {
    words_[flat_id >> 6] |= bit;
  } else {
    words_[flat_id >> 6] &= ~bit;
  }
}

void TreeAutomorphism::set_parity(NodeAddress x, bool value) {
  if (x.level < 0 || x.level >= depth_) throw DomainError("node outside parity levels");
  set_parity_at(x.flat_id(), value);
}

void TreeAutomorphism::flip_parity(NodeAddress x) { set_parity(x, !parity(x)); }

NodeAddress TreeAutomorphism::apply(NodeAddress w) const {
  if (w.level < 0 || w.level > depth_) {
    throw DomainError("word of length " + std::to_string(w.level) +
                      " exceeds automorphism depth " + std::to_string(depth_));
  }
  NodeAddress source;
  NodeAddress image;
  for (int j = 1; j <= w.level; ++j) {
    const auto s = static_cast<std::uint32_t>(w.symbol(j));
    const auto flip = static_cast<std::uint32_t>(parity_at(source.flat_id()));
    image = image.child(static_cast<Symbol>(s ^ flip));
    source = source.child(static_cast<Symbol>(s));
  }
  return image;
}

std::vector<std::uint32_t> TreeAutomorphism::level_images(int m) const {
  if (m < 0 || m > depth_) throw DomainError("level outside the tree");
  std::vector<std::uint32_t> images{0};
  for (int level = 0; level < m; ++level) {
    const std::size_t width = std::size_t{1} << level;
    std::vector<std::uint32_t> next(2 * width);
    for (std::size_t path = 0; path < width; ++path) {
      const std::uint32_t flip = parity_at(width - 1 + path);
      for (std::uint32_t s = 0; s < 2; ++s) {
        next[path + s * width] = images[path] + ((s ^ flip) << level);
      }
    }
    images = std::move(next);
  }
  return images;
}

bool TreeAutomorphism::is_identity() const noexcept {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

std::size_t TreeAutomorphism::popcount() const noexcept {
  std::size_t total = 0;
  for (std::uint64_t w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

std::string TreeAutomorphism::to_hex() const {
  const std::size_t nodes = node_count();
  std::vector<std::uint8_t> bytes(1 + (nodes + 7) / 8, 0);
  bytes[0] = static_cast<std::uint8_t>(depth_);
  for (std::size_t i = 0; i < nodes; ++i) {
    if (parity_at(i)) bytes[1 + i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  std::string out;
  out.reserve(2 * bytes.size());
  for (std::uint8_t b : bytes) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 15]);
  }
  return out;
}

std::strong_ordering operator<=>(const TreeAutomorphism& lhs,
                                 const TreeAutomorphism& rhs) noexcept {
  if (auto c = lhs.depth_ <=> rhs.depth_; c != 0) return c;
  for (std::size_t i = lhs.words_.size(); i-- > 0;) {
    if (auto c = lhs.words_[i] <=> rhs.words_[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// group operations

namespace detail {

void compose_words(int depth, std::span<const std::uint64_t> sigma,
                   std::span<const std::uint64_t> tau, std::span<std::uint64_t> out,
                   ComposeScratch& scratch) {
  // Par(sigma tau, x) = Par(sigma, tau(x)) XOR Par(tau, x), with tau(x)
  // carried level by level.
  std::fill(out.begin(), out.end(), 0);
  auto bit = [](std::span<const std::uint64_t> w, std::size_t i) -> std::uint32_t {
    return (w[i >> 6] >> (i & 63)) & 1u;
  };
  auto& images = scratch.current;
  auto& next = scratch.next;
  images.assign(1, 0);
  for (int level = 0; level < depth; ++level) {
    const std::size_t width = std::size_t{1} << level;
    const std::size_t base = width - 1;
    next.resize(2 * width);
    for (std::size_t path = 0; path < width; ++path) {
      const std::uint32_t image = images[path];
      const std::uint32_t t = bit(tau, base + path);
      const std::uint32_t p = bit(sigma, base + image) ^ t;
      const std::size_t id = base + path;
      out[id >> 6] |= std::uint64_t{p} << (id & 63);
      next[path] = image + (t << level);
      next[path + width] = image + ((1u ^ t) << level);
    }
    images.swap(next);
  }
}

}  // namespace detail

TreeAutomorphism compose(const TreeAutomorphism& sigma, const TreeAutomorphism& tau) {
  if (sigma.depth() != tau.depth()) {
    throw DomainError("compose: depth mismatch (" + std::to_string(sigma.depth()) + " vs " +
                      std::to_string(tau.depth()) + ")");
  }
  std::vector<std::uint64_t> out(sigma.words().size());
  detail::ComposeScratch scratch;
  detail::compose_words(sigma.depth(), sigma.words(), tau.words(), out, scratch);
  return TreeAutomorphism::from_words(sigma.depth(), std::move(out));
}

TreeAutomorphism invert(const TreeAutomorphism& sigma) {
  // Par(sigma^-1, sigma(y)) = Par(sigma, y).
  const int n = sigma.depth();
  TreeAutomorphism inverse(n);
  std::vector<std::uint32_t> images{0};
  for (int level = 0; level < n; ++level) {
    const std::size_t width = std::size_t{1} << level;
    const std::size_t base = width - 1;
    std::vector<std::uint32_t> next(2 * width);
    for (std::size_t path = 0; path < width; ++path) {
      const bool flip = sigma.parity_at(base + path);
      inverse.set_parity_at(base + images[path], flip);
      const std::uint32_t f = flip ? 1u : 0u;
      next[path] = images[path] + (f << level);
      next[path + width] = images[path] + ((1u ^ f) << level);
    }
    images = std::move(next);
  }
  return inverse;
}

TreeAutomorphism restrict(const TreeAutomorphism& sigma, int m) {
  if (m < 1 || m > sigma.depth()) {
    throw DomainError("restrict: level " + std::to_string(m) + " outside [1, " +
                      std::to_string(sigma.depth()) + "]");
  }
  TreeAutomorphism out(m);
  const std::size_t nodes = out.node_count();
  for (std::size_t i = 0; i < nodes; ++i) {
    if (sigma.parity_at(i)) out.set_parity_at(i, true);
  }
  return out;
}

TreeAutomorphism power(const TreeAutomorphism& sigma, std::uint64_t e) {
  TreeAutomorphism result(sigma.depth());
  TreeAutomorphism base = sigma;
  while (e != 0) {
    if (e & 1u) result = compose(result, base);
    e >>= 1;
    if (e != 0) base = compose(base, base);
  }
  return result;
}

TreeAutomorphism random_automorphism(int n, std::uint64_t seed) {
  check_depth(n);
  Rng rng(seed);
  std::vector<std::uint64_t> words(detail::words_for_depth(n));
  for (auto& w : words) w = rng.next();
  return TreeAutomorphism::from_words(n, std::move(words));
}

}  // namespace arbor
