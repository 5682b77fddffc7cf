#include "casbox/ca.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace casbox {

namespace {

constexpr std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }

// Rule evaluated on 64 neighbourhoods at once. Level 0 of the multiplexer
// tree selects on x0 between the two constant truth-table bits of each pair;
// each further level selects on the next variable.
struct BitslicedRule {
  std::array<std::uint64_t, 16> base{};
  std::array<std::uint64_t, 16> diff{};

  explicit BitslicedRule(BooleanRule rule) {
    const std::uint32_t t = rule.truth_table();
    for (unsigned j = 0; j < 16; ++j) {
      const std::uint64_t b0 = (t >> (2 * j)) & 1u;
      const std::uint64_t b1 = (t >> (2 * j + 1)) & 1u;
      base[j] = 0 - b0;
      diff[j] = 0 - (b0 ^ b1);
    }
  }

  std::uint64_t operator()(std::uint64_t x0, std::uint64_t x1, std::uint64_t x2, std::uint64_t x3,
                           std::uint64_t x4) const {
    std::uint64_t v[16];
    for (unsigned j = 0; j < 16; ++j) v[j] = base[j] ^ (x0 & diff[j]);
    for (unsigned j = 0; j < 8; ++j) v[j] = v[2 * j] ^ (x1 & (v[2 * j] ^ v[2 * j + 1]));
    for (unsigned j = 0; j < 4; ++j) v[j] = v[2 * j] ^ (x2 & (v[2 * j] ^ v[2 * j + 1]));
    for (unsigned j = 0; j < 2; ++j) v[j] = v[2 * j] ^ (x3 & (v[2 * j] ^ v[2 * j + 1]));
    return v[0] ^ (x4 & (v[0] ^ v[1]));
  }
};

// Offset of the cell feeding variable x_k.
constexpr int neighbor_offset(NeighborhoodOrder order, int k) {
  return order == NeighborhoodOrder::mirrored ? 2 - k : k - 2;
}

// out = v >> k over an N-bit value; bits shifted past 0 are dropped.
void shift_down(std::span<const std::uint64_t> v, std::size_t k, std::span<std::uint64_t> out) {
  const std::size_t q = k / 64, r = k % 64, n = v.size();
  for (std::size_t w = 0; w < n; ++w) {
    std::uint64_t lo = w + q < n ? v[w + q] : 0;
    std::uint64_t hi = w + q + 1 < n ? v[w + q + 1] : 0;
    out[w] = r == 0 ? lo : (lo >> r) | (hi << (64 - r));
  }
}

// out = v << k over an N-bit value; caller masks the padding.
void shift_up(std::span<const std::uint64_t> v, std::size_t k, std::span<std::uint64_t> out) {
  const std::size_t q = k / 64, r = k % 64, n = v.size();
  for (std::size_t w = n; w-- > 0;) {
    std::uint64_t lo = w >= q ? v[w - q] : 0;
    std::uint64_t lower = w >= q + 1 ? v[w - q - 1] : 0;
    out[w] = r == 0 ? lo : (lo << r) | (lower >> (64 - r));
  }
}

void require_neighborhood(std::size_t size) {
  if (size < kNeighborhoodSize)
    throw std::invalid_argument("ring must have at least 5 cells");
}

}  // namespace

RingState::RingState(std::size_t size) : size_(size), words_(words_for(size), 0) {}

RingState RingState::from_bits(std::span<const std::uint8_t> bits) {
  RingState s(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) s.words_[i / 64] |= std::uint64_t{1} << (i % 64);
  return s;
}

void RingState::set(std::size_t i, bool value) {
  const std::uint64_t m = std::uint64_t{1} << (i % 64);
  if (value)
    words_[i / 64] |= m;
  else
    words_[i / 64] &= ~m;
}

void RingState::fill(bool value) {
  for (auto& w : words_) w = value ? ~std::uint64_t{0} : 0;
  clear_padding();
}

std::size_t RingState::count_ones() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<std::uint8_t> RingState::to_bits() const {
  std::vector<std::uint8_t> bits(size_);
  for (std::size_t i = 0; i < size_; ++i) bits[i] = get(i) ? 1 : 0;
  return bits;
}

void RingState::clear_padding() {
  if (size_ % 64 != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
}

RingState RingState::rotated(std::size_t k) const {
  RingState out(size_);
  if (size_ == 0) return out;
  k %= size_;
  if (k == 0) return *this;
  std::vector<std::uint64_t> high(words_.size());
  shift_down(words_, k, out.words_);
  shift_up(words_, size_ - k, high);
  for (std::size_t w = 0; w < words_.size(); ++w) out.words_[w] |= high[w];
  out.clear_padding();
  return out;
}

void ring_step_into(const RingState& state, BooleanRule rule, RingState& next, NeighborhoodOrder order) {
  const std::size_t n = state.size();
  require_neighborhood(n);
  if (next.size() != n) next = RingState(n);
  const BitslicedRule eval(rule);
  const auto in = state.words();
  auto out = next.words();
  const std::size_t w_count = in.size();

  if (n % 64 == 0) {
    // Neighbours come from the adjacent words; the ring wraps at word level.
    std::uint64_t x[5];
    for (std::size_t w = 0; w < w_count; ++w) {
      const std::uint64_t prev = in[(w + w_count - 1) % w_count];
      const std::uint64_t cur = in[w];
      const std::uint64_t nxt = in[(w + 1) % w_count];
      const std::uint64_t plus1 = (cur >> 1) | (nxt << 63);
      const std::uint64_t plus2 = (cur >> 2) | (nxt << 62);
      const std::uint64_t minus1 = (cur << 1) | (prev >> 63);
      const std::uint64_t minus2 = (cur << 2) | (prev >> 62);
      if (order == NeighborhoodOrder::mirrored) {
        x[0] = plus2, x[1] = plus1, x[2] = cur, x[3] = minus1, x[4] = minus2;
      } else {
        x[0] = minus2, x[1] = minus1, x[2] = cur, x[3] = plus1, x[4] = plus2;
      }
      out[w] = eval(x[0], x[1], x[2], x[3], x[4]);
    }
    return;
  }

  std::array<RingState, 5> nb;
  for (int k = 0; k < 5; ++k) {
    const int off = neighbor_offset(order, k);
    nb[k] = state.rotated(off >= 0 ? static_cast<std::size_t>(off) : n - static_cast<std::size_t>(-off));
  }
  for (std::size_t w = 0; w < w_count; ++w)
    out[w] = eval(nb[0].words()[w], nb[1].words()[w], nb[2].words()[w], nb[3].words()[w], nb[4].words()[w]);
  if (n % 64 != 0) out[w_count - 1] &= (std::uint64_t{1} << (n % 64)) - 1;
}

RingState ring_step(const RingState& state, BooleanRule rule, NeighborhoodOrder order) {
  RingState next(state.size());
  ring_step_into(state, rule, next, order);
  return next;
}

std::vector<std::uint8_t> ring_step_reference(std::span<const std::uint8_t> cells, BooleanRule rule,
                                              NeighborhoodOrder order) {
  const std::size_t n = cells.size();
  require_neighborhood(n);
  std::vector<std::uint8_t> next(n);
  for (std::size_t i = 0; i < n; ++i) {
    unsigned x = 0;
    for (int k = 0; k < 5; ++k) {
      const auto off = static_cast<std::ptrdiff_t>(neighbor_offset(order, k));
      const auto pos = static_cast<std::size_t>((static_cast<std::ptrdiff_t>(i + n) + off)) % n;
      x |= static_cast<unsigned>(cells[pos] & 1u) << k;
    }
    next[i] = rule(x) ? 1 : 0;
  }
  return next;
}

unsigned permute5(BooleanRule rule, unsigned value, NeighborhoodOrder order) {
  value &= 31u;
  unsigned out = 0;
  for (int i = 0; i < 5; ++i) {
    unsigned x = 0;
    for (int k = 0; k < 5; ++k) {
      const int pos = ((i + neighbor_offset(order, k)) % 5 + 5) % 5;
      x |= ((value >> pos) & 1u) << k;
    }
    out |= static_cast<unsigned>(rule(x)) << i;
  }
  return out;
}

std::array<std::uint8_t, 32> permute5_table(BooleanRule rule, NeighborhoodOrder order) {
  std::array<std::uint8_t, 32> t{};
  for (unsigned v = 0; v < 32; ++v) t[v] = static_cast<std::uint8_t>(permute5(rule, v, order));
  return t;
}

bool is_bijective5(BooleanRule rule, NeighborhoodOrder order) {
  std::uint32_t seen = 0;
  for (unsigned v = 0; v < 32; ++v) seen |= 1u << permute5(rule, v, order);
  return seen == 0xFFFFFFFFu;
}

void PrngConfig::validate() const {
  if (ring_size < kNeighborhoodSize) throw std::invalid_argument("ring must have at least 5 cells");
  if (!allow_small_ring && ring_size < kMinSecureRingSize)
    throw std::invalid_argument("PRNG ring must have more than 1000 cells");
  if (tap_index >= ring_size) throw std::invalid_argument("tap index outside the ring");
  if (seed.size() != ring_size) throw std::invalid_argument("seed length must equal the ring size");
}

PrngStream::PrngStream(const PrngConfig& config)
    : rule_(config.rule), order_(config.order), tap_(config.tap_index) {
  config.validate();
  current_ = RingState::from_bits(config.seed);
  scratch_ = RingState(config.ring_size);
}

bool PrngStream::next_bit() {
  ring_step_into(current_, rule_, scratch_, order_);
  std::swap(current_, scratch_);
  return current_.get(tap_);
}

void PrngStream::generate(std::span<std::uint8_t> out) {
  for (auto& b : out) b = next_bit() ? 1 : 0;
}

std::vector<std::uint8_t> PrngStream::take(std::size_t count) {
  std::vector<std::uint8_t> bits(count);
  generate(bits);
  return bits;
}

std::vector<std::uint8_t> prng_stream(const PrngConfig& config, std::size_t count) {
  PrngStream stream(config);
  return stream.take(count);
}

std::vector<std::uint8_t> parse_seed_hex(std::string_view text, std::size_t bits) {
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.remove_suffix(1);
  if (bits % 4 != 0 || text.size() != bits / 4)
    throw std::invalid_argument("seed must be exactly " + std::to_string(bits / 4) + " hex digits");
  std::vector<std::uint8_t> out;
  out.reserve(bits);
  for (char c : text) {
    int v;
    if (c >= '0' && c <= '9')
      v = c - '0';
    else if (c >= 'a' && c <= 'f')
      v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F')
      v = c - 'A' + 10;
    else
      throw std::invalid_argument("seed contains a non-hex character");
    for (int b = 3; b >= 0; --b) out.push_back(static_cast<std::uint8_t>((v >> b) & 1));
  }
  return out;
}

std::vector<std::uint8_t> read_seed_file(const std::filesystem::path& path, std::size_t bits) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open seed file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_seed_hex(ss.str(), bits);
}

std::string format_seed_hex(std::span<const std::uint8_t> bits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i + 4 <= bits.size(); i += 4) {
    const int v = (bits[i] << 3) | (bits[i + 1] << 2) | (bits[i + 2] << 1) | bits[i + 3];
    out.push_back(kDigits[v]);
  }
  return out;
}

std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits) {
  std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) bytes[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  return bytes;
}

std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> bytes, std::size_t count) {
  if (count > bytes.size() * 8) throw std::invalid_argument("not enough bytes for the requested bit count");
  std::vector<std::uint8_t> bits(count);
  for (std::size_t i = 0; i < count; ++i) bits[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
  return bits;
}

}  // namespace casbox
