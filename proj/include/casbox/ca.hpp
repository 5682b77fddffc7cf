#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "casbox/boolfn.hpp"

namespace casbox {

// Which ring neighbour feeds which rule variable when updating cell i.
//   mirrored:  (x0, x1, x2, x3, x4) = cells (i+2, i+1, i, i-1, i-2)   default
//   ascending: (x0, x1, x2, x3, x4) = cells (i-2, i-1, i, i+1, i+2)
// The default is the orientation under which the eleven-layer S-box built
// from rule 1438886595 has nonlinearity 434, DU 14 and BU 24.
enum class NeighborhoodOrder { mirrored, ascending };

inline constexpr NeighborhoodOrder kDefaultNeighborhood = NeighborhoodOrder::mirrored;
inline constexpr std::size_t kNeighborhoodSize = 5;

// Ring of N binary cells with periodic boundary, packed 64 cells per word.
class RingState {
 public:
  RingState() = default;
  explicit RingState(std::size_t size);
  static RingState from_bits(std::span<const std::uint8_t> bits);

  std::size_t size() const { return size_; }
  bool get(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
  void set(std::size_t i, bool value);
  void fill(bool value);
  std::size_t count_ones() const;

  std::vector<std::uint8_t> to_bits() const;
  // Returns the ring whose cell i is this ring's cell (i + k) mod N.
  RingState rotated(std::size_t k) const;

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  friend bool operator==(const RingState&, const RingState&) = default;

 private:
  void clear_padding();

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

// One synchronous update of every cell. Word-parallel: each 64-bit word
// holds 64 cells and the rule is evaluated as a bitsliced multiplexer tree.
// Throws std::invalid_argument for rings shorter than the neighbourhood.
RingState ring_step(const RingState& state, BooleanRule rule,
                    NeighborhoodOrder order = kDefaultNeighborhood);
void ring_step_into(const RingState& state, BooleanRule rule, RingState& next,
                    NeighborhoodOrder order = kDefaultNeighborhood);

// Cell-at-a-time update straight from the definition.
std::vector<std::uint8_t> ring_step_reference(std::span<const std::uint8_t> cells, BooleanRule rule,
                                              NeighborhoodOrder order = kDefaultNeighborhood);

// Loads bit i of `value` into cell i of a 5-cell ring, steps once, reads back.
unsigned permute5(BooleanRule rule, unsigned value, NeighborhoodOrder order = kDefaultNeighborhood);
std::array<std::uint8_t, 32> permute5_table(BooleanRule rule,
                                            NeighborhoodOrder order = kDefaultNeighborhood);
bool is_bijective5(BooleanRule rule, NeighborhoodOrder order = kDefaultNeighborhood);

// Rule f(x) = x2, the centre projection: the 5-cell map is the identity.
inline constexpr BooleanRule kCenterProjection{0xF0F0F0F0u};

struct PrngConfig {
  static constexpr std::size_t kDefaultRingSize = 1024;
  static constexpr std::size_t kDefaultTap = 512;
  static constexpr std::size_t kMinSecureRingSize = 1001;

  BooleanRule rule;
  std::size_t ring_size = kDefaultRingSize;
  std::size_t tap_index = kDefaultTap;
  std::vector<std::uint8_t> seed;  // ring_size bits, one per element
  NeighborhoodOrder order = kDefaultNeighborhood;
  bool allow_small_ring = false;

  // Throws std::invalid_argument on any violated constraint.
  void validate() const;
};

// Steps the ring, then emits cell tap_index; repeated once per bit.
// Single-owner: each instance carries its own ring.
class PrngStream {
 public:
  explicit PrngStream(const PrngConfig& config);

  bool next_bit();
  void generate(std::span<std::uint8_t> out);
  std::vector<std::uint8_t> take(std::size_t count);

  const RingState& state() const { return current_; }

 private:
  BooleanRule rule_;
  NeighborhoodOrder order_;
  std::size_t tap_;
  RingState current_;
  RingState scratch_;
};

std::vector<std::uint8_t> prng_stream(const PrngConfig& config, std::size_t count);

// Seed files hold 256 hex digits (1024 bits). Digits are read left to right,
// each contributing four cells with its most significant bit first.
std::vector<std::uint8_t> parse_seed_hex(std::string_view text, std::size_t bits = 1024);
std::vector<std::uint8_t> read_seed_file(const std::filesystem::path& path, std::size_t bits = 1024);
std::string format_seed_hex(std::span<const std::uint8_t> bits);

// Packs bits 8 per byte, first bit into the most significant bit of byte 0.
std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> bytes, std::size_t count);

}  // namespace casbox
