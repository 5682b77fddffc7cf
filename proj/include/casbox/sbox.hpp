#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "casbox/boolfn.hpp"
#include "casbox/ca.hpp"

namespace casbox {

class NotBijectiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A permutation of 0 .. 2^bits - 1.
class SBox {
 public:
  // Throws NotBijectiveError unless `table` is a permutation of 2^bits values,
  // std::invalid_argument for a bad width.
  SBox(int bits, std::vector<std::uint32_t> table);
  static SBox identity(int bits);

  int bits() const { return bits_; }
  std::size_t size() const { return table_.size(); }
  std::span<const std::uint32_t> table() const { return table_; }
  std::uint32_t operator[](std::size_t x) const { return table_[x]; }

  // Throws std::out_of_range for x >= 2^bits.
  std::uint32_t apply(std::uint32_t x) const;

  friend bool operator==(const SBox&, const SBox&) = default;

 private:
  int bits_;
  std::vector<std::uint32_t> table_;
};

SBox invert_sbox(const SBox& s);

// Layers of the 10-bit construction.
struct AffineLayer {
  std::uint32_t multiplier;  // odd
  std::uint32_t offset;
};
struct CaRound {
  BooleanRule rule;
};
using Layer = std::variant<AffineLayer, CaRound>;

struct LayerSpec {
  std::vector<Layer> layers;

  // Affine(5,3), 4 rounds, Affine(7,11), 3 rounds, Affine(13,17), 1 round.
  static LayerSpec eleven_layer(BooleanRule rule);
  // The same eight rounds with every affine layer removed.
  LayerSpec without_affine() const;
  // Throws std::invalid_argument for an even affine multiplier.
  void validate() const;
};

inline constexpr int kFeistelBits = 10;
inline constexpr std::uint32_t kFeistelSize = 1u << kFeistelBits;

// Which half of the 10-bit block is L in the round (L, R) -> (R, L ^ f(R)).
//   low_left:  L = bits 0..4, R = bits 5..9   default
//   high_left: L = bits 5..9, R = bits 0..4
enum class HalfPacking { low_left, high_left };

struct FeistelConventions {
  HalfPacking packing = HalfPacking::low_left;
  bool final_swap = false;  // swap halves once after the last layer
  NeighborhoodOrder neighborhood = kDefaultNeighborhood;
};

struct FeistelState {
  std::uint32_t left;   // 5 bits
  std::uint32_t right;  // 5 bits

  friend bool operator==(const FeistelState&, const FeistelState&) = default;
};

FeistelState split_block(std::uint32_t block, HalfPacking packing = HalfPacking::low_left);
std::uint32_t join_block(FeistelState state, HalfPacking packing = HalfPacking::low_left);

// (a * x + b) mod 1024. Throws std::invalid_argument for even a and
// std::out_of_range for x >= 1024.
std::uint32_t affine_layer(std::uint32_t x, std::uint32_t a, std::uint32_t b);

// L' = R, R' = L ^ permute5(rule, R).
FeistelState feistel_round(FeistelState state, BooleanRule rule,
                           NeighborhoodOrder order = kDefaultNeighborhood);
// Undoes feistel_round for any rule.
FeistelState inverse_feistel_round(FeistelState state, BooleanRule rule,
                                   NeighborhoodOrder order = kDefaultNeighborhood);

// table[x] = every layer applied in order to x. Throws NotBijectiveError if
// the result is not a permutation.
SBox build_sbox(const LayerSpec& spec, const FeistelConventions& conventions = {});

enum class SBoxFormat { decimal, hex };

// Whitespace-separated values in index order, 16 per line. Hex values are
// 4 lowercase hex digits.
void write_sbox(std::ostream& out, const SBox& s, SBoxFormat format = SBoxFormat::decimal);
// The width is inferred from the value count, which must be a power of two.
SBox read_sbox(std::istream& in, SBoxFormat format = SBoxFormat::decimal);
SBox read_sbox_file(const std::filesystem::path& path, SBoxFormat format = SBoxFormat::decimal);

}  // namespace casbox
