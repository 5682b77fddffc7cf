#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace casbox {

// How a rule number maps onto a truth table.
//   lsb_first: number = sum_x f(x) * 2^x   (project convention)
//   msb_first: number = sum_x f(x) * 2^(31-x)   (Wolfram-style, calibration only)
enum class BitOrder { lsb_first, msb_first };

// A 5-variable Boolean function. Input x is a 5-bit integer whose bit i is
// variable x_i; bit x of the truth table is f(x).
class BooleanRule {
 public:
  static constexpr int kVariables = 5;
  static constexpr int kTableSize = 32;

  constexpr BooleanRule() = default;
  constexpr explicit BooleanRule(std::uint32_t truth_table) : table_(truth_table) {}

  // Throws std::out_of_range when n does not fit in 32 bits.
  static BooleanRule from_number(std::uint64_t n, BitOrder order = BitOrder::lsb_first);

  constexpr std::uint32_t truth_table() const { return table_; }
  std::uint32_t number(BitOrder order = BitOrder::lsb_first) const;

  constexpr bool operator()(unsigned x) const { return (table_ >> (x & 31u)) & 1u; }

  friend constexpr bool operator==(BooleanRule, BooleanRule) = default;

 private:
  std::uint32_t table_ = 0;
};

inline BooleanRule rule_from_number(std::uint64_t n, BitOrder order = BitOrder::lsb_first) {
  return BooleanRule::from_number(n, order);
}

// The rule isolated by the full search pipeline.
inline constexpr std::uint32_t kSelectedRuleNumber = 1438886595u;

// ascii:   "x0*x3 + x1 + 1"
// unicode: "x₀x₃⊕x₁⊕1" (subscript indices, juxtaposed products, no spaces)
enum class AnfNotation { ascii, unicode };

// Algebraic normal form: bit u of `coefficients` is a_u, the coefficient of
// the monomial prod_{i : u_i = 1} x_i.
struct Anf {
  std::uint32_t coefficients = 0;

  bool has(unsigned monomial) const { return (coefficients >> monomial) & 1u; }
  int degree() const;
  // Highest degree first, then by variable indices; "0" if empty.
  std::string to_string(AnfNotation notation = AnfNotation::ascii) const;

  friend bool operator==(const Anf&, const Anf&) = default;
};

// Binary Moebius transform over the 32-entry lattice. It is an involution.
std::uint32_t moebius_transform(std::uint32_t values);

Anf anf_of(BooleanRule rule);
BooleanRule rule_from_anf(const Anf& anf);

int algebraic_degree(BooleanRule rule);
int hamming_weight(BooleanRule rule);
bool is_balanced(BooleanRule rule);

struct WalshSpectrum {
  std::array<int, BooleanRule::kTableSize> values{};

  int operator[](unsigned omega) const { return values[omega]; }
  int max_abs() const;
};

// Fast butterfly transform.
WalshSpectrum walsh_spectrum(BooleanRule rule);

// Xiao-Massey: true iff the spectrum vanishes on every mask of weight 1..k.
// Throws std::invalid_argument unless 1 <= k <= 5.
bool is_correlation_immune(BooleanRule rule, int k);

// 16 - max|W|/2, the Hamming distance to the nearest affine function.
int nonlinearity(BooleanRule rule);

// Flipping any single input bit changes f on exactly 16 of the 32 inputs.
bool satisfies_sac(BooleanRule rule);

// Rule lists: one decimal number per line. Blank lines and '#' comments are
// skipped on read; anything else malformed throws std::runtime_error.
void write_rule_list(std::ostream& out, std::span<const std::uint32_t> rules);
std::vector<std::uint32_t> read_rule_list(std::istream& in);

}  // namespace casbox
