#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "casbox/exec.hpp"
#include "casbox/sbox.hpp"

namespace casbox {

// Exact ratio num/den, kept unreduced so the denominator stays 2^n.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
  // Cross-multiplied comparison; 3/4 == 6/8.
  friend bool operator==(const Fraction& a, const Fraction& b) { return a.num * b.den == b.num * a.den; }
};

enum class TableKind { ddt, lat, bct };

// 2^n x 2^n table; row index = input difference/mask, column = output.
class DistributionTable {
 public:
  DistributionTable(TableKind kind, int bits);

  TableKind kind() const { return kind_; }
  int bits() const { return bits_; }
  std::size_t dim() const { return dim_; }
  std::int32_t at(std::size_t row, std::size_t col) const { return entries_[row * dim_ + col]; }
  std::int32_t& at(std::size_t row, std::size_t col) { return entries_[row * dim_ + col]; }
  std::span<const std::int32_t> row(std::size_t r) const { return {entries_.data() + r * dim_, dim_}; }
  std::span<std::int32_t> row(std::size_t r) { return {entries_.data() + r * dim_, dim_}; }

  // Max |entry| over rows >= first_row and columns >= first_col.
  std::int32_t max_abs(std::size_t first_row, std::size_t first_col) const;

  friend bool operator==(const DistributionTable&, const DistributionTable&) = default;

 private:
  TableKind kind_;
  int bits_;
  std::size_t dim_;
  std::vector<std::int32_t> entries_;
};

// DDT(a, b) = #{x : s(x ^ a) ^ s(x) = b}.
DistributionTable ddt(const SBox& s, Exec exec = Exec::parallel);
int differential_uniformity(const DistributionTable& ddt);
int differential_uniformity(const SBox& s);
Fraction dap(const SBox& s);

// Correlation form: LAT(a, b) = sum_x (-1)^(a.x ^ b.s(x)), one fast
// Walsh-Hadamard transform per output mask b.
DistributionTable lat(const SBox& s, Exec exec = Exec::parallel);
// 2^(n-1) - max_{a, b != 0} |LAT(a, b)| / 2.
int nonlinearity_sbox(const DistributionTable& lat);
int nonlinearity_sbox(const SBox& s);
// Bias (2^(n-1) - NL) / 2^n.
Fraction lap(const SBox& s);
// 1/2 + bias = (2^n - NL) / 2^n.
Fraction max_linear_probability(int bits, int nonlinearity);

// BCT(a, b) = #{x : s^-1(s(x) ^ b) ^ s^-1(s(x ^ a) ^ b) = a}. For each b the
// inputs are bucketed by h_b(x) = s^-1(s(x) ^ b) ^ x; every ordered pair in a
// bucket contributes to column b at row x ^ x'.
DistributionTable bct(const SBox& s, Exec exec = Exec::parallel);
int boomerang_uniformity(const DistributionTable& bct);
int boomerang_uniformity(const SBox& s);

struct SacMatrix {
  int bits = 0;
  // counts[i * bits + j] = #{x : bit j of s(x) ^ s(x ^ e_i) is 1}
  std::vector<std::int64_t> counts;

  Fraction at(int i, int j) const { return {counts[i * bits + j], std::int64_t{1} << bits}; }
  Fraction average() const;
  Fraction min() const;
  Fraction max() const;
};
SacMatrix sac_matrix(const SBox& s);

// Max over input bits i and output-bit pairs j < k of the absolute Pearson
// correlation between the avalanche bits d_j and d_k; zero-variance pairs
// count as 0.
double bic_parameter(const SBox& s);

struct DegreeRange {
  int min = 0;
  int max = 0;
};
// Algebraic degree of every nonzero component b.s(x).
DegreeRange component_degrees(const SBox& s, Exec exec = Exec::parallel);

// Coefficients c_0 .. c_{q-1} of the unique P over GF(2^n), deg P < q, with
// P(x) = s(x) for every field element x (Lagrange interpolation).
std::vector<std::uint32_t> interpolation_coefficients(const SBox& s, std::uint32_t modulus,
                                                      Exec exec = Exec::parallel);
struct Interpolation {
  int degree = -1;  // -1 for the zero polynomial
  int terms = 0;    // nonzero coefficients
};
Interpolation interpolation_summary(const SBox& s, std::uint32_t modulus, Exec exec = Exec::parallel);
// deg P + 1: the number of coefficients an interpolation attack must recover.
// The maximum for a permutation is 2^n - 1.
int algebraic_complexity(const SBox& s, std::uint32_t modulus, Exec exec = Exec::parallel);

struct MetricsReport {
  int bits = 0;
  std::uint32_t field_modulus = 0;
  int min_degree = 0;
  int max_degree = 0;
  int algebraic_complexity = 0;
  int interpolation_terms = 0;
  int nonlinearity = 0;
  Fraction linear_prob_max;
  Fraction sac_avg;
  Fraction sac_min;
  Fraction sac_max;
  double bic_parameter = 0.0;
  Fraction lap;
  Fraction dap;
  int differential_uniformity = 0;
  int boomerang_uniformity = 0;

  // Throws std::logic_error if dap != DU/2^n or the NL / linear probability
  // identity does not hold.
  void check_invariants() const;
};

// Throws std::invalid_argument if the modulus is not irreducible of degree n.
MetricsReport full_report(const SBox& s, std::optional<std::uint32_t> modulus = std::nullopt,
                          Exec exec = Exec::parallel);

// 2^n rows of 2^n comma-separated decimals.
void write_table_csv(std::ostream& out, const DistributionTable& table);

}  // namespace casbox
