#pragma once

#include <cstdint>
#include <vector>

namespace casbox {

// True iff `poly` (bit i = coefficient of x^i) is irreducible over GF(2).
bool is_irreducible(std::uint32_t poly);
int poly_degree(std::uint32_t poly);

// GF(2^n) = GF(2)[x] / (modulus), elements as n-bit integers, with log and
// antilog tables over a generator of the multiplicative group. The modulus
// need not be primitive; the smallest generator is searched for.
class BinaryField {
 public:
  // Throws std::invalid_argument unless modulus is irreducible of degree n, 2 <= n <= 16.
  explicit BinaryField(std::uint32_t modulus);

  int bits() const { return bits_; }
  std::uint32_t order() const { return order_; }
  std::uint32_t modulus() const { return modulus_; }
  std::uint32_t generator() const { return generator_; }

  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t inv(std::uint32_t a) const;  // throws std::domain_error for 0
  std::uint32_t pow(std::uint32_t a, std::uint64_t e) const;

  // Discrete log base generator(); a must be nonzero.
  std::uint32_t log(std::uint32_t a) const { return log_[a]; }
  // generator()^e for 0 <= e < order - 1.
  std::uint32_t exp(std::uint32_t e) const { return exp_[e]; }

 private:
  int bits_;
  std::uint32_t order_;
  std::uint32_t modulus_;
  std::uint32_t generator_ = 0;
  std::vector<std::uint32_t> exp_;
  std::vector<std::uint32_t> log_;
};

// Carry-less multiply then reduce; the table-free reference for mul().
std::uint32_t gf_mul_reference(std::uint32_t a, std::uint32_t b, std::uint32_t modulus);

// Default moduli: x^8+x^4+x^3+x+1 (AES) for 8 bits, x^10+x^3+1 for 10 bits.
inline constexpr std::uint32_t kAesModulus = 0x11B;
inline constexpr std::uint32_t kModulus10 = 0x409;
// Throws std::invalid_argument for widths without a default.
std::uint32_t default_modulus(int bits);

}  // namespace casbox
