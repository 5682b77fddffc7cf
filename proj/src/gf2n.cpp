#include "casbox/gf2n.hpp"

#include <bit>
#include <stdexcept>

namespace casbox {

int poly_degree(std::uint32_t poly) { return poly == 0 ? -1 : 31 - std::countl_zero(poly); }

namespace {

std::uint32_t poly_mod(std::uint32_t a, std::uint32_t m) {
  const int dm = poly_degree(m);
  for (int d = poly_degree(a); d >= dm; d = poly_degree(a)) a ^= m << (d - dm);
  return a;
}

}  // namespace

bool is_irreducible(std::uint32_t poly) {
  const int n = poly_degree(poly);
  if (n < 1) return false;
  // Trial division by every polynomial of degree 1..n/2.
  for (std::uint32_t d = 2; poly_degree(d) <= n / 2; ++d)
    if (poly_mod(poly, d) == 0) return false;
  return true;
}

std::uint32_t gf_mul_reference(std::uint32_t a, std::uint32_t b, std::uint32_t modulus) {
  const int n = poly_degree(modulus);
  std::uint32_t r = 0;
  while (b) {
    if (b & 1u) r ^= a;
    b >>= 1;
    a <<= 1;
    if ((a >> n) & 1u) a ^= modulus;
  }
  return r;
}

std::uint32_t default_modulus(int bits) {
  switch (bits) {
    case 8: return kAesModulus;
    case 10: return kModulus10;
    default: throw std::invalid_argument("no default field modulus for width " + std::to_string(bits));
  }
}

BinaryField::BinaryField(std::uint32_t modulus) : modulus_(modulus) {
  bits_ = poly_degree(modulus);
  if (bits_ < 2 || bits_ > 16) throw std::invalid_argument("field degree must be in 2..16");
  if (!is_irreducible(modulus)) throw std::invalid_argument("field modulus is reducible");
  order_ = 1u << bits_;
  exp_.assign(order_ - 1, 0);
  log_.assign(order_, 0);

  for (std::uint32_t g = 2; g < order_; ++g) {
    std::uint32_t x = 1, i = 0;
    for (; i < order_ - 1; ++i) {
      if (i > 0 && x == 1) break;
      exp_[i] = x;
      x = gf_mul_reference(x, g, modulus_);
    }
    if (i == order_ - 1) {
      generator_ = g;
      break;
    }
  }
  if (generator_ == 0) throw std::logic_error("no generator found");
  for (std::uint32_t i = 0; i < order_ - 1; ++i) log_[exp_[i]] = i;
}

std::uint32_t BinaryField::mul(std::uint32_t a, std::uint32_t b) const {
  if (a == 0 || b == 0) return 0;
  std::uint32_t e = log_[a] + log_[b];
  if (e >= order_ - 1) e -= order_ - 1;
  return exp_[e];
}

std::uint32_t BinaryField::inv(std::uint32_t a) const {
  if (a == 0) throw std::domain_error("zero has no inverse");
  return exp_[(order_ - 1 - log_[a]) % (order_ - 1)];
}

std::uint32_t BinaryField::pow(std::uint32_t a, std::uint64_t e) const {
  if (a == 0) return e == 0 ? 1 : 0;
  return exp_[static_cast<std::uint32_t>((static_cast<std::uint64_t>(log_[a]) * (e % (order_ - 1))) % (order_ - 1))];
}

}  // namespace casbox
