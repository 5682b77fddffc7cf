#include "casbox/boolfn.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace casbox {

namespace {

// Truth-table positions x with x_i = 0, for each variable i.
constexpr std::array<std::uint32_t, 5> kLowHalfMask = {
    0x55555555u, 0x33333333u, 0x0F0F0F0Fu, 0x00FF00FFu, 0x0000FFFFu};

std::uint32_t reverse_bits(std::uint32_t v) {
  std::uint32_t r = 0;
  for (int i = 0; i < 32; ++i) r |= ((v >> i) & 1u) << (31 - i);
  return r;
}

// Truth table of x -> f(x ^ e_i).
std::uint32_t flip_input(std::uint32_t table, int i) {
  const unsigned shift = 1u << i;
  const std::uint32_t m = kLowHalfMask[i];
  return ((table & m) << shift) | ((table >> shift) & m);
}

}  // namespace

BooleanRule BooleanRule::from_number(std::uint64_t n, BitOrder order) {
  if (n > 0xFFFFFFFFull) throw std::out_of_range("rule number exceeds 2^32 - 1");
  const auto v = static_cast<std::uint32_t>(n);
  return BooleanRule(order == BitOrder::lsb_first ? v : reverse_bits(v));
}

std::uint32_t BooleanRule::number(BitOrder order) const {
  return order == BitOrder::lsb_first ? table_ : reverse_bits(table_);
}

int Anf::degree() const {
  int d = 0;
  for (unsigned u = 0; u < 32; ++u)
    if (has(u)) d = std::max(d, std::popcount(u));
  return d;
}

std::string Anf::to_string(AnfNotation notation) const {
  const bool ascii = notation == AnfNotation::ascii;
  static constexpr const char* kSubscript[] = {"₀", "₁", "₂", "₃", "₄"};
  std::vector<unsigned> monomials;
  for (unsigned u = 0; u < 32; ++u)
    if (has(u)) monomials.push_back(u);
  if (monomials.empty()) return "0";

  // Degree descending, then the ascending list of variable indices.
  auto indices = [](unsigned u) {
    std::vector<int> v;
    for (int i = 0; i < 5; ++i)
      if ((u >> i) & 1u) v.push_back(i);
    return v;
  };
  std::sort(monomials.begin(), monomials.end(), [&](unsigned a, unsigned b) {
    const int da = std::popcount(a), db = std::popcount(b);
    if (da != db) return da > db;
    return indices(a) < indices(b);
  });

  std::string out;
  for (unsigned u : monomials) {
    if (!out.empty()) out += ascii ? " + " : "⊕";
    if (u == 0) {
      out += "1";
      continue;
    }
    bool first = true;
    for (int i : indices(u)) {
      if (!first && ascii) out += "*";
      out += "x";
      out += ascii ? std::to_string(i) : kSubscript[i];
      first = false;
    }
  }
  return out;
}

std::uint32_t moebius_transform(std::uint32_t values) {
  for (int i = 0; i < 5; ++i) values ^= (values & kLowHalfMask[i]) << (1u << i);
  return values;
}

Anf anf_of(BooleanRule rule) { return Anf{moebius_transform(rule.truth_table())}; }

BooleanRule rule_from_anf(const Anf& anf) { return BooleanRule(moebius_transform(anf.coefficients)); }

int algebraic_degree(BooleanRule rule) { return anf_of(rule).degree(); }

int hamming_weight(BooleanRule rule) { return std::popcount(rule.truth_table()); }

bool is_balanced(BooleanRule rule) { return hamming_weight(rule) == 16; }

int WalshSpectrum::max_abs() const {
  int m = 0;
  for (int v : values) m = std::max(m, v < 0 ? -v : v);
  return m;
}

WalshSpectrum walsh_spectrum(BooleanRule rule) {
  WalshSpectrum s;
  for (unsigned x = 0; x < 32; ++x) s.values[x] = rule(x) ? -1 : 1;
  for (unsigned h = 1; h < 32; h <<= 1) {
    for (unsigned i = 0; i < 32; i += h << 1) {
      for (unsigned j = i; j < i + h; ++j) {
        const int a = s.values[j], b = s.values[j + h];
        s.values[j] = a + b;
        s.values[j + h] = a - b;
      }
    }
  }
  return s;
}

bool is_correlation_immune(BooleanRule rule, int k) {
  if (k < 1 || k > 5) throw std::invalid_argument("correlation immunity order must be in 1..5");
  if (k == 1) {
    // W(e_i) = 0 iff f ^ x_i is balanced; ~m is the truth table of x_i.
    const std::uint32_t t = rule.truth_table();
    for (std::uint32_t m : kLowHalfMask)
      if (std::popcount(t ^ ~m) != 16) return false;
    return true;
  }
  const WalshSpectrum s = walsh_spectrum(rule);
  for (unsigned omega = 1; omega < 32; ++omega)
    if (std::popcount(omega) <= k && s[omega] != 0) return false;
  return true;
}

int nonlinearity(BooleanRule rule) { return 16 - walsh_spectrum(rule).max_abs() / 2; }

bool satisfies_sac(BooleanRule rule) {
  const std::uint32_t t = rule.truth_table();
  for (int i = 0; i < 5; ++i)
    if (std::popcount(t ^ flip_input(t, i)) != 16) return false;
  return true;
}

void write_rule_list(std::ostream& out, std::span<const std::uint32_t> rules) {
  for (std::uint32_t r : rules) out << r << '\n';
}

std::vector<std::uint32_t> read_rule_list(std::istream& in) {
  std::vector<std::uint32_t> rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    std::uint64_t value = 0;
    const char* begin = line.data() + first;
    const char* end = line.data() + last + 1;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || value > 0xFFFFFFFFull)
      throw std::runtime_error("invalid rule number on line " + std::to_string(line_no));
    rules.push_back(static_cast<std::uint32_t>(value));
  }
  return rules;
}

}  // namespace casbox
