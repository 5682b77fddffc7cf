#include "casbox/sbox.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace casbox {

SBox::SBox(int bits, std::vector<std::uint32_t> table) : bits_(bits), table_(std::move(table)) {
  if (bits < 1 || bits > 24) throw std::invalid_argument("S-box width must be in 1..24 bits");
  const std::size_t n = std::size_t{1} << bits;
  if (table_.size() != n) throw std::invalid_argument("S-box table size must be 2^bits");
  std::vector<std::uint8_t> seen(n, 0);
  for (auto v : table_) {
    if (v >= n || seen[v]) throw NotBijectiveError("S-box table is not a permutation");
    seen[v] = 1;
  }
}

SBox SBox::identity(int bits) {
  std::vector<std::uint32_t> t(std::size_t{1} << bits);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<std::uint32_t>(i);
  return SBox(bits, std::move(t));
}

std::uint32_t SBox::apply(std::uint32_t x) const {
  if (x >= table_.size()) throw std::out_of_range("S-box input out of range");
  return table_[x];
}

SBox invert_sbox(const SBox& s) {
  std::vector<std::uint32_t> inv(s.size());
  for (std::size_t x = 0; x < s.size(); ++x) inv[s[x]] = static_cast<std::uint32_t>(x);
  return SBox(s.bits(), std::move(inv));
}

LayerSpec LayerSpec::eleven_layer(BooleanRule rule) {
  LayerSpec spec;
  auto rounds = [&](int k) {
    for (int i = 0; i < k; ++i) spec.layers.emplace_back(CaRound{rule});
  };
  spec.layers.emplace_back(AffineLayer{5, 3});
  rounds(4);
  spec.layers.emplace_back(AffineLayer{7, 11});
  rounds(3);
  spec.layers.emplace_back(AffineLayer{13, 17});
  rounds(1);
  return spec;
}

LayerSpec LayerSpec::without_affine() const {
  LayerSpec out;
  for (const auto& layer : layers)
    if (std::holds_alternative<CaRound>(layer)) out.layers.push_back(layer);
  return out;
}

void LayerSpec::validate() const {
  for (const auto& layer : layers)
    if (const auto* a = std::get_if<AffineLayer>(&layer); a && a->multiplier % 2 == 0)
      throw std::invalid_argument("affine layer multiplier must be odd");
}

FeistelState split_block(std::uint32_t block, HalfPacking packing) {
  const std::uint32_t lo = block & 31u, hi = (block >> 5) & 31u;
  return packing == HalfPacking::low_left ? FeistelState{lo, hi} : FeistelState{hi, lo};
}

std::uint32_t join_block(FeistelState state, HalfPacking packing) {
  return packing == HalfPacking::low_left ? (state.right << 5) | state.left : (state.left << 5) | state.right;
}

std::uint32_t affine_layer(std::uint32_t x, std::uint32_t a, std::uint32_t b) {
  if (a % 2 == 0) throw std::invalid_argument("affine layer multiplier must be odd");
  if (x >= kFeistelSize) throw std::out_of_range("affine layer input must be below 1024");
  return (a * x + b) & (kFeistelSize - 1);
}

FeistelState feistel_round(FeistelState state, BooleanRule rule, NeighborhoodOrder order) {
  return {state.right, state.left ^ permute5(rule, state.right, order)};
}

FeistelState inverse_feistel_round(FeistelState state, BooleanRule rule, NeighborhoodOrder order) {
  return {state.right ^ permute5(rule, state.left, order), state.left};
}

SBox build_sbox(const LayerSpec& spec, const FeistelConventions& conventions) {
  spec.validate();
  // Per-layer round tables, so each evaluation is a lookup.
  std::vector<std::array<std::uint8_t, 32>> round_tables;
  for (const auto& layer : spec.layers)
    if (const auto* r = std::get_if<CaRound>(&layer))
      round_tables.push_back(permute5_table(r->rule, conventions.neighborhood));

  std::vector<std::uint32_t> table(kFeistelSize);
  for (std::uint32_t x = 0; x < kFeistelSize; ++x) {
    std::uint32_t v = x;
    std::size_t round = 0;
    for (const auto& layer : spec.layers) {
      if (const auto* a = std::get_if<AffineLayer>(&layer)) {
        v = (a->multiplier * v + a->offset) & (kFeistelSize - 1);
      } else {
        const auto& f = round_tables[round++];
        const FeistelState s = split_block(v, conventions.packing);
        v = join_block({s.right, s.left ^ f[s.right]}, conventions.packing);
      }
    }
    if (conventions.final_swap) v = ((v & 31u) << 5) | (v >> 5);
    table[x] = v;
  }
  return SBox(kFeistelBits, std::move(table));
}

void write_sbox(std::ostream& out, const SBox& s, SBoxFormat format) {
  char buf[16];
  for (std::size_t x = 0; x < s.size(); ++x) {
    if (format == SBoxFormat::hex)
      std::snprintf(buf, sizeof buf, "%04x", s[x]);
    else
      std::snprintf(buf, sizeof buf, "%u", s[x]);
    out << buf << ((x % 16 == 15 || x + 1 == s.size()) ? '\n' : ' ');
  }
}

SBox read_sbox(std::istream& in, SBoxFormat format) {
  std::vector<std::uint32_t> values;
  std::string token;
  while (in >> token) {
    std::uint32_t v = 0;
    const int base = format == SBoxFormat::hex ? 16 : 10;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v, base);
    if (ec != std::errc() || ptr != token.data() + token.size())
      throw std::runtime_error("invalid S-box value '" + token + "'");
    values.push_back(v);
  }
  if (values.empty() || !std::has_single_bit(values.size()))
    throw std::runtime_error("S-box file must hold a power-of-two number of values");
  const int bits = std::countr_zero(values.size());
  return SBox(bits, std::move(values));
}

SBox read_sbox_file(const std::filesystem::path& path, SBoxFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open S-box file " + path.string());
  return read_sbox(in, format);
}

}  // namespace casbox
