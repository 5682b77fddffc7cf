#include "casbox/analysis.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "casbox/gf2n.hpp"

namespace casbox {

namespace {

inline int parity(std::uint32_t v) { return std::popcount(v) & 1; }

// In-place Walsh-Hadamard butterfly over 2^bits entries.
void fwht(std::span<std::int32_t> v) {
  const std::size_t n = v.size();
  for (std::size_t h = 1; h < n; h <<= 1)
    for (std::size_t i = 0; i < n; i += h << 1)
      for (std::size_t j = i; j < i + h; ++j) {
        const std::int32_t a = v[j], b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
}

// Moebius transform of a truth table packed 64 entries per word.
void moebius_packed(std::span<std::uint64_t> w, int bits) {
  static constexpr std::uint64_t kLow[6] = {0x5555555555555555ull, 0x3333333333333333ull,
                                            0x0F0F0F0F0F0F0F0Full, 0x00FF00FF00FF00FFull,
                                            0x0000FFFF0000FFFFull, 0x00000000FFFFFFFFull};
  for (int i = 0; i < std::min(bits, 6); ++i) {
    const unsigned shift = 1u << i;
    for (auto& word : w) word ^= (word & kLow[i]) << shift;
  }
  for (int i = 6; i < bits; ++i) {
    const std::size_t stride = std::size_t{1} << (i - 6);
    for (std::size_t k = 0; k < w.size(); ++k)
      if (k & stride) w[k] ^= w[k ^ stride];
  }
}

// Highest popcount among set positions of a packed bit vector.
int max_set_weight(std::span<const std::uint64_t> w) {
  int best = -1;
  for (std::size_t k = 0; k < w.size(); ++k) {
    std::uint64_t word = w[k];
    while (word) {
      const int bit = std::countr_zero(word);
      word &= word - 1;
      best = std::max(best, std::popcount(k * 64 + static_cast<std::size_t>(bit)));
    }
  }
  return best;
}

}  // namespace

DistributionTable::DistributionTable(TableKind kind, int bits)
    : kind_(kind), bits_(bits), dim_(std::size_t{1} << bits), entries_(dim_ * dim_, 0) {}

std::int32_t DistributionTable::max_abs(std::size_t first_row, std::size_t first_col) const {
  std::int32_t m = 0;
  for (std::size_t r = first_row; r < dim_; ++r)
    for (std::size_t c = first_col; c < dim_; ++c) m = std::max(m, std::abs(at(r, c)));
  return m;
}

DistributionTable ddt(const SBox& s, Exec exec) {
  DistributionTable t(TableKind::ddt, s.bits());
  const auto n = static_cast<std::int64_t>(s.size());
  const auto table = s.table();
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::int64_t a = 0; a < n; ++a) {
    auto row = t.row(static_cast<std::size_t>(a));
    for (std::int64_t x = 0; x < n; ++x) ++row[table[x ^ a] ^ table[x]];
  }
  return t;
}

int differential_uniformity(const DistributionTable& t) { return t.max_abs(1, 0); }

int differential_uniformity(const SBox& s) { return differential_uniformity(ddt(s)); }

Fraction dap(const SBox& s) { return {differential_uniformity(s), static_cast<std::int64_t>(s.size())}; }

DistributionTable lat(const SBox& s, Exec exec) {
  DistributionTable t(TableKind::lat, s.bits());
  const std::size_t dim = s.size();
  const auto n = static_cast<std::int64_t>(dim);
  const auto table = s.table();
#pragma omp parallel if (exec == Exec::parallel)
  {
    std::vector<std::int32_t> column(dim);
#pragma omp for schedule(static)
    for (std::int64_t b = 0; b < n; ++b) {
      for (std::size_t x = 0; x < dim; ++x)
        column[x] = parity(table[x] & static_cast<std::uint32_t>(b)) ? -1 : 1;
      fwht(column);
      for (std::size_t a = 0; a < dim; ++a) t.at(a, static_cast<std::size_t>(b)) = column[a];
    }
  }
  return t;
}

int nonlinearity_sbox(const DistributionTable& t) {
  return static_cast<int>(t.dim() / 2) - t.max_abs(0, 1) / 2;
}

int nonlinearity_sbox(const SBox& s) { return nonlinearity_sbox(lat(s)); }

Fraction lap(const SBox& s) {
  const auto half = static_cast<std::int64_t>(s.size() / 2);
  return {half - nonlinearity_sbox(s), static_cast<std::int64_t>(s.size())};
}

Fraction max_linear_probability(int bits, int nonlinearity) {
  const std::int64_t size = std::int64_t{1} << bits;
  return {size - nonlinearity, size};
}

DistributionTable bct(const SBox& s, Exec exec) {
  DistributionTable t(TableKind::bct, s.bits());
  const std::size_t dim = s.size();
  const auto n = static_cast<std::int64_t>(dim);
  const auto table = s.table();
  const SBox inverse = invert_sbox(s);
  const auto inv = inverse.table();
#pragma omp parallel if (exec == Exec::parallel)
  {
    std::vector<std::uint32_t> key(dim), start(dim + 1), order(dim);
    std::vector<std::int32_t> column(dim);
#pragma omp for schedule(dynamic, 4)
    for (std::int64_t b = 0; b < n; ++b) {
      // Counting sort of x by h_b(x).
      std::fill(start.begin(), start.end(), 0);
      for (std::size_t x = 0; x < dim; ++x) {
        key[x] = inv[table[x] ^ static_cast<std::uint32_t>(b)] ^ static_cast<std::uint32_t>(x);
        ++start[key[x] + 1];
      }
      for (std::size_t k = 0; k < dim; ++k) start[k + 1] += start[k];
      std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
      for (std::size_t x = 0; x < dim; ++x) order[fill[key[x]]++] = static_cast<std::uint32_t>(x);

      std::fill(column.begin(), column.end(), 0);
      for (std::size_t k = 0; k < dim; ++k) {
        for (std::uint32_t i = start[k]; i < start[k + 1]; ++i)
          for (std::uint32_t j = start[k]; j < start[k + 1]; ++j) ++column[order[i] ^ order[j]];
      }
      for (std::size_t a = 0; a < dim; ++a) t.at(a, static_cast<std::size_t>(b)) = column[a];
    }
  }
  return t;
}

int boomerang_uniformity(const DistributionTable& t) { return t.max_abs(1, 1); }

int boomerang_uniformity(const SBox& s) { return boomerang_uniformity(bct(s)); }

Fraction SacMatrix::average() const {
  std::int64_t total = 0;
  for (auto c : counts) total += c;
  return {total, static_cast<std::int64_t>(counts.size()) << bits};
}

Fraction SacMatrix::min() const { return {*std::min_element(counts.begin(), counts.end()), std::int64_t{1} << bits}; }

Fraction SacMatrix::max() const { return {*std::max_element(counts.begin(), counts.end()), std::int64_t{1} << bits}; }

SacMatrix sac_matrix(const SBox& s) {
  SacMatrix m;
  m.bits = s.bits();
  m.counts.assign(static_cast<std::size_t>(m.bits * m.bits), 0);
  for (int i = 0; i < m.bits; ++i) {
    for (std::size_t x = 0; x < s.size(); ++x) {
      const std::uint32_t d = s[x] ^ s[x ^ (std::size_t{1} << i)];
      for (int j = 0; j < m.bits; ++j) m.counts[static_cast<std::size_t>(i * m.bits + j)] += (d >> j) & 1u;
    }
  }
  return m;
}

double bic_parameter(const SBox& s) {
  const int n = s.bits();
  const double total = static_cast<double>(s.size());
  double best = 0.0;
  std::vector<std::int64_t> ones(static_cast<std::size_t>(n));
  std::vector<std::int64_t> both(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    std::fill(ones.begin(), ones.end(), 0);
    std::fill(both.begin(), both.end(), 0);
    for (std::size_t x = 0; x < s.size(); ++x) {
      const std::uint32_t d = s[x] ^ s[x ^ (std::size_t{1} << i)];
      for (int j = 0; j < n; ++j) {
        if (!((d >> j) & 1u)) continue;
        ++ones[static_cast<std::size_t>(j)];
        for (int k = j + 1; k < n; ++k) both[static_cast<std::size_t>(j * n + k)] += (d >> k) & 1u;
      }
    }
    for (int j = 0; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        const double pj = static_cast<double>(ones[static_cast<std::size_t>(j)]) / total;
        const double pk = static_cast<double>(ones[static_cast<std::size_t>(k)]) / total;
        const double pjk = static_cast<double>(both[static_cast<std::size_t>(j * n + k)]) / total;
        const double var = pj * (1 - pj) * pk * (1 - pk);
        if (var <= 0) continue;
        best = std::max(best, std::abs(pjk - pj * pk) / std::sqrt(var));
      }
    }
  }
  return best;
}

DegreeRange component_degrees(const SBox& s, Exec exec) {
  const std::size_t dim = s.size();
  const std::size_t words = (dim + 63) / 64;
  const auto n = static_cast<std::int64_t>(dim);
  const auto table = s.table();
  int lo = s.bits() + 1, hi = -1;
#pragma omp parallel if (exec == Exec::parallel)
  {
    std::vector<std::uint64_t> packed(words);
    int local_lo = lo, local_hi = hi;
#pragma omp for schedule(static)
    for (std::int64_t b = 1; b < n; ++b) {
      std::fill(packed.begin(), packed.end(), 0);
      for (std::size_t x = 0; x < dim; ++x)
        if (parity(table[x] & static_cast<std::uint32_t>(b))) packed[x / 64] |= std::uint64_t{1} << (x % 64);
      moebius_packed(packed, s.bits());
      const int d = std::max(max_set_weight(packed), 0);
      local_lo = std::min(local_lo, d);
      local_hi = std::max(local_hi, d);
    }
#pragma omp critical
    {
      lo = std::min(lo, local_lo);
      hi = std::max(hi, local_hi);
    }
  }
  if (hi < 0) return {0, 0};
  return {lo, hi};
}

std::vector<std::uint32_t> interpolation_coefficients(const SBox& s, std::uint32_t modulus, Exec exec) {
  const BinaryField field(modulus);
  if (field.bits() != s.bits()) throw std::invalid_argument("field degree must equal the S-box width");
  const std::uint32_t q = field.order();
  const std::uint64_t group = q - 1;
  const auto table = s.table();

  // Nonzero points as (log a, log s(a)); every other term vanishes.
  std::vector<std::uint32_t> log_a, log_s;
  std::uint32_t sum_all = 0;
  for (std::uint32_t a = 0; a < q; ++a) {
    sum_all ^= table[a];
    if (a != 0 && table[a] != 0) {
      log_a.push_back(field.log(a));
      log_s.push_back(field.log(table[a]));
    }
  }

  // P(X) = sum_a s(a) (1 + (X + a)^(q-1)) and every binomial C(q-1, k) is odd,
  // so c_0 = s(0), c_k = sum_{a != 0} s(a) a^(q-1-k) for 0 < k < q-1, and
  // c_{q-1} = sum_a s(a).
  std::vector<std::uint32_t> c(q, 0);
  c[0] = table[0];
  c[q - 1] = sum_all;
  const auto points = log_a.size();
  const auto last = static_cast<std::int64_t>(q - 1);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::int64_t k = 1; k < last; ++k) {
    const std::uint64_t e = group - static_cast<std::uint64_t>(k);
    std::uint32_t acc = 0;
    for (std::size_t p = 0; p < points; ++p)
      acc ^= field.exp(static_cast<std::uint32_t>((log_s[p] + static_cast<std::uint64_t>(log_a[p]) * e) % group));
    c[static_cast<std::size_t>(k)] = acc;
  }
  return c;
}

Interpolation interpolation_summary(const SBox& s, std::uint32_t modulus, Exec exec) {
  const auto c = interpolation_coefficients(s, modulus, exec);
  Interpolation out;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k] == 0) continue;
    ++out.terms;
    out.degree = static_cast<int>(k);
  }
  return out;
}

int algebraic_complexity(const SBox& s, std::uint32_t modulus, Exec exec) {
  return interpolation_summary(s, modulus, exec).degree + 1;
}

void MetricsReport::check_invariants() const {
  const std::int64_t size = std::int64_t{1} << bits;
  if (!(dap == Fraction{differential_uniformity, size})) throw std::logic_error("dap != DU / 2^n");
  if (!(linear_prob_max == Fraction{size - nonlinearity, size}))
    throw std::logic_error("max linear probability != 1/2 + (2^(n-1) - NL) / 2^n");
  if (!(lap == Fraction{size / 2 - nonlinearity, size})) throw std::logic_error("lap != (2^(n-1) - NL) / 2^n");
  if (interpolation_terms > size - 1) throw std::logic_error("permutation interpolant has a degree 2^n - 1 term");
}

MetricsReport full_report(const SBox& s, std::optional<std::uint32_t> modulus, Exec exec) {
  MetricsReport r;
  r.bits = s.bits();
  r.field_modulus = modulus ? *modulus : default_modulus(s.bits());
  if (poly_degree(r.field_modulus) != s.bits() || !is_irreducible(r.field_modulus))
    throw std::invalid_argument("field modulus must be irreducible of degree " + std::to_string(s.bits()));

  const auto degrees = component_degrees(s, exec);
  r.min_degree = degrees.min;
  r.max_degree = degrees.max;

  const auto interp = interpolation_summary(s, r.field_modulus, exec);
  r.algebraic_complexity = interp.degree + 1;
  r.interpolation_terms = interp.terms;

  const std::int64_t size = static_cast<std::int64_t>(s.size());
  r.nonlinearity = nonlinearity_sbox(lat(s, exec));
  r.linear_prob_max = max_linear_probability(s.bits(), r.nonlinearity);
  r.lap = {size / 2 - r.nonlinearity, size};

  const auto sac = sac_matrix(s);
  r.sac_avg = sac.average();
  r.sac_min = sac.min();
  r.sac_max = sac.max();
  r.bic_parameter = bic_parameter(s);

  r.differential_uniformity = differential_uniformity(ddt(s, exec));
  r.dap = {r.differential_uniformity, size};
  r.boomerang_uniformity = boomerang_uniformity(bct(s, exec));

  r.check_invariants();
  return r;
}

void write_table_csv(std::ostream& out, const DistributionTable& table) {
  for (std::size_t r = 0; r < table.dim(); ++r) {
    const auto row = table.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << row[c];
    }
    out << '\n';
  }
}

}  // namespace casbox
