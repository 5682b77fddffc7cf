#include "casbox/fips.hpp"

#include <algorithm>
#include <stdexcept>

namespace casbox::fips {

namespace {

void require_block(std::span<const std::uint8_t> block) {
  if (block.size() != kBlockBits) throw std::invalid_argument("FIPS block must be exactly 20000 bits");
}

int count_ones(std::span<const std::uint8_t> bits) {
  int n = 0;
  for (auto b : bits) n += b & 1;
  return n;
}

// sum of squared nibble frequencies over the 5000 nibbles of a block.
long long poker_square_sum(std::span<const std::uint8_t> block) {
  std::array<long long, 16> freq{};
  for (std::size_t i = 0; i < kBlockBits; i += 4) {
    const unsigned v = ((block[i] & 1u) << 3) | ((block[i + 1] & 1u) << 2) |
                       ((block[i + 2] & 1u) << 1) | (block[i + 3] & 1u);
    ++freq[v];
  }
  long long sum = 0;
  for (auto f : freq) sum += f * f;
  return sum;
}

// counts[0..5]: 0-runs of length 1..6+, counts[6..11]: 1-runs.
std::vector<int> run_histogram(std::span<const std::uint8_t> block, int& longest) {
  std::vector<int> counts(12, 0);
  longest = 0;
  std::size_t i = 0;
  while (i < block.size()) {
    const std::uint8_t bit = block[i] & 1u;
    std::size_t j = i;
    while (j < block.size() && (block[j] & 1u) == bit) ++j;
    const int len = static_cast<int>(j - i);
    longest = std::max(longest, len);
    counts[(bit ? 6 : 0) + std::min(len, 6) - 1]++;
    i = j;
  }
  return counts;
}

std::uint16_t word16(std::span<const std::uint8_t> bits, std::size_t at) {
  std::uint16_t w = 0;
  for (std::size_t k = 0; k < kContinuousBlockBits; ++k)
    w = static_cast<std::uint16_t>((w << 1) | (bits[at + k] & 1u));
  return w;
}

// Block tests with the verdict only.
bool block_passes(std::span<const std::uint8_t> block) {
  const int ones = count_ones(block);
  if (ones <= kMonobitLow || ones >= kMonobitHigh) return false;

  // 2.16 < 16/5000 * S - 5000 < 46.17, scaled by 5000 and kept in integers.
  const long long scaled = 16 * poker_square_sum(block) - 25'000'000;
  if (scaled <= 10'800 || scaled >= 230'850) return false;

  int longest = 0;
  const auto counts = run_histogram(block, longest);
  if (longest >= kLongRunThreshold) return false;
  for (int i = 0; i < 12; ++i) {
    const auto& iv = kRunIntervals[i % 6];
    if (counts[i] < iv.low || counts[i] > iv.high) return false;
  }
  return true;
}

}  // namespace

std::string_view test_name(Test t) {
  switch (t) {
    case Test::monobit: return "monobit";
    case Test::poker: return "poker";
    case Test::runs: return "runs";
    case Test::long_run: return "long_run";
    case Test::continuous_run: return "continuous_run";
  }
  return "unknown";
}

TestResult monobit(std::span<const std::uint8_t> block) {
  require_block(block);
  TestResult r;
  r.test = Test::monobit;
  const int ones = count_ones(block);
  r.statistic = ones;
  r.pass = ones > kMonobitLow && ones < kMonobitHigh;
  r.bounds = "9725 < ones < 10275";
  return r;
}

TestResult poker(std::span<const std::uint8_t> block) {
  require_block(block);
  TestResult r;
  r.test = Test::poker;
  const long long sum = poker_square_sum(block);
  const long long scaled = 16 * sum - 25'000'000;
  r.statistic = static_cast<double>(scaled) / 5000.0;
  r.pass = scaled > 10'800 && scaled < 230'850;
  r.bounds = "2.16 < X < 46.17";
  return r;
}

TestResult runs(std::span<const std::uint8_t> block) {
  require_block(block);
  TestResult r;
  r.test = Test::runs;
  int longest = 0;
  r.counts = run_histogram(block, longest);
  r.pass = true;
  int total = 0;
  for (int i = 0; i < 12; ++i) {
    const auto& iv = kRunIntervals[i % 6];
    total += r.counts[i];
    if (r.counts[i] < iv.low || r.counts[i] > iv.high) r.pass = false;
  }
  r.statistic = total;
  r.bounds = "1:2315-2685 2:1114-1386 3:527-723 4:240-384 5:103-209 6+:103-209";
  return r;
}

TestResult long_run(std::span<const std::uint8_t> block) {
  require_block(block);
  TestResult r;
  r.test = Test::long_run;
  int longest = 0;
  run_histogram(block, longest);
  r.statistic = longest;
  r.pass = longest < kLongRunThreshold;
  r.bounds = "longest run < 26";
  return r;
}

TestResult continuous_run(std::span<const std::uint8_t> stream) {
  if (stream.size() < 2 * kContinuousBlockBits)
    throw std::invalid_argument("continuous run test needs at least 32 bits");
  TestResult r;
  r.test = Test::continuous_run;
  int repeats = 0;
  std::uint16_t prev = word16(stream, 0);
  for (std::size_t at = kContinuousBlockBits; at + kContinuousBlockBits <= stream.size();
       at += kContinuousBlockBits) {
    const std::uint16_t cur = word16(stream, at);
    if (cur == prev) ++repeats;
    prev = cur;
  }
  r.statistic = repeats;
  r.pass = repeats == 0;
  r.bounds = "no equal consecutive 16-bit blocks";
  return r;
}

FipsReport battery(std::span<const std::uint8_t> stream, std::size_t blocks) {
  if (blocks == 0 || stream.size() != blocks * kBlockBits)
    throw std::invalid_argument("stream must hold exactly blocks * 20000 bits");
  FipsReport report;
  report.pass = true;
  for (std::size_t b = 0; b < blocks; ++b) {
    const auto block = stream.subspan(b * kBlockBits, kBlockBits);
    for (auto result : {monobit(block), poker(block), runs(block), long_run(block)}) {
      result.block = static_cast<int>(b);
      report.pass = report.pass && result.pass;
      report.results.push_back(std::move(result));
    }
  }
  auto cont = continuous_run(stream);
  report.pass = report.pass && cont.pass;
  report.results.push_back(std::move(cont));
  return report;
}

bool screen(const PrngConfig& config, std::size_t blocks) {
  if (blocks == 0) throw std::invalid_argument("at least one block required");
  PrngStream stream(config);
  std::vector<std::uint8_t> block(kBlockBits);
  bool have_prev = false;
  std::uint16_t prev = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    stream.generate(block);
    if (!block_passes(block)) return false;
    // kBlockBits is a multiple of 16, so 16-bit words never straddle blocks.
    for (std::size_t at = 0; at < kBlockBits; at += kContinuousBlockBits) {
      const std::uint16_t cur = word16(block, at);
      if (have_prev && cur == prev) return false;
      prev = cur;
      have_prev = true;
    }
  }
  return true;
}

}  // namespace casbox::fips
