#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "casbox/ca.hpp"

namespace casbox::fips {

// FIPS 140-2 (change notice) bounds. Every bound is strict.
inline constexpr std::size_t kBlockBits = 20000;
inline constexpr std::size_t kDefaultBlocks = 5;

inline constexpr int kMonobitLow = 9725;
inline constexpr int kMonobitHigh = 10275;

inline constexpr double kPokerLow = 2.16;
inline constexpr double kPokerHigh = 46.17;

struct RunInterval {
  int low;
  int high;  // inclusive
};
// Runs of length 1, 2, 3, 4, 5 and 6+; the same table applies to 0-runs and 1-runs.
inline constexpr std::array<RunInterval, 6> kRunIntervals = {
    {{2315, 2685}, {1114, 1386}, {527, 723}, {240, 384}, {103, 209}, {103, 209}}};

inline constexpr int kLongRunThreshold = 26;
inline constexpr std::size_t kContinuousBlockBits = 16;

enum class Test { monobit, poker, runs, long_run, continuous_run };
std::string_view test_name(Test t);

struct TestResult {
  Test test;
  int block = -1;  // -1: whole stream
  bool pass = false;
  double statistic = 0.0;
  std::string bounds;
  // runs: counts for 0-runs of length 1..6+, then 1-runs of length 1..6+.
  std::vector<int> counts;
};

struct FipsReport {
  std::vector<TestResult> results;
  bool pass = false;
};

// Each of these takes exactly kBlockBits bits (one per element) and throws
// std::invalid_argument otherwise.
TestResult monobit(std::span<const std::uint8_t> block);
TestResult poker(std::span<const std::uint8_t> block);
TestResult runs(std::span<const std::uint8_t> block);
TestResult long_run(std::span<const std::uint8_t> block);

// Fails iff two consecutive non-overlapping 16-bit blocks are equal.
// Requires at least 32 bits.
TestResult continuous_run(std::span<const std::uint8_t> stream);

// Splits the stream into `blocks` blocks of 20,000 bits, runs the four block
// tests on each and the continuous test on the whole stream.
FipsReport battery(std::span<const std::uint8_t> stream, std::size_t blocks = kDefaultBlocks);

// Same verdict as battery(prng_stream(config, blocks * 20000)).pass, but
// generates block by block and stops at the first failure.
bool screen(const PrngConfig& config, std::size_t blocks = kDefaultBlocks);

}  // namespace casbox::fips
