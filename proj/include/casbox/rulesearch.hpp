#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "casbox/ca.hpp"
#include "casbox/exec.hpp"

namespace casbox::search {

enum class Stage { balanced, ci1, nonlinear, sac, fips, bijective };

std::string_view stage_name(Stage s);
// Throws std::invalid_argument for unknown names.
Stage parse_stage(std::string_view name);

// The order the filters are published in, and the cheap order that runs the
// bijectivity filter before the expensive FIPS stage.
std::vector<Stage> canonical_order();
std::vector<Stage> cheap_order();

inline constexpr std::uint64_t kRuleSpace = std::uint64_t{1} << 32;
inline constexpr std::uint64_t kBalancedCount = 601'080'390;  // C(32, 16)

// Contiguous slice [begin, end) of the 2^32 rule numbers.
struct Shard {
  std::uint32_t count = 1;
  std::uint32_t index = 0;

  std::uint64_t begin() const { return kRuleSpace * index / count; }
  std::uint64_t end() const { return kRuleSpace * (index + 1) / count; }
  bool contains(std::uint64_t rule) const { return rule >= begin() && rule < end(); }
  void validate() const;
};

// Smallest value >= from whose popcount is `weight`, or nullopt if none is
// below `limit`.
std::optional<std::uint64_t> next_with_weight(std::uint64_t from, int weight, std::uint64_t limit);

// Yields the balanced rules of [begin, end) in increasing order by walking
// 16-subsets of the 32 truth-table positions.
class BalancedEnumerator {
 public:
  explicit BalancedEnumerator(std::uint64_t begin = 0, std::uint64_t end = kRuleSpace);

  std::optional<std::uint32_t> next();

 private:
  std::uint64_t current_;
  std::uint64_t end_;
  bool done_;
};

// Number of balanced rules in [begin, end), by combinatorial counting.
std::uint64_t count_balanced(std::uint64_t begin, std::uint64_t end);

struct FipsStageConfig {
  std::vector<std::uint8_t> seed;
  std::size_t blocks = 5;  // 20,000 bits each
  NeighborhoodOrder order = kDefaultNeighborhood;
};

// True iff `rule` survives the filter of `stage`. The fips stage needs a config.
bool passes(Stage stage, std::uint32_t rule, const FipsStageConfig* fips = nullptr);

// Order-preserving filter. Results are identical for either policy.
std::vector<std::uint32_t> stage_filter(std::span<const std::uint32_t> input, Stage stage,
                                        const FipsStageConfig* fips = nullptr,
                                        Exec exec = Exec::parallel);

// Enumerates the balanced rules of a shard and keeps those passing every
// filter in `then` (applied in order), without materialising the balanced set.
std::vector<std::uint32_t> enumerate_balanced_filtered(const Shard& shard, std::span<const Stage> then,
                                                       Exec exec = Exec::parallel);

std::vector<std::uint32_t> stage_fips(std::span<const std::uint32_t> input, const FipsStageConfig& config,
                                      Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// Checkpoints

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SearchCheckpoint {
  Stage stage = Stage::balanced;
  std::uint64_t count = 0;
  std::uint32_t input_checksum = 0;
  std::optional<Shard> shard;
  // The balanced stage is normally not written out rule by rule; an implicit
  // checkpoint stands for the canonical enumeration of its shard.
  bool implicit = false;
  std::vector<std::uint32_t> rules;
  // Checksum line of the file this was read from; not part of the header.
  std::uint32_t file_checksum = 0;

  // Throws CheckpointError on a broken invariant (ordering, count).
  void validate() const;
};

// Text format:
//   # casbox search checkpoint v1
//   stage: sac
//   count: 7080
//   input-checksum: 1a2b3c4d
//   shard: 0/1            (sharded checkpoints only)
//   rules: listed | implicit
//   <one decimal rule per line>
//   checksum: <crc32 of every preceding byte, 8 hex digits>
std::string serialize_checkpoint(const SearchCheckpoint& cp);
SearchCheckpoint parse_checkpoint(std::string_view text);
std::uint32_t checkpoint_checksum(std::string_view serialized);

// Atomic write (temp file + rename). Returns the checksum line's value.
std::uint32_t write_checkpoint(const std::filesystem::path& path, const SearchCheckpoint& cp);
// Streams the listed balanced checkpoint of a shard without holding it in memory.
std::uint32_t write_balanced_listed(const std::filesystem::path& path, const Shard& shard,
                                    std::uint32_t input_checksum);
SearchCheckpoint read_checkpoint(const std::filesystem::path& path);

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, Stage stage,
                                      const std::optional<Shard>& shard = std::nullopt);

// Concatenates the k shard checkpoints of `stage` in shard order into the
// unsharded checkpoint and returns it.
SearchCheckpoint merge_shards(const std::filesystem::path& dir, Stage stage, std::uint32_t shards);

// ---------------------------------------------------------------------------
// Pipeline

struct PipelineConfig {
  Stage from = Stage::balanced;
  Stage to = Stage::bijective;
  std::filesystem::path checkpoint_dir;
  Shard shard;
  std::optional<std::filesystem::path> seed_path;
  std::size_t fips_blocks = 5;
  bool cheap_order = false;
  bool materialize_balanced = false;
  Exec exec = Exec::parallel;
  // Called once per completed stage.
  std::function<void(const SearchCheckpoint&, const std::filesystem::path&, std::uint32_t checksum)>
      on_stage;
  std::function<void(std::string_view)> progress;
};

// Runs the stages from..to of the active order, writing a checkpoint after each.
// Throws CheckpointError when the checkpoint preceding `from` is missing or corrupt.
SearchCheckpoint run_pipeline(const PipelineConfig& config);

}  // namespace casbox::search
