#include "casbox/rulesearch.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <stdexcept>

#include "casbox/boolfn.hpp"
#include "casbox/fips.hpp"

namespace casbox::search {

namespace {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

// #{v < x : popcount(v) = 16}, x <= 2^32.
std::uint64_t balanced_below(std::uint64_t x) {
  if (x >= kRuleSpace) return kBalancedCount;
  std::uint64_t total = 0;
  int ones = 0;
  for (int p = 31; p >= 0; --p) {
    if ((x >> p) & 1u) {
      total += binomial(p, 16 - ones);
      ++ones;
      if (ones > 16) break;
    }
  }
  return total;
}

std::uint64_t next_same_weight(std::uint64_t v) {
  const std::uint64_t c = v & (~v + 1);
  const std::uint64_t r = v + c;
  return (((r ^ v) >> 2) / c) | r;
}

// Balanced enumeration is split into this many chunks per shard so the
// parallel loop stays balanced; results are concatenated in chunk order.
constexpr std::uint64_t kEnumerationChunks = 4096;

}  // namespace

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::balanced: return "balanced";
    case Stage::ci1: return "ci1";
    case Stage::nonlinear: return "nonlinear";
    case Stage::sac: return "sac";
    case Stage::fips: return "fips";
    case Stage::bijective: return "bijective";
  }
  return "unknown";
}

Stage parse_stage(std::string_view name) {
  for (Stage s : canonical_order())
    if (stage_name(s) == name) return s;
  throw std::invalid_argument("unknown stage '" + std::string(name) + "'");
}

std::vector<Stage> canonical_order() {
  return {Stage::balanced, Stage::ci1, Stage::nonlinear, Stage::sac, Stage::fips, Stage::bijective};
}

std::vector<Stage> cheap_order() {
  return {Stage::balanced, Stage::ci1, Stage::nonlinear, Stage::sac, Stage::bijective, Stage::fips};
}

void Shard::validate() const {
  if (count == 0) throw std::invalid_argument("shard count must be positive");
  if (index >= count) throw std::invalid_argument("shard index must be below the shard count");
}

std::optional<std::uint64_t> next_with_weight(std::uint64_t from, int weight, std::uint64_t limit) {
  if (weight < 0 || weight > 63) return std::nullopt;
  std::uint64_t v = from;
  while (v < limit) {
    const int p = std::popcount(v);
    if (p == weight) return v;
    if (p < weight) {
      // Setting the lowest clear bits is the smallest increase that reaches the weight.
      for (int need = weight - p; need > 0; --need) v |= v + 1;
      return v < limit ? std::optional<std::uint64_t>(v) : std::nullopt;
    }
    // Every value sharing v's bits above the lowest set bit is too heavy.
    v += v & (~v + 1);
  }
  return std::nullopt;
}

BalancedEnumerator::BalancedEnumerator(std::uint64_t begin, std::uint64_t end)
    : current_(0), end_(std::min(end, kRuleSpace)), done_(false) {
  const auto first = next_with_weight(begin, 16, end_);
  if (first)
    current_ = *first;
  else
    done_ = true;
}

std::optional<std::uint32_t> BalancedEnumerator::next() {
  if (done_) return std::nullopt;
  const auto out = static_cast<std::uint32_t>(current_);
  current_ = next_same_weight(current_);
  if (current_ >= end_) done_ = true;
  return out;
}

std::uint64_t count_balanced(std::uint64_t begin, std::uint64_t end) {
  end = std::min(end, kRuleSpace);
  if (begin >= end) return 0;
  return balanced_below(end) - balanced_below(begin);
}

bool passes(Stage stage, std::uint32_t number, const FipsStageConfig* fips) {
  const BooleanRule rule(number);
  switch (stage) {
    case Stage::balanced: return is_balanced(rule);
    case Stage::ci1: return is_correlation_immune(rule, 1);
    // Affine functions (degree <= 1) are the ones removed.
    case Stage::nonlinear: return algebraic_degree(rule) >= 2;
    case Stage::sac: return satisfies_sac(rule);
    case Stage::bijective: return is_bijective5(rule, fips ? fips->order : kDefaultNeighborhood);
    case Stage::fips: {
      if (!fips) throw std::invalid_argument("fips stage needs a seed configuration");
      PrngConfig cfg;
      cfg.rule = rule;
      cfg.seed = fips->seed;
      cfg.order = fips->order;
      return fips::screen(cfg, fips->blocks);
    }
  }
  return false;
}

std::vector<std::uint32_t> stage_filter(std::span<const std::uint32_t> input, Stage stage,
                                        const FipsStageConfig* fips, Exec exec) {
  if (stage == Stage::fips && !fips) throw std::invalid_argument("fips stage needs a seed configuration");
  std::vector<std::uint8_t> keep(input.size(), 0);
  const auto n = static_cast<std::int64_t>(input.size());
  // FIPS checks are uneven in cost (early exits), so schedule dynamically.
#pragma omp parallel for schedule(dynamic, 16) if (exec == Exec::parallel)
  for (std::int64_t i = 0; i < n; ++i) keep[i] = passes(stage, input[i], fips) ? 1 : 0;

  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < input.size(); ++i)
    if (keep[i]) out.push_back(input[i]);
  return out;
}

std::vector<std::uint32_t> enumerate_balanced_filtered(const Shard& shard, std::span<const Stage> then,
                                                       Exec exec) {
  shard.validate();
  for (Stage s : then)
    if (s == Stage::fips) throw std::invalid_argument("fips cannot be fused into the enumeration");

  const std::uint64_t begin = shard.begin(), end = shard.end();
  const std::uint64_t span = end - begin;
  const std::uint64_t chunks = std::min<std::uint64_t>(kEnumerationChunks, std::max<std::uint64_t>(span, 1));
  std::vector<std::vector<std::uint32_t>> parts(chunks);

  const auto chunk_count = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::parallel)
  for (std::int64_t c = 0; c < chunk_count; ++c) {
    const auto uc = static_cast<std::uint64_t>(c);
    BalancedEnumerator it(begin + span * uc / chunks, begin + span * (uc + 1) / chunks);
    auto& part = parts[static_cast<std::size_t>(c)];
    while (auto r = it.next()) {
      bool ok = true;
      for (Stage s : then) {
        if (!passes(s, *r)) {
          ok = false;
          break;
        }
      }
      if (ok) part.push_back(*r);
    }
  }

  std::vector<std::uint32_t> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::vector<std::uint32_t> stage_fips(std::span<const std::uint32_t> input, const FipsStageConfig& config,
                                      Exec exec) {
  return stage_filter(input, Stage::fips, &config, exec);
}

SearchCheckpoint run_pipeline(const PipelineConfig& config) {
  config.shard.validate();
  const auto order = config.cheap_order ? cheap_order() : canonical_order();
  const auto position = [&](Stage s) {
    return static_cast<std::size_t>(std::find(order.begin(), order.end(), s) - order.begin());
  };
  const std::size_t first = position(config.from), last = position(config.to);
  if (first > last) throw std::invalid_argument("--from stage comes after --to stage");

  const std::optional<Shard> shard = config.shard.count > 1 ? std::optional(config.shard) : std::nullopt;
  const auto report = [&](const std::string& msg) {
    if (config.progress) config.progress(msg);
  };

  FipsStageConfig fips_config;
  fips_config.blocks = config.fips_blocks;
  for (std::size_t i = first; i <= last; ++i) {
    if (order[i] != Stage::fips) continue;
    if (!config.seed_path) throw std::invalid_argument("the fips stage needs a seed file");
    fips_config.seed = read_seed_file(*config.seed_path);
  }

  SearchCheckpoint prev;
  std::uint32_t prev_checksum = 0;
  if (first > 0) {
    const Stage before = order[first - 1];
    const auto own = checkpoint_path(config.checkpoint_dir, before, shard);
    if (shard && std::filesystem::exists(own)) {
      prev = read_checkpoint(own);
    } else {
      prev = read_checkpoint(checkpoint_path(config.checkpoint_dir, before));
      if (shard) {
        std::erase_if(prev.rules, [&](std::uint32_t r) { return !shard->contains(r); });
        prev.count = prev.implicit ? count_balanced(shard->begin(), shard->end()) : prev.rules.size();
      }
    }
    if (prev.stage != before) throw CheckpointError("prerequisite checkpoint has the wrong stage");
    prev_checksum = prev.file_checksum;
  }

  for (std::size_t i = first; i <= last; ++i) {
    const Stage stage = order[i];
    SearchCheckpoint cp;
    cp.stage = stage;
    cp.shard = shard;
    cp.input_checksum = prev_checksum;
    const auto path = checkpoint_path(config.checkpoint_dir, stage, shard);
    std::uint32_t checksum = 0;
    std::uint64_t scanned = prev.count;

    if (stage == Stage::balanced) {
      scanned = config.shard.end() - config.shard.begin();
      cp.count = count_balanced(config.shard.begin(), config.shard.end());
      if (config.materialize_balanced) {
        checksum = write_balanced_listed(path, config.shard, prev_checksum);
      } else {
        cp.implicit = true;
        checksum = write_checkpoint(path, cp);
      }
    } else {
      if (prev.stage == Stage::balanced && prev.implicit) {
        const std::array<Stage, 1> only{stage};
        cp.rules = enumerate_balanced_filtered(config.shard, only, config.exec);
      } else {
        cp.rules = stage_filter(prev.rules, stage, &fips_config, config.exec);
      }
      cp.count = cp.rules.size();
      checksum = write_checkpoint(path, cp);
    }

    report("stage " + std::string(stage_name(stage)) + ": scanned " + std::to_string(scanned) +
           ", survivors " + std::to_string(cp.count));
    if (config.on_stage) config.on_stage(cp, path, checksum);
    prev = std::move(cp);
    prev_checksum = checksum;
  }
  return prev;
}

}  // namespace casbox::search
