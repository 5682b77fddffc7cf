#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "casbox/analysis.hpp"
#include "casbox/boolfn.hpp"
#include "casbox/ca.hpp"
#include "casbox/calibration.hpp"
#include "casbox/exec.hpp"
#include "casbox/fips.hpp"
#include "casbox/gf2n.hpp"
#include "casbox/report.hpp"
#include "casbox/rulesearch.hpp"
#include "casbox/sbox.hpp"

namespace casbox::cli {

namespace {

namespace fs = std::filesystem;

// Bad flag combinations that CLI11 cannot see; reported with exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Domain outcome that is not an error in the program (FIPS fail, not bijective).
struct DomainFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_binary(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::uint32_t parse_hex(const std::string& text) {
  std::string_view s = text;
  if (s.starts_with("0x") || s.starts_with("0X")) s.remove_prefix(2);
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw UsageError("not a hex number: '" + text + "'");
  return v;
}

const std::map<std::string, NeighborhoodOrder> kNeighborhoods{{"mirrored", NeighborhoodOrder::mirrored},
                                                              {"ascending", NeighborhoodOrder::ascending}};
const std::map<std::string, HalfPacking> kPackings{{"low-left", HalfPacking::low_left},
                                                   {"high-left", HalfPacking::high_left}};
const std::map<std::string, BitOrder> kBitOrders{{"lsb", BitOrder::lsb_first}, {"msb", BitOrder::msb_first}};
const std::map<std::string, SBoxFormat> kFormats{{"decimal", SBoxFormat::decimal}, {"hex", SBoxFormat::hex}};

// ---------------------------------------------------------------------------

struct RuleOptions {
  std::uint64_t number = 0;
  bool anf_only = false;
  std::string notation = "ascii";
  std::string bit_order = "lsb";
  std::string neighborhood = "mirrored";
};

int cmd_rule(const RuleOptions& o, std::ostream& out) {
  const BooleanRule rule = BooleanRule::from_number(o.number, kBitOrders.at(o.bit_order));
  const Anf anf = anf_of(rule);
  const auto notation = o.notation == "unicode" ? AnfNotation::unicode : AnfNotation::ascii;
  if (o.anf_only) {
    out << anf.to_string(notation) << '\n';
    return kOk;
  }
  const auto nb = kNeighborhoods.at(o.neighborhood);
  const auto yes = [](bool b) { return b ? "yes" : "no"; };
  out << "rule            " << o.number << '\n'
      << "truth table     0x" << std::hex << rule.truth_table() << std::dec << " (lsb-first)\n"
      << "anf             " << anf.to_string(notation) << '\n'
      << "degree          " << algebraic_degree(rule) << '\n'
      << "weight          " << hamming_weight(rule) << '\n'
      << "balanced        " << yes(is_balanced(rule)) << '\n'
      << "ci(1)           " << yes(is_correlation_immune(rule, 1)) << '\n'
      << "nonlinearity    " << nonlinearity(rule) << '\n'
      << "sac             " << yes(satisfies_sac(rule)) << '\n'
      << "bijective5      " << yes(is_bijective5(rule, nb)) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

struct SearchOptions {
  std::string from = "balanced";
  std::string to = "bijective";
  std::string checkpoint_dir;
  std::uint32_t shards = 1;
  std::uint32_t shard = 0;
  std::string seed;
  std::size_t blocks = fips::kDefaultBlocks;
  bool cheap_order = false;
  bool materialize = false;
  bool merge = false;
};

int cmd_search(const SearchOptions& o, std::ostream& out, std::ostream& err) {
  search::Stage from, to;
  try {
    from = search::parse_stage(o.from);
    to = search::parse_stage(o.to);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (o.shards == 0 || o.shard >= o.shards) throw UsageError("--shard must be below --shards");

  const auto emit = [&](const search::SearchCheckpoint& cp, const fs::path& path, std::uint32_t checksum) {
    char sum[9];
    std::snprintf(sum, sizeof sum, "%08x", checksum);
    out << "checkpoint stage=" << search::stage_name(cp.stage) << " count=" << cp.count << " shard=";
    if (cp.shard)
      out << cp.shard->index << '/' << cp.shard->count;
    else
      out << "0/1";
    out << " checksum=" << sum << " path=" << path.string() << std::endl;
  };

  if (o.merge) {
    const auto merged = search::merge_shards(o.checkpoint_dir, to, o.shards);
    const auto path = search::checkpoint_path(o.checkpoint_dir, to);
    emit(merged, path, search::read_checkpoint(path).file_checksum);
    return kOk;
  }

  search::PipelineConfig config;
  config.from = from;
  config.to = to;
  config.checkpoint_dir = o.checkpoint_dir;
  config.shard = {o.shards, o.shard};
  if (!o.seed.empty()) config.seed_path = o.seed;
  config.fips_blocks = o.blocks;
  config.cheap_order = o.cheap_order;
  config.materialize_balanced = o.materialize;
  config.on_stage = emit;
  config.progress = [&](std::string_view msg) { err << msg << std::endl; };
  search::run_pipeline(config);
  return kOk;
}

// ---------------------------------------------------------------------------

struct PrngOptions {
  std::uint64_t rule = kSelectedRuleNumber;
  std::string seed;
  std::size_t bits = 100'000;
  std::size_t ring = PrngConfig::kDefaultRingSize;
  std::size_t tap = PrngConfig::kDefaultTap;
  std::string out;
  bool hex = false;
  std::string neighborhood = "mirrored";
};

PrngConfig make_prng(std::uint64_t rule, const std::string& seed, std::size_t ring, std::size_t tap,
                     const std::string& neighborhood) {
  PrngConfig c;
  c.rule = BooleanRule::from_number(rule);
  c.ring_size = ring;
  c.tap_index = tap;
  c.seed = read_seed_file(seed, ring);
  c.order = kNeighborhoods.at(neighborhood);
  return c;
}

int cmd_prng(const PrngOptions& o, std::ostream& out) {
  if (!o.hex && o.out.empty()) throw UsageError("prng needs --out or --hex");
  const auto bits = prng_stream(make_prng(o.rule, o.seed, o.ring, o.tap, o.neighborhood), o.bits);
  const auto bytes = pack_bits(bits);
  if (o.hex) {
    char buf[3];
    for (std::size_t i = 0; i < bytes.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%02x", bytes[i]);
      out << buf << ((i + 1) % 32 == 0 || i + 1 == bytes.size() ? "\n" : "");
    }
  }
  if (!o.out.empty()) write_atomic(o.out, std::string(bytes.begin(), bytes.end()));
  return kOk;
}

// ---------------------------------------------------------------------------

struct FipsOptions {
  std::string input;
  std::optional<std::uint64_t> rule;
  std::string seed;
  std::optional<std::size_t> zero_stream;
  std::optional<std::size_t> blocks;
  std::string json;
  bool strict = false;
  std::string neighborhood = "mirrored";
};

int cmd_fips(const FipsOptions& o, std::ostream& out) {
  const int sources = (o.input.empty() ? 0 : 1) + (o.rule ? 1 : 0) + (o.zero_stream ? 1 : 0);
  if (sources != 1) throw UsageError("fips needs exactly one of --input, --rule, --zero-stream");

  std::vector<std::uint8_t> bits;
  if (o.zero_stream) {
    bits.assign(*o.zero_stream, 0);
  } else if (!o.input.empty()) {
    const std::string raw = read_binary(o.input);
    bits = unpack_bits(std::span(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()), raw.size() * 8);
  } else {
    if (o.seed.empty()) throw UsageError("--rule needs --seed");
    const std::size_t blocks = o.blocks.value_or(fips::kDefaultBlocks);
    bits = prng_stream(make_prng(*o.rule, o.seed, PrngConfig::kDefaultRingSize, PrngConfig::kDefaultTap,
                                 o.neighborhood),
                       blocks * fips::kBlockBits);
  }
  const std::size_t blocks = o.blocks.value_or(bits.size() / fips::kBlockBits);
  if (blocks == 0 || blocks * fips::kBlockBits > bits.size())
    throw UsageError("the stream holds " + std::to_string(bits.size()) + " bits, fewer than " +
                     std::to_string(std::max<std::size_t>(blocks, 1)) + " blocks of 20000");
  const auto report = fips::battery(std::span(bits).first(blocks * fips::kBlockBits), blocks);
  write_fips_table(out, report);
  if (!o.json.empty()) write_atomic(o.json, to_json(report).dump(2) + "\n");
  // A failing battery is always a domain failure; --strict is accepted for
  // scripts that pass it explicitly.
  return report.pass ? kOk : kDomainFailure;
}

// ---------------------------------------------------------------------------

struct BuildOptions {
  std::uint64_t rule = kSelectedRuleNumber;
  std::string out;
  std::string format = "decimal";
  bool no_affine = false;
  bool calibrate = false;
  std::string calibration_json;
  std::string neighborhood = "mirrored";
  std::string packing = "low-left";
  bool final_swap = false;
};

int cmd_calibrate(std::uint64_t rule, const std::string& json, std::ostream& out) {
  if (rule > 0xFFFFFFFFull) throw UsageError("rule number must be below 2^32");
  const auto report = calibrate(static_cast<std::uint32_t>(rule));
  write_calibration_text(out, report);
  if (!json.empty()) write_atomic(json, to_json(report).dump(2) + "\n");
  return report.chosen ? kOk : kDomainFailure;
}

int cmd_build(const BuildOptions& o, std::ostream& out) {
  if (o.calibrate) return cmd_calibrate(o.rule, o.calibration_json, out);
  if (o.out.empty()) throw UsageError("build needs --out");
  const BooleanRule rule = BooleanRule::from_number(o.rule);
  FeistelConventions conv;
  conv.neighborhood = kNeighborhoods.at(o.neighborhood);
  conv.packing = kPackings.at(o.packing);
  conv.final_swap = o.final_swap;
  if (!is_bijective5(rule, conv.neighborhood))
    throw DomainFailure("rule " + std::to_string(o.rule) + " is not bijective on the 5-cell ring");
  auto spec = LayerSpec::eleven_layer(rule);
  if (o.no_affine) spec = spec.without_affine();
  const SBox s = build_sbox(spec, conv);
  std::ostringstream text;
  write_sbox(text, s, kFormats.at(o.format));
  write_atomic(o.out, text.str());
  out << "wrote " << s.size() << "-entry S-box to " << o.out << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

struct AnalyzeOptions {
  std::string file;
  std::string field_modulus;
  std::vector<std::string> tables;
  std::string csv_dir;
  std::string out;
  std::string format = "decimal";
};

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out) {
  if (!o.tables.empty() && o.csv_dir.empty()) throw UsageError("--tables needs --csv-dir");
  const SBox s = read_sbox_file(o.file, kFormats.at(o.format));
  std::optional<std::uint32_t> modulus;
  if (!o.field_modulus.empty()) modulus = parse_hex(o.field_modulus);
  MetricsReport report;
  try {
    report = full_report(s, modulus);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  write_metrics_text(out, report);
  if (!o.out.empty()) write_atomic(o.out, to_json(report).dump(2) + "\n");
  for (const auto& name : o.tables) {
    std::ostringstream csv;
    if (name == "ddt")
      write_table_csv(csv, ddt(s));
    else if (name == "lat")
      write_table_csv(csv, lat(s));
    else if (name == "bct")
      write_table_csv(csv, bct(s));
    else
      throw UsageError("unknown table '" + name + "'");
    write_atomic(fs::path(o.csv_dir) / (name + ".csv"), csv.str());
  }
  return kOk;
}

}  // namespace

std::string version_text() {
  return "casbox 1.0\n"
         "truth-table bit order: lsb-first (rule number = sum of f(x) * 2^x, x = x0 + 2*x1 + ... + 16*x4)\n"
         "neighbourhood: x0..x4 = cells i+2, i+1, i, i-1, i-2 of the ring\n"
         "feistel: L = bits 0-4, R = bits 5-9, (L, R) -> (R, L ^ f(R)), no final swap\n"
         "field modulus: 0x409 for 10-bit, 0x11b for 8-bit S-boxes\n"
         "prng: 1024-cell ring, tap 512, bit taken after each step";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cellular-automaton S-box toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_text);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: all processors)")->check(CLI::PositiveNumber);

  const auto nb_check = CLI::IsMember({"mirrored", "ascending"});

  RuleOptions ro;
  auto* rule = app.add_subcommand("rule", "Inspect a 5-variable rule");
  rule->add_option("number", ro.number, "Rule number")->required();
  rule->add_flag("--anf", ro.anf_only, "Print only the algebraic normal form");
  rule->add_option("--notation", ro.notation, "ANF notation")->check(CLI::IsMember({"ascii", "unicode"}));
  rule->add_option("--bit-order", ro.bit_order, "Truth-table bit order")->check(CLI::IsMember({"lsb", "msb"}));
  rule->add_option("--neighborhood", ro.neighborhood, "Cell-to-variable mapping")->check(nb_check);

  SearchOptions so;
  auto* srch = app.add_subcommand("search", "Run the rule filtering pipeline");
  srch->add_option("--from", so.from, "First stage");
  srch->add_option("--to", so.to, "Last stage");
  srch->add_option("--checkpoint-dir", so.checkpoint_dir, "Directory for stage checkpoints")->required();
  srch->add_option("--shards", so.shards, "Number of contiguous rule ranges")->check(CLI::PositiveNumber);
  srch->add_option("--shard", so.shard, "Index of the range to run");
  srch->add_option("--seed", so.seed, "1024-bit seed file for the fips stage")->check(CLI::ExistingFile);
  srch->add_option("--blocks", so.blocks, "20000-bit blocks per FIPS screen")->check(CLI::PositiveNumber);
  srch->add_flag("--cheap-order", so.cheap_order, "Run bijective before fips");
  srch->add_flag("--materialize-balanced", so.materialize, "List every balanced rule in its checkpoint");
  srch->add_flag("--merge", so.merge, "Merge the shard checkpoints of --to");

  PrngOptions po;
  auto* prng = app.add_subcommand("prng", "Generate a ring-CA bit stream");
  prng->add_option("--rule", po.rule, "Rule number");
  prng->add_option("--seed", po.seed, "1024-bit seed file")->required()->check(CLI::ExistingFile);
  prng->add_option("--bits", po.bits, "Number of bits to emit")->check(CLI::PositiveNumber);
  prng->add_option("--ring", po.ring, "Ring size in cells");
  prng->add_option("--tap", po.tap, "Cell read after each step");
  prng->add_option("--out", po.out, "Raw packed output file");
  prng->add_flag("--hex", po.hex, "Print the stream as hex");
  prng->add_option("--neighborhood", po.neighborhood, "Cell-to-variable mapping")->check(nb_check);

  FipsOptions fo;
  auto* fipsc = app.add_subcommand("fips", "Run the FIPS 140-2 battery");
  fipsc->add_option("--input", fo.input, "Raw packed bit file")->check(CLI::ExistingFile);
  fipsc->add_option("--rule", fo.rule, "Test the ring-CA stream of a rule");
  fipsc->add_option("--seed", fo.seed, "1024-bit seed file for --rule")->check(CLI::ExistingFile);
  fipsc->add_option("--zero-stream", fo.zero_stream, "Test N zero bits");
  fipsc->add_option("--blocks", fo.blocks, "Number of 20000-bit blocks")->check(CLI::PositiveNumber);
  fipsc->add_option("--json", fo.json, "Write the JSON report here");
  fipsc->add_flag("--strict", fo.strict, "Accepted for compatibility; a failing battery always exits 1");
  fipsc->add_option("--neighborhood", fo.neighborhood, "Cell-to-variable mapping")->check(nb_check);

  BuildOptions bo;
  auto* build = app.add_subcommand("build", "Build the 10-bit S-box");
  build->add_option("--rule", bo.rule, "Rule number");
  build->add_option("--out", bo.out, "S-box output file");
  build->add_option("--format", bo.format, "Value format")->check(CLI::IsMember({"decimal", "hex"}));
  build->add_flag("--no-affine", bo.no_affine, "Drop the three affine layers");
  build->add_flag("--calibrate", bo.calibrate, "Enumerate the convention variants instead");
  build->add_option("--calibration-json", bo.calibration_json, "JSON calibration report path");
  build->add_option("--neighborhood", bo.neighborhood, "Cell-to-variable mapping")->check(nb_check);
  build->add_option("--packing", bo.packing, "Which 5 bits hold the left half")->check(CLI::IsMember({"low-left", "high-left"}));
  build->add_flag("--final-swap", bo.final_swap, "Swap the halves after the last round");

  AnalyzeOptions ao;
  auto* analyze = app.add_subcommand("analyze", "Compute the metric suite of an S-box file");
  analyze->add_option("file", ao.file)->required()->check(CLI::ExistingFile);
  analyze->add_option("--field-modulus", ao.field_modulus, "Irreducible modulus in hex");
  analyze->add_option("--tables", ao.tables, "Tables to dump: ddt, lat, bct")->delimiter(',');
  analyze->add_option("--csv-dir", ao.csv_dir, "Directory for the table CSV files");
  analyze->add_option("--out", ao.out, "JSON report path");
  analyze->add_option("--format", ao.format, "Value format of the input file")->check(CLI::IsMember({"decimal", "hex"}));

  std::uint64_t cal_rule = kSelectedRuleNumber;
  std::string cal_json;
  auto* cal = app.add_subcommand("calibrate", "Match the convention variants against NL/DU/BU 434/14/24");
  cal->add_option("--rule", cal_rule, "Rule number");
  cal->add_option("--json", cal_json, "JSON report path");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  try {
    if (threads > 0) set_worker_count(threads);
    if (*rule) return cmd_rule(ro, out);
    if (*srch) return cmd_search(so, out, err);
    if (*prng) return cmd_prng(po, out);
    if (*fipsc) return cmd_fips(fo, out);
    if (*build) return cmd_build(bo, out);
    if (*analyze) return cmd_analyze(ao, out);
    if (*cal) return cmd_calibrate(cal_rule, cal_json, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::out_of_range& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DomainFailure& e) {
    err << "failed: " << e.what() << '\n';
    return kDomainFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDomainFailure;
  }
  return kUsageError;
}

}  // namespace casbox::cli
