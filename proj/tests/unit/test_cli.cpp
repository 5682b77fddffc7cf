#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "casbox/sbox.hpp"
#include "cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "casbox");
  std::ostringstream out, err;
  const int status = casbox::cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("casbox-cli-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const std::string kSeed = CASBOX_TEST_DATA "/seed.hex";

}  // namespace

TEST_CASE("rule --anf prints the algebraic normal form") {
  auto r = run({"rule", "1438886595", "--anf"});
  CHECK(r.status == 0);
  CHECK(r.out == "x0*x3 + x1*x3 + x2*x3 + x3*x4 + x1 + x2 + x3 + 1\n");
  r = run({"rule", "1438886595", "--anf", "--notation", "unicode"});
  CHECK(r.out == "x₀x₃⊕x₁x₃⊕x₂x₃⊕x₃x₄⊕x₁⊕x₂⊕x₃⊕1\n");
}

TEST_CASE("rule report matches its golden file") {
  const auto r = run({"rule", "1438886595"});
  CHECK(r.status == 0);
  CHECK(r.out == slurp(CASBOX_TEST_DATA "/golden/rule_1438886595.txt"));
}

TEST_CASE("version lists the conventions") {
  const auto r = run({"--version"});
  CHECK(r.status == 0);
  CHECK(r.out.find("lsb-first") != std::string::npos);
  CHECK(r.out.find("i+2, i+1, i, i-1, i-2") != std::string::npos);
  CHECK(r.out.find("0x409") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).status == 2);
  CHECK(run({"rule"}).status == 2);
  CHECK(run({"rule", "5", "--bogus"}).status == 2);
  CHECK(run({"rule", "4294967296"}).status == 2);
  CHECK(run({"fips"}).status == 2);
  CHECK(run({"fips", "--zero-stream", "1000"}).status == 2);
  CHECK(run({"search", "--checkpoint-dir", "/tmp/x", "--from", "nope"}).status == 2);
  CHECK(run({"search", "--checkpoint-dir", "/tmp/x", "--shards", "2", "--shard", "2"}).status == 2);
  CHECK(run({"analyze", "/nonexistent/file"}).status == 2);
  const auto r = run({"build"});
  CHECK(r.status == 2);
  CHECK(r.err.find("usage error") != std::string::npos);
}

TEST_CASE("zero stream fails every FIPS test with exit 1") {
  const auto dir = fresh_dir("fips");
  const auto r = run({"fips", "--zero-stream", "100000", "--json", (dir / "f.json").string()});
  CHECK(r.status == 1);
  CHECK(r.out.find("overall: FAIL") != std::string::npos);
  CHECK(r.out.find(" pass\n") == std::string::npos);
  const auto j = nlohmann::json::parse(slurp(dir / "f.json"));
  CHECK(j["pass"] == false);
  CHECK(j["tests"].size() == 21);
  for (const auto& t : j["tests"]) CHECK(t["pass"] == false);
}

TEST_CASE("prng output feeds the fips command") {
  const auto dir = fresh_dir("prng");
  auto r = run({"prng", "--rule", "1438886595", "--seed", kSeed, "--bits", "100000", "--out", (dir / "s.bin").string()});
  REQUIRE(r.status == 0);
  CHECK(fs::file_size(dir / "s.bin") == 12500);
  const auto a = run({"fips", "--input", (dir / "s.bin").string()});
  const auto b = run({"fips", "--rule", "1438886595", "--seed", kSeed});
  CHECK(a.out == b.out);
  CHECK(a.status == b.status);
  r = run({"prng", "--seed", kSeed, "--bits", "16", "--hex"});
  CHECK(r.out.size() == 5);
}

TEST_CASE("build then analyze") {
  const auto dir = fresh_dir("build");
  auto r = run({"build", "--rule", "1438886595", "--out", (dir / "sbox.txt").string()});
  REQUIRE(r.status == 0);
  const auto s = casbox::read_sbox_file(dir / "sbox.txt");
  CHECK(s.size() == 1024);
  r = run({"analyze", (dir / "sbox.txt").string(), "--out", (dir / "report.json").string(), "--tables", "ddt,bct",
           "--csv-dir", (dir / "csv").string()});
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(j["nonlinearity"] == 434);
  CHECK(j["differential_uniformity"] == 14);
  CHECK(j["boomerang_uniformity"] == 24);
  CHECK(fs::exists(dir / "csv" / "ddt.csv"));
  CHECK(fs::exists(dir / "csv" / "bct.csv"));
  CHECK_FALSE(fs::exists(dir / "csv" / "lat.csv"));

  r = run({"build", "--format", "hex", "--out", (dir / "sbox.hex").string()});
  REQUIRE(r.status == 0);
  CHECK(casbox::read_sbox_file(dir / "sbox.hex", casbox::SBoxFormat::hex) == s);
  r = run({"analyze", (dir / "sbox.hex").string(), "--format", "hex", "--field-modulus", "0x409"});
  CHECK(r.status == 0);
  CHECK(run({"analyze", (dir / "sbox.txt").string(), "--field-modulus", "0x400"}).status == 2);
}

TEST_CASE("build refuses a rule that is not bijective on five cells") {
  const auto dir = fresh_dir("nonbij");
  const auto r = run({"build", "--rule", "0", "--out", (dir / "x.txt").string()});
  CHECK(r.status == 1);
  CHECK(r.err.find("not bijective") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "x.txt"));
}

TEST_CASE("search prints one checkpoint line per stage") {
  const auto dir = fresh_dir("search");
  const auto r = run({"search", "--to", "sac", "--checkpoint-dir", dir.string(), "--shards", "4096", "--shard", "9"});
  CHECK(r.status == 0);
  std::istringstream lines(r.out);
  std::vector<std::string> stages;
  for (std::string line; std::getline(lines, line);) {
    CHECK(line.starts_with("checkpoint stage="));
    CHECK(line.find(" shard=9/4096 ") != std::string::npos);
    stages.push_back(line.substr(17, line.find(' ', 17) - 17));
  }
  CHECK(stages == std::vector<std::string>{"balanced", "ci1", "nonlinear", "sac"});
  CHECK(r.err.find("stage sac: scanned") != std::string::npos);
  CHECK(run({"search", "--from", "fips", "--to", "fips", "--checkpoint-dir", (dir / "empty").string()}).status == 1);
}
