#include <doctest.h>

#include <random>
#include <sstream>

#include "casbox/boolfn.hpp"
#include "oracles.hpp"

using namespace casbox;

TEST_CASE("rule number bit x is f(x), lsb first") {
  const auto r = BooleanRule::from_number(0b1000);
  for (unsigned x = 0; x < 32; ++x) CHECK(r(x) == (x == 3));
  CHECK(r.number() == 8u);
  // msb-first reads bit 31 - x
  const auto m = BooleanRule::from_number(0b1000, BitOrder::msb_first);
  CHECK(m(28));
  CHECK(m.number(BitOrder::msb_first) == 8u);
  CHECK_THROWS_AS(BooleanRule::from_number(1ull << 32), std::out_of_range);
}

TEST_CASE("anf of the selected rule") {
  const Anf a = anf_of(BooleanRule::from_number(kSelectedRuleNumber));
  CHECK(a.to_string() == "x0*x3 + x1*x3 + x2*x3 + x3*x4 + x1 + x2 + x3 + 1");
  CHECK(a.to_string(AnfNotation::unicode) == "x₀x₃⊕x₁x₃⊕x₂x₃⊕x₃x₄⊕x₁⊕x₂⊕x₃⊕1");
  CHECK(a.degree() == 2);
  CHECK(Anf{}.to_string() == "0");
  CHECK(Anf{1}.to_string() == "1");
}

TEST_CASE("moebius transform agrees with the subset-sum definition and is an involution") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20000; ++i) {
    const auto t = static_cast<std::uint32_t>(rng());
    CHECK(anf_of(BooleanRule(t)).coefficients == oracle::anf(t));
    CHECK(moebius_transform(moebius_transform(t)) == t);
    CHECK(rule_from_anf(anf_of(BooleanRule(t))).truth_table() == t);
  }
}

TEST_CASE("walsh spectrum matches the direct sum and satisfies parseval") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 2000; ++i) {
    const auto t = static_cast<std::uint32_t>(rng());
    const auto w = walsh_spectrum(BooleanRule(t));
    int energy = 0;
    for (unsigned o = 0; o < 32; ++o) {
      CHECK(w[o] == oracle::walsh(t, o));
      energy += w[o] * w[o];
    }
    CHECK(energy == 1024);
  }
}

TEST_CASE("correlation immunity agrees with the counting definition") {
  std::mt19937_64 rng(3);
  int ci1 = 0;
  for (int i = 0; i < 20000; ++i) {
    auto t = static_cast<std::uint32_t>(rng());
    // bias towards balanced tables so that CI(1) cases actually occur
    if (i % 2) t = (t & 0xFFFF0000u) | ((~t >> 16) & 0xFFFFu);
    for (int k = 1; k <= 3; ++k) CHECK(is_correlation_immune(BooleanRule(t), k) == oracle::correlation_immune(t, k));
    ci1 += is_correlation_immune(BooleanRule(t), 1);
  }
  CHECK(ci1 > 0);
  CHECK_THROWS_AS(is_correlation_immune(BooleanRule(0), 0), std::invalid_argument);
  CHECK_THROWS_AS(is_correlation_immune(BooleanRule(0), 6), std::invalid_argument);
}

TEST_CASE("sac agrees with counting flips") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20000; ++i) {
    const auto t = static_cast<std::uint32_t>(rng());
    CHECK(satisfies_sac(BooleanRule(t)) == oracle::sac(t));
  }
  CHECK(satisfies_sac(BooleanRule::from_number(kSelectedRuleNumber)));
}

TEST_CASE("nonlinearity of simple functions") {
  CHECK(nonlinearity(BooleanRule(0)) == 0);
  CHECK(nonlinearity(BooleanRule(0xAAAAAAAAu)) == 0);  // x0
  // x0*x1 differs from 0 on 8 of 32 inputs
  CHECK(nonlinearity(BooleanRule(0x88888888u)) == 8);
}

TEST_CASE("selected rule is balanced, CI(1) and of degree 2") {
  const auto r = BooleanRule::from_number(kSelectedRuleNumber);
  CHECK(is_balanced(r));
  CHECK(is_correlation_immune(r, 1));
  CHECK(algebraic_degree(r) == 2);
}

TEST_CASE("rule list round trip and malformed input") {
  const std::vector<std::uint32_t> rules{0, 7, kSelectedRuleNumber, 0xFFFFFFFFu};
  std::stringstream ss;
  write_rule_list(ss, rules);
  CHECK(read_rule_list(ss) == rules);
  std::istringstream commented("# header\n\n  12  \n13\n");
  CHECK(read_rule_list(commented) == std::vector<std::uint32_t>{12, 13});
  std::istringstream bad("12\nx3\n");
  CHECK_THROWS_AS(read_rule_list(bad), std::runtime_error);
  std::istringstream big("4294967296\n");
  CHECK_THROWS_AS(read_rule_list(big), std::runtime_error);
}
