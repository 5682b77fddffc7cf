#include "casbox/report.hpp"

#include <cstdio>
#include <iomanip>
#include <ostream>

namespace casbox {

namespace {

void put_fraction(nlohmann::ordered_json& j, const char* name, const Fraction& f) {
  j[name] = f.str();
  j[std::string(name) + "_decimal"] = f.value();
}

std::string hex_modulus(std::uint32_t m) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%x", m);
  return buf;
}

}  // namespace

nlohmann::ordered_json to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["bits"] = r.bits;
  j["field_modulus"] = hex_modulus(r.field_modulus);
  j["min_degree"] = r.min_degree;
  j["max_degree"] = r.max_degree;
  j["algebraic_complexity"] = r.algebraic_complexity;
  j["interpolation_terms"] = r.interpolation_terms;
  j["nonlinearity"] = r.nonlinearity;
  put_fraction(j, "linear_prob_max", r.linear_prob_max);
  put_fraction(j, "sac_avg", r.sac_avg);
  put_fraction(j, "sac_min", r.sac_min);
  put_fraction(j, "sac_max", r.sac_max);
  j["bic_parameter"] = r.bic_parameter;
  put_fraction(j, "lap", r.lap);
  put_fraction(j, "dap", r.dap);
  j["differential_uniformity"] = r.differential_uniformity;
  j["boomerang_uniformity"] = r.boomerang_uniformity;
  return j;
}

void write_metrics_text(std::ostream& out, const MetricsReport& r) {
  const auto pct = [](const Fraction& f) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * f.value());
    return std::string(buf);
  };
  const auto dec = [](double v, int places) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", places, v);
    return std::string(buf);
  };
  out << "width                     " << r.bits << " bits\n"
      << "component degree          " << r.min_degree << " .. " << r.max_degree << '\n'
      << "algebraic complexity      " << r.algebraic_complexity << " (field " << hex_modulus(r.field_modulus)
      << ", " << r.interpolation_terms << " nonzero terms)\n"
      << "nonlinearity              " << r.nonlinearity << '\n'
      << "max linear probability    " << pct(r.linear_prob_max) << " (" << r.linear_prob_max.str() << ")\n"
      << "LAP (bias)                " << pct(r.lap) << " (" << r.lap.str() << ")\n"
      << "SAC avg / min / max       " << dec(r.sac_avg.value(), 4) << " / " << dec(r.sac_min.value(), 4) << " / "
      << dec(r.sac_max.value(), 4) << '\n'
      << "BIC parameter             " << dec(r.bic_parameter, 4) << '\n'
      << "differential uniformity   " << r.differential_uniformity << '\n'
      << "DAP                       " << pct(r.dap) << " (" << r.dap.str() << ")\n"
      << "boomerang uniformity      " << r.boomerang_uniformity << '\n';
}

nlohmann::ordered_json to_json(const fips::FipsReport& r) {
  nlohmann::ordered_json j;
  j["pass"] = r.pass;
  auto& tests = j["tests"] = nlohmann::ordered_json::array();
  for (const auto& t : r.results) {
    nlohmann::ordered_json e;
    e["name"] = std::string(fips::test_name(t.test));
    e["block"] = t.block;
    e["statistic"] = t.statistic;
    e["bounds"] = t.bounds;
    e["pass"] = t.pass;
    if (!t.counts.empty()) e["run_counts"] = t.counts;
    tests.push_back(std::move(e));
  }
  return j;
}

void write_fips_table(std::ostream& out, const fips::FipsReport& r) {
  char line[160];
  std::snprintf(line, sizeof line, "%-15s %-6s %-12s %-48s %s\n", "test", "block", "statistic", "bounds", "result");
  out << line;
  for (const auto& t : r.results) {
    const std::string block = t.block < 0 ? "all" : std::to_string(t.block);
    char stat[32];
    std::snprintf(stat, sizeof stat, "%.4g", t.statistic);
    std::snprintf(line, sizeof line, "%-15s %-6s %-12s %-48s %s\n", std::string(fips::test_name(t.test)).c_str(),
                  block.c_str(), stat, t.bounds.c_str(), t.pass ? "pass" : "FAIL");
    out << line;
  }
  out << "overall: " << (r.pass ? "pass" : "FAIL") << '\n';
}

}  // namespace casbox
