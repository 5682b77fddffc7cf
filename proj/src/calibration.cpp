#include "casbox/calibration.hpp"

#include <cstdio>
#include <ostream>

#include "casbox/analysis.hpp"

namespace casbox {

std::string CalibrationVariant::describe() const {
  std::string s = bit_order == BitOrder::lsb_first ? "lsb-first" : "msb-first";
  s += conventions.neighborhood == NeighborhoodOrder::mirrored ? " mirrored" : " ascending";
  s += conventions.packing == HalfPacking::low_left ? " low-left" : " high-left";
  s += conventions.final_swap ? " swap" : " no-swap";
  return s;
}

CalibrationReport calibrate(std::uint32_t rule_number, MetricTriple target, Exec exec) {
  CalibrationReport report;
  report.rule_number = rule_number;
  report.target = target;
  for (BitOrder bit_order : {BitOrder::lsb_first, BitOrder::msb_first}) {
    for (NeighborhoodOrder nb : {NeighborhoodOrder::mirrored, NeighborhoodOrder::ascending}) {
      for (HalfPacking packing : {HalfPacking::low_left, HalfPacking::high_left}) {
        for (bool swap : {false, true}) {
          CalibrationVariant v{bit_order, {packing, swap, nb}};
          const BooleanRule rule = BooleanRule::from_number(rule_number, bit_order);
          v.bijective = is_bijective5(rule, nb);
          if (v.bijective) {
            const SBox s = build_sbox(LayerSpec::eleven_layer(rule), v.conventions);
            v.nonlinearity = nonlinearity_sbox(lat(s, exec));
            v.differential_uniformity = differential_uniformity(ddt(s, exec));
            v.boomerang_uniformity = boomerang_uniformity(bct(s, exec));
            v.matches = v.nonlinearity == target.nonlinearity &&
                        v.differential_uniformity == target.differential_uniformity &&
                        v.boomerang_uniformity == target.boomerang_uniformity;
          }
          if (v.matches && !report.chosen) report.chosen = report.variants.size();
          report.variants.push_back(v);
        }
      }
    }
  }
  return report;
}

nlohmann::ordered_json to_json(const CalibrationReport& r) {
  nlohmann::ordered_json j;
  j["rule"] = r.rule_number;
  j["target"] = {{"nonlinearity", r.target.nonlinearity},
                 {"differential_uniformity", r.target.differential_uniformity},
                 {"boomerang_uniformity", r.target.boomerang_uniformity}};
  auto& vs = j["variants"] = nlohmann::ordered_json::array();
  for (const auto& v : r.variants) {
    nlohmann::ordered_json e;
    e["variant"] = v.describe();
    e["bijective"] = v.bijective;
    if (v.bijective) {
      e["nonlinearity"] = v.nonlinearity;
      e["differential_uniformity"] = v.differential_uniformity;
      e["boomerang_uniformity"] = v.boomerang_uniformity;
    }
    e["matches"] = v.matches;
    vs.push_back(std::move(e));
  }
  j["chosen"] = r.chosen ? nlohmann::ordered_json(r.variants[*r.chosen].describe()) : nlohmann::ordered_json();
  return j;
}

void write_calibration_text(std::ostream& out, const CalibrationReport& r) {
  out << "rule " << r.rule_number << ", target NL/DU/BU = " << r.target.nonlinearity << '/'
      << r.target.differential_uniformity << '/' << r.target.boomerang_uniformity << '\n';
  char line[128];
  for (const auto& v : r.variants) {
    if (v.bijective)
      std::snprintf(line, sizeof line, "  %-38s NL %4d  DU %3d  BU %3d%s%s\n", v.describe().c_str(), v.nonlinearity,
                    v.differential_uniformity, v.boomerang_uniformity, v.matches ? "  " : "", v.matches ? "match" : "");
    else
      std::snprintf(line, sizeof line, "  %-38s not bijective on 5 cells\n", v.describe().c_str());
    out << line;
  }
  out << "chosen: " << (r.chosen ? r.variants[*r.chosen].describe() : std::string("none")) << '\n';
}

}  // namespace casbox
