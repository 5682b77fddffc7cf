#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "casbox/boolfn.hpp"
#include "casbox/exec.hpp"
#include "casbox/sbox.hpp"
#include "json.hpp"

namespace casbox {

// The (nonlinearity, DU, BU) triple published for the eleven-layer S-box.
struct MetricTriple {
  int nonlinearity = 434;
  int differential_uniformity = 14;
  int boomerang_uniformity = 24;
};

struct CalibrationVariant {
  BitOrder bit_order;
  FeistelConventions conventions;
  bool bijective = false;  // the 5-cell map of the rule under this variant
  int nonlinearity = 0;
  int differential_uniformity = 0;
  int boomerang_uniformity = 0;
  bool matches = false;

  std::string describe() const;
};

struct CalibrationReport {
  std::uint32_t rule_number = 0;
  MetricTriple target;
  std::vector<CalibrationVariant> variants;
  // Index of the first matching variant; the enumeration starts from the
  // project defaults, so a match there keeps them.
  std::optional<std::size_t> chosen;
};

// Builds the eleven-layer S-box under all 16 combinations of truth-table bit
// order, neighbourhood orientation, half packing and final swap.
CalibrationReport calibrate(std::uint32_t rule_number, MetricTriple target = {}, Exec exec = Exec::parallel);

nlohmann::ordered_json to_json(const CalibrationReport& r);
void write_calibration_text(std::ostream& out, const CalibrationReport& r);

}  // namespace casbox
