#pragma once

#include <iosfwd>

#include "casbox/analysis.hpp"
#include "casbox/fips.hpp"
#include "json.hpp"

namespace casbox {

// Flat object with the MetricsReport field names. Every Fraction is emitted
// twice: "<name>" as an exact "num/den" string and "<name>_decimal".
nlohmann::ordered_json to_json(const MetricsReport& r);
void write_metrics_text(std::ostream& out, const MetricsReport& r);

nlohmann::ordered_json to_json(const fips::FipsReport& r);
// One line per test: name, block, statistic, bounds, verdict.
void write_fips_table(std::ostream& out, const fips::FipsReport& r);

}  // namespace casbox
