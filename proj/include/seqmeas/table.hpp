#pragma once

// Tabular result rows shared by the scenario layer and the CLI emitters.

#include <algorithm>
#include <charconv>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace seqmeas {

/// Locale-independent decimal rendering at 10 significant digits, with the
/// negative-zero artifact removed; shared by labels and file emitters.
inline std::string formatReal(double value) {
  if (value == 0) value = 0;  // collapse -0
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 10);
  if (ec != std::errc{}) throw std::invalid_argument("formatReal: unrepresentable value");
  return std::string(buffer, end);
}

enum class Quantity { Probability, WeakValueRe, WeakValueIm, MeterStat };

enum class Source { ClosedForm, Circuit, Sampled };

inline std::string_view quantityName(Quantity q) {
  switch (q) {
    case Quantity::Probability: return "probability";
    case Quantity::WeakValueRe: return "weakValueRe";
    case Quantity::WeakValueIm: return "weakValueIm";
    case Quantity::MeterStat: return "meterStat";
  }
  throw std::invalid_argument("quantityName: unknown tag");
}

inline std::string_view sourceName(Source s) {
  switch (s) {
    case Source::ClosedForm: return "closedForm";
    case Source::Circuit: return "circuit";
    case Source::Sampled: return "sampled";
  }
  throw std::invalid_argument("sourceName: unknown tag");
}

struct ScenarioRow {
  double theta = 0;
  double phi = 0;
  std::string scheme;
  std::string label;
  Quantity quantity = Quantity::Probability;
  double value = 0;
  Source source = Source::ClosedForm;
};

/// Rows plus the canonical emission order: sorted by (theta, phi, label),
/// stable within equal keys so per-scheme insertion order survives.
struct ScenarioTable {
  std::vector<ScenarioRow> rows;

  void append(const ScenarioTable& other) {
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  }

  void sortCanonical() {
    std::stable_sort(rows.begin(), rows.end(), [](const ScenarioRow& a, const ScenarioRow& b) {
      if (a.theta != b.theta) return a.theta < b.theta;
      if (a.phi != b.phi) return a.phi < b.phi;
      return a.label < b.label;
    });
  }
};

}  // namespace seqmeas
