#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tagc/graph.hpp"
#include "tagc/infer.hpp"

namespace tagc {

struct EvalCounts {
  std::size_t original_nodes = 0;
  std::size_t compressed_nodes = 0;
  std::size_t original_edges = 0;
  std::size_t compressed_edges = 0;
  std::size_t targets = 0;
  std::size_t condensed_nodes = 0;
};

// Identical schema for the main pipeline and every baseline.
struct EvalReport {
  std::string method;
  double acc = 0.0;  // percent
  double gcr = 0.0;
  double gci = 0.0;
  std::optional<double> gci_norm;  // needs a reference GCI
  std::optional<double> h_s;       // needs labeled groups
  std::size_t memory_bytes = 0;
  std::size_t unparsed = 0;
  EvalCounts counts;
  std::vector<std::pair<std::string, double>> timings_ms;

  // Run-independent fields only; byte-stable across identical runs.
  nlohmann::ordered_json metrics_json() const;
  // Metrics plus timings.
  nlohmann::ordered_json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
};

EvalReport make_report(std::string method, const Evaluation& eval, const EvalCounts& counts, std::optional<double> h_s,
                       std::size_t memory_bytes, std::optional<double> reference_gci);

// Throws ValidationError when gcr, gci or gci_norm disagree with their
// defining formulas by more than `tolerance` (relative above 1).
void check_report_identities(const EvalReport& report, std::optional<double> reference_gci = std::nullopt,
                             double tolerance = 1e-9);

}  // namespace tagc
