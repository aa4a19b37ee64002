#include "tagc/report.hpp"

#include <cmath>

#include "tagc/error.hpp"
#include "tagc/reconstruct.hpp"

namespace tagc {

using nlohmann::ordered_json;

namespace {

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

}  // namespace

ordered_json EvalReport::metrics_json() const {
  ordered_json j;
  j["method"] = method;
  j["acc"] = acc;
  j["gcr"] = gcr;
  j["gci"] = gci;
  j["gci_norm"] = optional_number(gci_norm);
  j["h_s"] = optional_number(h_s);
  j["memory_bytes"] = memory_bytes;
  j["unparsed"] = unparsed;
  j["counts"] = {{"original_nodes", counts.original_nodes},   {"compressed_nodes", counts.compressed_nodes},
                 {"original_edges", counts.original_edges},   {"compressed_edges", counts.compressed_edges},
                 {"targets", counts.targets},                 {"condensed_nodes", counts.condensed_nodes}};
  return j;
}

ordered_json EvalReport::to_json() const {
  auto j = metrics_json();
  ordered_json t = ordered_json::object();
  for (const auto& [stage, ms] : timings_ms) t[stage] = ms;
  j["timings_ms"] = t;
  return j;
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
  EvalReport r;
  try {
    r.method = j.at("method").get<std::string>();
    r.acc = j.at("acc").get<double>();
    r.gcr = j.at("gcr").get<double>();
    r.gci = j.at("gci").get<double>();
    if (!j.at("gci_norm").is_null()) r.gci_norm = j["gci_norm"].get<double>();
    if (!j.at("h_s").is_null()) r.h_s = j["h_s"].get<double>();
    r.memory_bytes = j.at("memory_bytes").get<std::size_t>();
    r.unparsed = j.at("unparsed").get<std::size_t>();
    const auto& c = j.at("counts");
    r.counts.original_nodes = c.at("original_nodes").get<std::size_t>();
    r.counts.compressed_nodes = c.at("compressed_nodes").get<std::size_t>();
    r.counts.original_edges = c.at("original_edges").get<std::size_t>();
    r.counts.compressed_edges = c.at("compressed_edges").get<std::size_t>();
    r.counts.targets = c.at("targets").get<std::size_t>();
    r.counts.condensed_nodes = c.at("condensed_nodes").get<std::size_t>();
    if (j.contains("timings_ms"))
      for (const auto& [k, v] : j["timings_ms"].items()) r.timings_ms.emplace_back(k, v.get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed report: ") + e.what());
  }
  return r;
}

EvalReport make_report(std::string method, const Evaluation& eval, const EvalCounts& counts, std::optional<double> h_s,
                       std::size_t memory_bytes, std::optional<double> reference_gci) {
  EvalReport r;
  r.method = std::move(method);
  r.acc = eval.acc;
  r.unparsed = eval.unparsed;
  r.counts = counts;
  r.gcr = gcr(counts.compressed_nodes, counts.original_nodes);
  r.gci = gci(r.acc, r.gcr);
  if (reference_gci) r.gci_norm = normalized_gci(r.gci, *reference_gci);
  r.h_s = h_s;
  r.memory_bytes = memory_bytes;
  return r;
}

void check_report_identities(const EvalReport& report, std::optional<double> reference_gci, double tolerance) {
  auto close = [&](double a, double b) { return std::abs(a - b) <= tolerance * std::max(1.0, std::abs(b)); };
  const double expected_gcr = gcr(report.counts.compressed_nodes, report.counts.original_nodes);
  if (!close(report.gcr, expected_gcr)) throw ValidationError("report gcr does not equal |V~|/|V|");
  if (!close(report.gci, report.acc / report.gcr)) throw ValidationError("report gci does not equal acc/gcr");
  if (reference_gci) {
    if (!report.gci_norm || !close(*report.gci_norm, report.gci / *reference_gci))
      throw ValidationError("report gci_norm does not equal gci/reference");
  }
}

}  // namespace tagc
