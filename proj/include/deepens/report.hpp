#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "deepens/core.hpp"
#include "deepens/dataset_io.hpp"
#include "deepens/error.hpp"
#include "deepens/experiment.hpp"

namespace deepens {

namespace detail {

using ojson = nlohmann::ordered_json;

/// Six significant digits; infinities become the strings "inf" / "-inf".
inline ojson json_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return round_sig6(v);
}

inline double real_from_json(const ojson& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw InputError("report: unexpected string '" + s + "' where a number was expected");
  }
  return j.get<double>();
}

inline std::string csv_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline double real_from_csv(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  if (!parse_double(s, v)) throw InputError("report csv: bad number '" + s + "'");
  return v;
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(const ExperimentReport& report, bool include_timings = false) {
  using detail::ojson;
  ojson methods = ojson::array();
  for (const auto& name : report.methods) {
    const auto values = metric_values(report.metrics.at(name));
    const auto& ranks = report.ranks.at(name);
    ojson metrics = ojson::object(), rank_obj = ojson::object();
    for (std::size_t k = 0; k < kMetricCount; ++k) {
      metrics[kMetricNames[k]] = detail::json_real(values[k]);
      rank_obj[kMetricNames[k]] = ranks.per_metric[k];
    }
    ojson m = ojson::object();
    m["name"] = name;
    m["metrics"] = std::move(metrics);
    m["ranks"] = std::move(rank_obj);
    m["average_rank"] = detail::json_real(ranks.average);
    m["overall_rank"] = ranks.overall;
    methods.push_back(std::move(m));
  }

  const auto& md = report.metadata;
  ojson meta = ojson::object();
  meta["seed"] = md.seed;
  meta["copies"] = md.copies;
  meta["copy_seeds"] = md.copy_seeds;
  meta["dataset"] = md.dataset;
  meta["dimension"] = md.dimension;
  meta["split"] = {{"train", md.train_size}, {"stack", md.stack_size}, {"test", md.test_size}};
  meta["best_copy"] = md.best_copy;
  meta["unit_parameter_count"] = md.unit_parameter_count;
  meta["combiner_parameter_count"] = md.combiner_parameter_count;
  if (include_timings) {
    ojson t = ojson::object();
    for (const auto& [k, v] : md.durations_ms) t[k] = detail::json_real(v);
    meta["durations_ms"] = std::move(t);
  }

  ojson root = ojson::object();
  root["methods"] = std::move(methods);
  root["metadata"] = std::move(meta);
  return root;
}

inline std::string report_to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "method";
  for (auto n : kMetricNames) out << ',' << n;
  for (auto n : kMetricNames) out << ",rank_" << n;
  out << ",average_rank,overall_rank\n";
  for (const auto& name : report.methods) {
    const auto values = metric_values(report.metrics.at(name));
    const auto& ranks = report.ranks.at(name);
    out << name;
    for (double v : values) out << ',' << detail::csv_real(v);
    for (int r : ranks.per_metric) out << ',' << r;
    out << ',' << detail::csv_real(ranks.average) << ',' << ranks.overall << '\n';
  }
  return out.str();
}

inline std::string serialize_report(const ExperimentReport& report, ReportFormat format,
                                    bool include_timings = false) {
  if (format == ReportFormat::Csv) return report_to_csv(report);
  return report_to_json(report, include_timings).dump(2) + "\n";
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline void emit_report(const ExperimentReport& report, ReportFormat format, const std::string& path,
                        bool include_timings = false) {
  write_text_file(path, serialize_report(report, format, include_timings));
}

inline ExperimentReport parse_report_json(const std::string& text) {
  ExperimentReport r;
  nlohmann::ordered_json root;
  try {
    root = nlohmann::ordered_json::parse(text);
    for (const auto& m : root.at("methods")) {
      const auto name = m.at("name").get<std::string>();
      std::array<double, kMetricCount> values{};
      MethodRanks ranks;
      for (std::size_t k = 0; k < kMetricCount; ++k) {
        values[k] = detail::real_from_json(m.at("metrics").at(kMetricNames[k]));
        ranks.per_metric[k] = m.at("ranks").at(kMetricNames[k]).get<int>();
      }
      ranks.average = detail::real_from_json(m.at("average_rank"));
      ranks.overall = m.at("overall_rank").get<int>();
      r.methods.push_back(name);
      r.metrics[name] = metrics_from_values(values);
      r.ranks[name] = ranks;
    }
    const auto& md = root.at("metadata");
    auto& meta = r.metadata;
    meta.seed = md.at("seed").get<std::uint64_t>();
    meta.copies = md.at("copies").get<std::size_t>();
    meta.copy_seeds = md.at("copy_seeds").get<std::vector<std::uint64_t>>();
    meta.dataset = md.at("dataset").get<std::string>();
    meta.dimension = md.at("dimension").get<std::size_t>();
    meta.train_size = md.at("split").at("train").get<std::size_t>();
    meta.stack_size = md.at("split").at("stack").get<std::size_t>();
    meta.test_size = md.at("split").at("test").get<std::size_t>();
    meta.best_copy = md.at("best_copy").get<std::size_t>();
    meta.unit_parameter_count = md.at("unit_parameter_count").get<std::size_t>();
    meta.combiner_parameter_count = md.at("combiner_parameter_count").get<std::size_t>();
    if (md.contains("durations_ms"))
      for (const auto& [k, v] : md.at("durations_ms").items()) meta.durations_ms[k] = detail::real_from_json(v);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed report json: ") + e.what());
  }
  return r;
}

/// CSV reports carry the metric table only; metadata comes back default-initialized.
inline ExperimentReport parse_report_csv(const std::string& text) {
  ExperimentReport r;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InputError("report csv: empty");
  const std::size_t expected = 1 + 2 * kMetricCount + 2;
  if (detail::split_csv_line(line).size() != expected) throw InputError("report csv: unexpected header");
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != expected) throw InputError("report csv: row has wrong number of cells");
    std::array<double, kMetricCount> values{};
    MethodRanks ranks;
    for (std::size_t k = 0; k < kMetricCount; ++k) {
      values[k] = detail::real_from_csv(cells[1 + k]);
      ranks.per_metric[k] = static_cast<int>(detail::real_from_csv(cells[1 + kMetricCount + k]));
    }
    ranks.average = detail::real_from_csv(cells[1 + 2 * kMetricCount]);
    ranks.overall = static_cast<int>(detail::real_from_csv(cells[2 + 2 * kMetricCount]));
    r.methods.push_back(cells[0]);
    r.metrics[cells[0]] = metrics_from_values(values);
    r.ranks[cells[0]] = ranks;
  }
  return r;
}

}  // namespace deepens
