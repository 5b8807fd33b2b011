#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "deepens/core.hpp"
#include "deepens/error.hpp"
#include "deepens/random.hpp"

namespace deepens {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  try {
    std::size_t used = 0;
    out = std::stod(text, &used);
    return used == text.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace detail

/// Reads a comma-separated file with a header row. Every column except `label_column`
/// is a numeric feature; the label column must hold integers. Rows are numbered from 1
/// with the header as row 1. No quoting support.
inline Dataset load_csv_dataset(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path + "'");

  std::string line;
  std::size_t row = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++row;
    if (!detail::trim(line).empty()) {
      header = detail::split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw InputError(path + ": empty file (no header row)");

  std::size_t label_idx = header.size();
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == label_column) label_idx = c;
  if (label_idx == header.size()) {
    throw InputError(path + ": missing label column '" + label_column + "' in header");
  }
  if (header.size() < 2) throw InputError(path + ": no feature columns besides the label");

  std::vector<Instance> instances;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) {
      throw InputError(path + ": row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                       " cells, header has " + std::to_string(header.size()));
    }
    std::vector<double> features;
    int label = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!detail::parse_double(cells[c], v)) {
        throw InputError(path + ": non-numeric value '" + cells[c] + "' at row " + std::to_string(row) +
                         ", column " + std::to_string(c + 1) + " ('" + header[c] + "')");
      }
      if (c == label_idx) {
        if (v != std::floor(v) || std::abs(v) > 1e9) {
          throw InputError(path + ": non-integer label '" + cells[c] + "' at row " + std::to_string(row) +
                           ", column " + std::to_string(c + 1) + " ('" + header[c] + "')");
        }
        label = static_cast<int>(v);
      } else {
        features.push_back(v);
      }
    }
    instances.push_back({FeatureVector(std::move(features)), label});
  }
  if (instances.empty()) throw InputError(path + ": empty file (header but no data rows)");
  return Dataset::with_inferred_space(std::move(instances));
}

// ---------------------------------------------------------------------------
// Synthetic generators

enum class SyntheticKind { Parity, Monomial, Blobs };

inline const char* to_string(SyntheticKind k) {
  switch (k) {
    case SyntheticKind::Parity: return "parity";
    case SyntheticKind::Monomial: return "monomial";
    case SyntheticKind::Blobs: return "blobs";
  }
  return "unknown";
}

inline SyntheticKind parse_synthetic_kind(const std::string& name) {
  if (name == "parity") return SyntheticKind::Parity;
  if (name == "monomial") return SyntheticKind::Monomial;
  if (name == "blobs") return SyntheticKind::Blobs;
  throw InputError("unknown synthetic kind '" + name + "' (expected parity, monomial or blobs)");
}

/// parity/monomial: uniform cube points labelled by XOR / AND of all coordinates.
/// blobs: fair-coin class, features N(+-1, 1) per coordinate.
/// Every label is then flipped independently with probability `noise_rate`.
inline Dataset gen_synthetic(SyntheticKind kind, std::size_t d, std::size_t count, double noise_rate,
                             std::uint64_t seed) {
  if (d < 1) throw InputError("gen_synthetic: d must be >= 1");
  if (count < 1) throw InputError("gen_synthetic: count must be >= 1");
  if (!(noise_rate >= 0.0 && noise_rate < 0.5)) throw InputError("gen_synthetic: noise_rate must lie in [0, 0.5)");

  Rng rng = make_rng(seed, 0x5eed);
  std::vector<Instance> instances;
  instances.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> x(d);
    int label = 0;
    if (kind == SyntheticKind::Blobs) {
      label = uniform01(rng) < 0.5 ? 1 : 0;
      const double center = label ? 1.0 : -1.0;
      for (auto& v : x) v = center + standard_normal(rng);
    } else {
      int ones = 0;
      for (auto& v : x) {
        v = (rng() >> 63) ? 1.0 : 0.0;
        ones += v == 1.0;
      }
      label = kind == SyntheticKind::Parity ? ones % 2 : (ones == static_cast<int>(d) ? 1 : 0);
    }
    if (uniform01(rng) < noise_rate) label = 1 - label;
    instances.push_back({FeatureVector(std::move(x)), label});
  }
  return Dataset(std::move(instances), LabelSpace::binary());
}

}  // namespace deepens
