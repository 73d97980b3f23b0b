#pragma once

#include "memdrift/error.hpp"
#include "memdrift/extraction.hpp"
#include "memdrift/metrics.hpp"
#include "memdrift/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

namespace memdrift {

/// Scored test case: the per-case record of the results file.
struct CaseResult {
  std::string case_id;
  ConnectionKind kind = ConnectionKind::Edge;
  std::size_t density = 0;
  std::size_t token_length = 0;
  std::size_t delta_tokens = 0;
  std::size_t unresolved = 0;
  MetricRow metrics;
};

inline void to_json(nlohmann::json& j, const CaseResult& r) {
  j = {{"case_id", r.case_id},
       {"kind", r.kind},
       {"density", r.density},
       {"token_length", r.token_length},
       {"delta", r.delta_tokens},
       {"tp", r.metrics.tally.tp},
       {"fp", r.metrics.tally.fp},
       {"fn", r.metrics.tally.fn},
       {"P", r.metrics.tally.gold_count},
       {"unresolved", r.unresolved},
       {"precision", r.metrics.precision},
       {"recall", r.metrics.recall},
       {"f1", r.metrics.f1},
       {"memory_drift", r.metrics.memory_drift}};
}

inline void from_json(const nlohmann::json& j, CaseResult& r) {
  r.case_id = j.at("case_id").get<std::string>();
  r.kind = j.at("kind").get<ConnectionKind>();
  r.density = j.at("density").get<std::size_t>();
  r.token_length = j.at("token_length").get<std::size_t>();
  r.delta_tokens = j.at("delta").get<std::size_t>();
  r.unresolved = j.at("unresolved").get<std::size_t>();
  r.metrics.tally = {j.at("tp").get<std::size_t>(), j.at("fp").get<std::size_t>(), j.at("fn").get<std::size_t>(),
                     j.at("P").get<std::size_t>()};
  r.metrics.precision = j.at("precision").get<double>();
  r.metrics.recall = j.at("recall").get<double>();
  r.metrics.f1 = j.at("f1").get<double>();
  r.metrics.memory_drift = j.at("memory_drift").get<double>();
}

inline void save_results(const std::vector<CaseResult>& results, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write results file " + path.string());
  for (const auto& r : results) out << nlohmann::json(r).dump() << "\n";
}

inline std::vector<CaseResult> load_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open results file " + path.string());
  std::vector<CaseResult> results;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty()) continue;
    try {
      results.push_back(nlohmann::json::parse(line).get<CaseResult>());
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return results;
}

// ---------------------------------------------------------------------------
// Binning
// ---------------------------------------------------------------------------

/// Half-open token-length bins [edges[i], edges[i+1]).
struct BinSpec {
  std::vector<std::size_t> edges;

  void validate() const {
    if (edges.size() < 2) throw ParameterError("bin spec needs at least two edges");
    for (std::size_t i = 1; i < edges.size(); ++i) {
      if (edges[i] <= edges[i - 1]) throw ParameterError("bin edges must be strictly ascending");
    }
  }

  /// Index of the bin holding `tokens`, or nullopt.
  std::optional<std::size_t> locate(std::size_t tokens) const {
    auto it = std::upper_bound(edges.begin(), edges.end(), tokens);
    if (it == edges.begin() || it == edges.end()) return std::nullopt;
    return static_cast<std::size_t>(it - edges.begin()) - 1;
  }

  /// Fixed-width bins from 0 that cover max_tokens.
  static BinSpec uniform(std::size_t max_tokens, std::size_t width = 500) {
    if (width == 0) throw ParameterError("bin width must be positive");
    BinSpec spec;
    for (std::size_t lo = 0; lo <= max_tokens; lo += width) spec.edges.push_back(lo);
    spec.edges.push_back(spec.edges.back() + width);
    return spec;
  }
};

enum class Aggregation { Macro, Micro };

struct ReportRow {
  std::size_t bin_lo = 0;
  std::size_t bin_hi = 0;
  std::size_t density = 0;
  std::size_t cases = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double drift = 0.0;
  double drift_std = 0.0;  ///< population standard deviation of per-case drift

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct BinnedReport {
  std::vector<ReportRow> rows;  ///< ordered by (bin, density)

  friend bool operator==(const BinnedReport&, const BinnedReport&) = default;
};

/// Groups cases by (token bin, density). Macro averages per-case metrics; Micro pools the
/// tallies of the group before computing precision, recall, F1 and drift.
inline BinnedReport aggregate(const std::vector<CaseResult>& results, const BinSpec& bins,
                              Aggregation mode = Aggregation::Macro, const DriftWeights& weights = {}) {
  bins.validate();
  std::map<std::pair<std::size_t, std::size_t>, std::vector<const CaseResult*>> groups;
  for (const auto& r : results) {
    auto bin = bins.locate(r.token_length);
    if (!bin) {
      throw ParameterError("case " + r.case_id + " has token_length " + std::to_string(r.token_length) +
                           " outside every bin");
    }
    groups[{*bin, r.density}].push_back(&r);
  }
  BinnedReport report;
  for (auto& [key, members] : groups) {
    // Sorting makes float summation order independent of input order.
    std::sort(members.begin(), members.end(), [](const CaseResult* a, const CaseResult* b) {
      return std::tie(a->metrics.memory_drift, a->case_id) < std::tie(b->metrics.memory_drift, b->case_id);
    });
    ReportRow row;
    row.bin_lo = bins.edges[key.first];
    row.bin_hi = bins.edges[key.first + 1];
    row.density = key.second;
    row.cases = members.size();
    const double n = static_cast<double>(members.size());
    double drift_sum = 0.0;
    for (const auto* m : members) drift_sum += m->metrics.memory_drift;
    const double drift_mean = drift_sum / n;
    double var = 0.0;
    for (const auto* m : members) var += (m->metrics.memory_drift - drift_mean) * (m->metrics.memory_drift - drift_mean);
    row.drift_std = std::sqrt(var / n);

    if (mode == Aggregation::Macro) {
      for (const auto* m : members) {
        row.precision += m->metrics.precision;
        row.recall += m->metrics.recall;
        row.f1 += m->metrics.f1;
      }
      row.precision /= n;
      row.recall /= n;
      row.f1 /= n;
      row.drift = drift_mean;
    } else {
      EdgeTally pooled;
      for (const auto* m : members) {
        pooled.tp += m->metrics.tally.tp;
        pooled.fp += m->metrics.tally.fp;
        pooled.fn += m->metrics.tally.fn;
        pooled.gold_count += m->metrics.tally.gold_count;
      }
      auto s = score(pooled, weights);
      row.precision = s.precision;
      row.recall = s.recall;
      row.f1 = s.f1;
      row.drift = s.memory_drift;
    }
    report.rows.push_back(row);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Emitters. Numbers are written with exactly four decimals.
// ---------------------------------------------------------------------------

inline constexpr std::string_view kCsvHeader = "bin_lo,bin_hi,density,n,precision,recall,f1,drift,drift_std";

namespace detail {

inline std::string fixed4(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace detail

inline std::string to_csv(const BinnedReport& report) {
  std::ostringstream os;
  os << kCsvHeader << "\n";
  for (const auto& r : report.rows) {
    os << r.bin_lo << ',' << r.bin_hi << ',' << r.density << ',' << r.cases << ',' << detail::fixed4(r.precision)
       << ',' << detail::fixed4(r.recall) << ',' << detail::fixed4(r.f1) << ',' << detail::fixed4(r.drift) << ','
       << detail::fixed4(r.drift_std) << "\n";
  }
  return os.str();
}

/// Inverse of to_csv. Values come back rounded to four decimals.
inline BinnedReport parse_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ParseError("report csv: unexpected header");
  BinnedReport report;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string f;
    std::vector<std::string> cells;
    while (std::getline(fields, f, ',')) cells.push_back(f);
    if (cells.size() != 9) throw ParseError("report csv: expected 9 columns in '" + line + "'");
    try {
      report.rows.push_back(ReportRow{std::stoul(cells[0]), std::stoul(cells[1]), std::stoul(cells[2]),
                                      std::stoul(cells[3]), std::stod(cells[4]), std::stod(cells[5]),
                                      std::stod(cells[6]), std::stod(cells[7]), std::stod(cells[8])});
    } catch (const std::logic_error&) {
      throw ParseError("report csv: bad number in '" + line + "'");
    }
  }
  return report;
}

/// One series per density: "x y" lines with x the bin midpoint and y the mean drift.
inline std::map<std::size_t, std::string> to_plotdata(const BinnedReport& report) {
  std::map<std::size_t, std::string> series;
  for (const auto& r : report.rows) {
    auto& s = series[r.density];
    if (s.empty()) s = "# density " + std::to_string(r.density) + "\n# bin_mid drift\n";
    s += detail::fixed4((static_cast<double>(r.bin_lo) + static_cast<double>(r.bin_hi)) / 2.0) + " " +
         detail::fixed4(r.drift) + "\n";
  }
  return series;
}

inline std::string to_table(const BinnedReport& report) {
  std::ostringstream os;
  os << std::left << std::setw(13) << "tokens" << std::right << std::setw(8) << "density" << std::setw(7) << "n"
     << std::setw(11) << "precision" << std::setw(9) << "recall" << std::setw(9) << "f1" << std::setw(9) << "drift"
     << std::setw(11) << "drift_std" << std::setw(9) << "score" << "\n";
  for (const auto& r : report.rows) {
    std::string range = std::to_string(r.bin_lo) + "-" + std::to_string(r.bin_hi);
    os << std::left << std::setw(13) << range << std::right << std::setw(8) << r.density << std::setw(7) << r.cases
       << std::setw(11) << detail::fixed4(r.precision) << std::setw(9) << detail::fixed4(r.recall) << std::setw(9)
       << detail::fixed4(r.f1) << std::setw(9) << detail::fixed4(r.drift) << std::setw(11)
       << detail::fixed4(r.drift_std) << std::setw(9) << detail::fixed4(1.0 - r.drift) << "\n";
  }
  return os.str();
}

enum class ReportFormat { Table, Csv, PlotData };

/// Writes the report under `dir`: report.txt, report.csv, or plot/drift_k<density>.dat.
/// Returns the files written.
inline std::vector<std::filesystem::path> emit(const BinnedReport& report, ReportFormat format,
                                               const std::filesystem::path& dir) {
  if (report.rows.empty()) throw ParameterError("cannot emit an empty report");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  switch (format) {
    case ReportFormat::Table:
      written.push_back(dir / "report.txt");
      detail::write_file(written.back(), to_table(report));
      break;
    case ReportFormat::Csv:
      written.push_back(dir / "report.csv");
      detail::write_file(written.back(), to_csv(report));
      break;
    case ReportFormat::PlotData: {
      auto plot_dir = dir / "plot";
      std::filesystem::create_directories(plot_dir, ec);
      if (ec) throw IoError("cannot create " + plot_dir.string() + ": " + ec.message());
      for (const auto& [density, body] : to_plotdata(report)) {
        written.push_back(plot_dir / ("drift_k" + std::to_string(density) + ".dat"));
        detail::write_file(written.back(), body);
      }
      break;
    }
  }
  return written;
}

}  // namespace memdrift
