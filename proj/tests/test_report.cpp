#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace memdrift;
using namespace memdrift::testing;

namespace {

CaseResult result(std::string id, std::size_t density, std::size_t tokens, EdgeTally t) {
  CaseResult r;
  r.case_id = std::move(id);
  r.density = density;
  r.token_length = tokens;
  r.delta_tokens = tokens / 2;
  r.metrics = score(t);
  return r;
}

// Drift 0.2: TP=5 FP=4 P=5 -> 1 - 8/10. Drift 0.4: TP=4 FP=2 FN=1 P=5 -> 1 - 6/10.
const EdgeTally kDrift02{5, 4, 0, 5};
const EdgeTally kDrift04{4, 2, 1, 5};

std::vector<CaseResult> sample_results() {
  return {
      result("a", 1, 120, {2, 0, 0, 2}), result("b", 1, 480, kDrift02), result("c", 2, 300, {1, 1, 1, 2}),
      result("d", 1, 510, kDrift04),     result("e", 2, 999, {0, 0, 2, 2}), result("f", 2, 700, {2, 0, 2, 4}),
  };
}

}  // namespace

TEST(Bins, ValidateAndLocate) {
  EXPECT_THROW((BinSpec{{0}}.validate()), ParameterError);
  EXPECT_THROW((BinSpec{{0, 10, 10}}.validate()), ParameterError);
  BinSpec bins{{0, 500, 1000}};
  EXPECT_NO_THROW(bins.validate());
  EXPECT_EQ(bins.locate(0), 0u);
  EXPECT_EQ(bins.locate(499), 0u);
  EXPECT_EQ(bins.locate(500), 1u);
  EXPECT_EQ(bins.locate(1000), std::nullopt);
  EXPECT_EQ(BinSpec::uniform(1200).edges, (std::vector<std::size_t>{0, 500, 1000, 1500}));
  EXPECT_EQ(BinSpec::uniform(1000).edges, (std::vector<std::size_t>{0, 500, 1000, 1500}));
  EXPECT_THROW(BinSpec::uniform(10, 0), ParameterError);
}

TEST(Aggregate, SingleCaseIsOneRow) {
  auto r = result("x", 3, 42, {1, 1, 1, 2});
  auto report = aggregate({r}, BinSpec{{0, 500}});
  ASSERT_EQ(report.rows.size(), 1u);
  const auto& row = report.rows[0];
  EXPECT_EQ(row.cases, 1u);
  EXPECT_EQ(row.density, 3u);
  EXPECT_EQ(row.bin_lo, 0u);
  EXPECT_EQ(row.bin_hi, 500u);
  EXPECT_EQ(row.drift, r.metrics.memory_drift);
  EXPECT_EQ(row.precision, r.metrics.precision);
  EXPECT_EQ(row.recall, r.metrics.recall);
  EXPECT_EQ(row.f1, r.metrics.f1);
  EXPECT_EQ(row.drift_std, 0.0);
}

TEST(Aggregate, MeanOfTwoDrifts) {
  auto report = aggregate({result("a", 1, 10, kDrift02), result("b", 1, 20, kDrift04)}, BinSpec{{0, 500}});
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_NEAR(report.rows[0].drift, 0.3, 1e-12);
  EXPECT_NEAR(report.rows[0].drift_std, 0.1, 1e-12);
}

TEST(Aggregate, OutOfBinIsAnError) {
  EXPECT_THROW(aggregate({result("a", 1, 900, kDrift02)}, BinSpec{{0, 500}}), ParameterError);
}

TEST(Aggregate, GroupsByBinThenDensity) {
  auto report = aggregate(sample_results(), BinSpec::uniform(999));
  std::size_t total = 0;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    total += report.rows[i].cases;
    if (i > 0) {
      const auto& a = report.rows[i - 1];
      const auto& b = report.rows[i];
      EXPECT_TRUE(std::tie(a.bin_lo, a.density) < std::tie(b.bin_lo, b.density));
    }
  }
  EXPECT_EQ(total, sample_results().size());
  EXPECT_EQ(report.rows.size(), 4u);
}

TEST(Aggregate, PermutationInvariant) {
  auto base = sample_results();
  const auto bins = BinSpec::uniform(999);
  const auto expected = aggregate(base, bins);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(base.begin(), base.end(), rng);
    EXPECT_EQ(aggregate(base, bins), expected);
    EXPECT_EQ(aggregate(base, bins, Aggregation::Micro), aggregate(sample_results(), bins, Aggregation::Micro));
  }
}

TEST(Aggregate, MicroPoolsTallies) {
  // Pooled: TP=3 FP=1 FN=1 P=4 -> drift 1 - (6 - 0.5 - 1)/8.
  auto report = aggregate({result("a", 1, 10, {2, 0, 0, 2}), result("b", 1, 20, {1, 1, 1, 2})}, BinSpec{{0, 500}},
                          Aggregation::Micro);
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_DOUBLE_EQ(report.rows[0].drift, 1.0 - 4.5 / 8.0);
  EXPECT_DOUBLE_EQ(report.rows[0].precision, 0.75);
  EXPECT_DOUBLE_EQ(report.rows[0].recall, 0.75);
}

TEST(Emit, CsvHeaderAndOneLine) {
  auto report = aggregate({result("a", 2, 10, kDrift02)}, BinSpec{{0, 500}});
  EXPECT_EQ(to_csv(report),
            "bin_lo,bin_hi,density,n,precision,recall,f1,drift,drift_std\n"
            "0,500,2,1,0.5556,1.0000,0.7143,0.2000,0.0000\n");
}

TEST(Emit, CsvRoundTrip) {
  BinnedReport report;
  report.rows.push_back(ReportRow{0, 500, 1, 3, 1.0, 0.75, 0.5, 0.125, 0.0625});
  report.rows.push_back(ReportRow{500, 1000, 4, 2, 0.5, 0.25, 0.375, 0.875, 0.0});
  EXPECT_EQ(parse_csv(to_csv(report)), report);
  EXPECT_THROW(parse_csv("nope\n"), ParseError);
  EXPECT_THROW(parse_csv(std::string(kCsvHeader) + "\n1,2,3\n"), ParseError);
}

TEST(Emit, PlotSeriesPerDensity) {
  TempDir dir("plot");
  auto report = aggregate(sample_results(), BinSpec::uniform(999));
  auto files = emit(report, ReportFormat::PlotData, dir.path());
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0].filename(), "drift_k1.dat");
  EXPECT_EQ(files[1].filename(), "drift_k2.dat");
  const auto k1 = slurp(files[0]);
  EXPECT_EQ(k1.rfind("# density 1\n# bin_mid drift\n", 0), 0u);
  EXPECT_NE(k1.find("250.0000 0.1000\n"), std::string::npos);
  EXPECT_NE(k1.find("750.0000 0.4000\n"), std::string::npos);
}

TEST(Emit, TableHasScoreColumn) {
  auto table = to_table(aggregate({result("a", 2, 10, kDrift02)}, BinSpec{{0, 500}}));
  EXPECT_NE(table.find("score"), std::string::npos);
  EXPECT_NE(table.find("0.8000"), std::string::npos);
}

TEST(Emit, RerunIsByteIdentical) {
  TempDir dir("emit");
  auto report = aggregate(sample_results(), BinSpec::uniform(999));
  for (auto format : {ReportFormat::Table, ReportFormat::Csv, ReportFormat::PlotData}) {
    auto first = emit(report, format, dir.path());
    std::vector<std::string> bytes;
    for (const auto& f : first) bytes.push_back(slurp(f));
    auto second = emit(report, format, dir.path());
    ASSERT_EQ(first, second);
    for (std::size_t i = 0; i < second.size(); ++i) EXPECT_EQ(slurp(second[i]), bytes[i]);
  }
}

TEST(Emit, EmptyReportRefused) {
  TempDir dir("empty");
  EXPECT_THROW(emit(BinnedReport{}, ReportFormat::Csv, dir.path()), ParameterError);
}

TEST(Results, FileRoundTrip) {
  TempDir dir("results");
  auto results = sample_results();
  results[2].unresolved = 3;
  results[4].kind = ConnectionKind::Clique;
  save_results(results, dir / "r.jsonl");
  auto back = load_results(dir / "r.jsonl");
  ASSERT_EQ(back.size(), results.size());
  for (std::size_t i = 0; i < back.size(); ++i) EXPECT_EQ(nlohmann::json(back[i]), nlohmann::json(results[i]));
}
