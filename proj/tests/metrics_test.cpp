#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "meshflood/metrics.hpp"

namespace meshflood {
namespace {

std::string csv(const MetricsSeries& s) {
  std::ostringstream os;
  export_csv(s, os);
  return os.str();
}

TEST(Record, BucketsByWholeSecond) {
  MetricsSeries s(SimTime::seconds(300));
  s.record(SimTime::from_seconds(0.5), 0, Counter::BitsSent, 2000);
  EXPECT_EQ(s.at(0, 0, Counter::BitsSent), 2000u);
  s.record(SimTime::from_seconds(0.9), 0, Counter::BitsSent, 2000);
  EXPECT_EQ(s.at(0, 0, Counter::BitsSent), 4000u);
  EXPECT_EQ(s.at(1, 0, Counter::BitsSent), 0u);
}

TEST(Record, RejectsOutOfRangeAndNegative) {
  MetricsSeries s(SimTime::seconds(300));
  EXPECT_THROW(s.record(SimTime::seconds(300), 0, Counter::BitsSent, 1), AccountingError);
  EXPECT_THROW(s.record(SimTime::seconds(301), 0, Counter::BitsSent, 1), AccountingError);
  EXPECT_THROW(s.record(SimTime::seconds(1), 0, Counter::BitsSent, -1), AccountingError);
}

TEST(ExportCsv, EmptySeriesIsHeaderOnly) {
  EXPECT_EQ(csv(MetricsSeries{}), "t,node_id,counter,value\n");
}

TEST(ExportCsv, SingleRecordIsTwoLines) {
  MetricsSeries s;
  s.record(SimTime::from_seconds(3.25), 7, Counter::BitsReceivedFirst, 2200);
  EXPECT_EQ(csv(s), "t,node_id,counter,value\n3,7,bits_received_first,2200\n");
}

TEST(ExportCsv, RowsSortedByTimeNodeCounter) {
  MetricsSeries s;
  s.record(SimTime::seconds(2), 0, Counter::PacketsSent, 1);
  s.record(SimTime::seconds(1), 3, Counter::BitsSent, 5);
  s.record(SimTime::seconds(1), 3, Counter::BitsLost, 5);
  s.record(SimTime::seconds(1), 1, Counter::PacketsSent, 1);
  s.record(SimTime::seconds(1), 1, Counter::BitsSent, 0);  // zero never appears
  EXPECT_EQ(csv(s),
            "t,node_id,counter,value\n"
            "1,1,packets_sent,1\n"
            "1,3,bits_lost,5\n"
            "1,3,bits_sent,5\n"
            "2,0,packets_sent,1\n");
}

TEST(ExportCsv, UnwritablePathThrows) {
  EXPECT_THROW(export_csv(MetricsSeries{}, std::string("/nonexistent-dir/x/series.csv")), Error);
}

// Round trip and bucket/total consistency over random series.
TEST(MetricsProperties, CsvRoundTripAndTotals) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    MetricsSeries s(SimTime::seconds(100));
    for (int i = 0; i < 300; ++i) {
      s.record(SimTime::micros(static_cast<std::int64_t>(rng() % 100'000'000)),
               static_cast<NodeId>(rng() % 12), static_cast<Counter>(rng() % kCounterCount),
               static_cast<std::int64_t>(rng() % 5000));
    }
    std::istringstream in(csv(s));
    const auto back = parse_csv(in);
    EXPECT_EQ(back, s);
    EXPECT_EQ(csv(back), csv(s));

    std::map<std::pair<NodeId, Counter>, std::uint64_t> sums;
    for (const auto& [key, v] : s.buckets()) sums[{std::get<1>(key), std::get<2>(key)}] += v;
    for (const auto& [nc, v] : sums) EXPECT_EQ(s.total(nc.first, nc.second), v);
  }
}

TEST(ParseCsv, RejectsGarbage) {
  std::istringstream no_header("1,2,bits_sent,3\n");
  EXPECT_THROW(parse_csv(no_header), ParseError);
  std::istringstream bad_counter("t,node_id,counter,value\n1,2,bogus,3\n");
  EXPECT_THROW(parse_csv(bad_counter), ParseError);
}

Summary summary(std::uint64_t tx, std::uint64_t dup, const std::string& fp = "abc") {
  Summary s;
  s.fingerprint = fp;
  s.total_transmissions = tx;
  s.packets_received_dup = dup;
  return s;
}

TEST(Compare, Reductions) {
  auto r = compare(summary(1, 0), summary(4, 9));
  EXPECT_DOUBLE_EQ(r.transmission_reduction_pct, 75.0);
  EXPECT_DOUBLE_EQ(r.redundancy_reduction_pct, 100.0);
  r = compare(summary(10, 3), summary(10, 3));
  EXPECT_DOUBLE_EQ(r.transmission_reduction_pct, 0.0);
  EXPECT_DOUBLE_EQ(r.redundancy_reduction_pct, 0.0);
  r = compare(summary(0, 0), summary(0, 0));
  EXPECT_DOUBLE_EQ(r.transmission_reduction_pct, 0.0);
}

TEST(Compare, MismatchedScenariosRejected) {
  EXPECT_THROW(compare(summary(1, 0, "a"), summary(4, 0, "b")), ComparisonError);
}

TEST(Summarize, DerivedRatios) {
  MetricsSeries s;
  s.info.reachable = {1, 2, 3, 4};
  s.record(SimTime{}, 1, Counter::PacketsReceivedFirst, 2);
  s.record(SimTime{}, 2, Counter::PacketsReceivedFirst, 2);
  s.record(SimTime{}, 2, Counter::PacketsReceivedDup, 1);
  s.record(SimTime{}, 0, Counter::BitsOffered, 10);
  s.record(SimTime{}, 1, Counter::BitsReceivedFirst, 6);
  s.record(SimTime{}, 2, Counter::BitsLost, 4);
  auto sum = summarize(s);
  EXPECT_DOUBLE_EQ(sum.coverage_fraction, 0.5);
  EXPECT_DOUBLE_EQ(sum.redundancy_ratio, 0.25);
  EXPECT_TRUE(sum.accounting_ok);
  s.record(SimTime{}, 0, Counter::BitsOffered, 1);
  EXPECT_FALSE(summarize(s).accounting_ok);
}

TEST(Summary, KeysSortedOnePerLine) {
  Summary s;
  s.info.config = {{"seed", "7"}};
  std::ostringstream os;
  write_summary(os, s);
  std::istringstream in(os.str());
  std::string line, prev;
  int lines = 0;
  while (std::getline(in, line)) {
    ASSERT_NE(line.find('='), std::string::npos);
    const auto key = line.substr(0, line.find('='));
    EXPECT_LT(prev, key);
    prev = key;
    ++lines;
  }
  EXPECT_GT(lines, 20);
  EXPECT_NE(os.str().find("config.seed=7\n"), std::string::npos);
}

}  // namespace
}  // namespace meshflood
