#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "rlwe_lab/experiment.hpp"
#include "rlwe_lab/report.hpp"

using namespace rlwe_lab;

namespace {

TrialRecord rec(std::size_t degree, std::size_t trial, bool success, double t) {
  TrialRecord r;
  r.degree = degree;
  r.trial = trial;
  r.success = success;
  r.failure = success ? FailureKind::none : FailureKind::no_short_vector;
  r.time_s = t;
  return r;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("rlwe_lab_test_" + name);
}

}  // namespace

TEST(RunTrial, ZeroSigmaSucceeds) {
  TrialParams p;
  p.sigma = 0.0;
  const auto r = run_trial(8, p, 123, 4);
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.failure, FailureKind::none);
  EXPECT_EQ(r.degree, 8u);
  EXPECT_EQ(r.trial, 4u);
  EXPECT_EQ(r.seed, 123u);
  EXPECT_GT(r.root_hermite, 0.0);
}

TEST(RunTrial, DeterministicExceptTime) {
  const TrialParams p;
  const auto a = run_trial(12, p, 99);
  const auto b = run_trial(12, p, 99);
  EXPECT_EQ(a.success, b.success);
  EXPECT_EQ(a.failure, b.failure);
  EXPECT_EQ(a.recovered_secret, b.recovered_secret);
  EXPECT_DOUBLE_EQ(a.root_hermite, b.root_hermite);
}

TEST(RunTrial, ErrorsBecomeFailureKinds) {
  TrialParams bad;
  bad.q = 1998;  // not prime
  const auto r = run_trial(8, bad, 1);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.failure, FailureKind::internal_error);

  TrialParams tight;
  tight.lll.iteration_budget = 5;
  const auto r2 = run_trial(8, tight, 1);
  EXPECT_EQ(r2.failure, FailureKind::budget_exhausted);

  const auto r3 = run_trial(8, TrialParams{}, 1, 0, [](std::size_t, std::size_t) { throw std::runtime_error("boom"); });
  EXPECT_EQ(r3.failure, FailureKind::internal_error);
}

TEST(Aggregate, RatesAndMeans) {
  std::vector<TrialRecord> rs;
  for (std::size_t i = 0; i < 100; ++i) rs.push_back(rec(23, i, i < 61, 1.0));
  rs.push_back(rec(29, 0, false, 1.0));
  rs.push_back(rec(29, 1, false, 3.0));
  const auto report = aggregate(rs);
  EXPECT_DOUBLE_EQ(report.at(23).success_rate, 0.61);
  EXPECT_EQ(report.at(23).successes, 61u);
  EXPECT_DOUBLE_EQ(report.at(29).success_rate, 0.0);
  EXPECT_DOUBLE_EQ(report.at(29).mean_time_s, 2.0);
  EXPECT_FALSE(report.at(29).mean_success_time_s);
  EXPECT_EQ(report.records.size(), 102u);
  EXPECT_THROW(aggregate({}), std::invalid_argument);
}

TEST(Aggregate, SortsRecords) {
  const auto report = aggregate({rec(5, 1, true, 1), rec(3, 0, true, 1), rec(5, 0, false, 1)});
  ASSERT_EQ(report.per_degree.size(), 2u);
  EXPECT_EQ(report.per_degree[0].degree, 3u);
  EXPECT_EQ(report.records[1].degree, 5u);
  EXPECT_EQ(report.records[1].trial, 0u);
}

TEST(Csv, RoundTrip) {
  auto r = rec(31, 7, true, 0.125);
  r.root_hermite = 1.0123456789;
  r.seed = 18446744073709551615ull;
  std::stringstream ss;
  write_csv_header(ss);
  write_csv_row(ss, r);
  write_csv_row(ss, rec(32, 0, false, 2.5));
  const auto back = read_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].degree, 31u);
  EXPECT_EQ(back[0].trial, 7u);
  EXPECT_TRUE(back[0].success);
  EXPECT_DOUBLE_EQ(back[0].time_s, 0.125);
  EXPECT_NEAR(back[0].root_hermite, 1.0123456789, 1e-11);
  EXPECT_EQ(back[0].seed, r.seed);
  EXPECT_EQ(back[1].failure, FailureKind::no_short_vector);
}

TEST(Csv, RejectsMalformedInput) {
  std::stringstream bad_header("degree,trial\n");
  EXPECT_THROW(read_csv(bad_header), std::runtime_error);
  std::stringstream bad_row(std::string(kCsvHeader) + "\n1,2,3\n");
  EXPECT_THROW(read_csv(bad_row), std::runtime_error);
  std::stringstream inconsistent(std::string(kCsvHeader) + "\n8,0,1,no_short_vector,0.1,1.0,5\n");
  EXPECT_THROW(read_csv(inconsistent), std::runtime_error);
}

TEST(SweepConfig, Validation) {
  SweepConfig c;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.degrees = {8, 4};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.degrees = {4, 8};
  c.trials_per_degree = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.trials_per_degree = 1;
  EXPECT_NO_THROW(c.validate());
  c.delta = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Sweep, SingleTrial) {
  SweepConfig c;
  c.degrees = {8};
  c.trials_per_degree = 1;
  c.master_seed = 7;
  const auto report = run_sweep(c);
  ASSERT_EQ(report.records.size(), 1u);
  const double rate = report.at(8).success_rate;
  EXPECT_TRUE(rate == 0.0 || rate == 1.0);
  EXPECT_EQ(report.records[0].seed, trial_seed(7, 8, 0));
}

TEST(Sweep, DeterministicAcrossJobCounts) {
  SweepConfig c;
  c.degrees = {6, 8, 10};
  c.trials_per_degree = 4;
  c.master_seed = 2024;
  c.jobs = 1;
  const auto a = run_sweep(c);
  c.jobs = 3;
  const auto b = run_sweep(c);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].degree, b.records[i].degree);
    EXPECT_EQ(a.records[i].trial, b.records[i].trial);
    EXPECT_EQ(a.records[i].success, b.records[i].success);
    EXPECT_EQ(a.records[i].seed, b.records[i].seed);
    EXPECT_EQ(a.records[i].recovered_secret, b.records[i].recovered_secret);
  }
}

TEST(Sweep, AddingDegreesKeepsOtherSeeds) {
  EXPECT_EQ(trial_seed(5, 32, 3), trial_seed(5, 32, 3));
  SweepConfig c;
  c.degrees = {6};
  c.trials_per_degree = 2;
  c.master_seed = 5;
  const auto a = run_sweep(c);
  c.degrees = {4, 6};
  const auto b = run_sweep(c);
  EXPECT_EQ(a.records[0].seed, b.records[2].seed);
  EXPECT_EQ(a.records[1].recovered_secret, b.records[3].recovered_secret);
}

TEST(Sweep, NoRecordLossUnderFaults) {
  SweepConfig c;
  c.degrees = {4, 6, 8};
  c.trials_per_degree = 5;
  c.jobs = 2;
  std::atomic<int> calls{0};
  c.fault = [&](std::size_t, std::size_t trial) {
    ++calls;
    if (trial % 2 == 1) throw std::runtime_error("injected");
  };
  const auto report = run_sweep(c);
  EXPECT_EQ(report.records.size(), 15u);
  EXPECT_EQ(calls.load(), 15);
  for (const auto& r : report.records) {
    if (r.trial % 2 == 1) {
      EXPECT_EQ(r.failure, FailureKind::internal_error);
    }
  }
}

TEST(Sweep, StreamsCsvReadableByReport) {
  const auto path = temp_path("sweep.csv");
  SweepConfig c;
  c.degrees = {4, 5};
  c.trials_per_degree = 3;
  c.output_path = path.string();
  std::size_t seen = 0;
  const auto report = run_sweep(c, [&](const TrialRecord&) { ++seen; });
  EXPECT_EQ(seen, 6u);
  std::ifstream in(path);
  const auto back = aggregate(read_csv(in));
  ASSERT_EQ(back.records.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(back.records[i].success, report.records[i].success);
    EXPECT_EQ(back.records[i].seed, report.records[i].seed);
  }
  std::filesystem::remove(path);
}

TEST(Sweep, UnwritableOutput) {
  SweepConfig c;
  c.degrees = {4};
  c.trials_per_degree = 1;
  c.output_path = "/nonexistent-dir/x/results.csv";
  EXPECT_THROW(run_sweep(c), std::runtime_error);
}

TEST(Report, Families) {
  EXPECT_EQ(reference_degree(23), 32u);
  EXPECT_EQ(reference_degree(41), 32u);
  EXPECT_EQ(reference_degree(59), 64u);
  EXPECT_EQ(reference_degree(137), 128u);
  EXPECT_EQ(reference_degree(45), 32u);
  EXPECT_EQ(reference_degree(46), 64u);
  EXPECT_EQ(reference_degree(109), 128u);
  EXPECT_EQ(prime_below(32), 31u);
  EXPECT_EQ(prime_above(32), 37u);
  EXPECT_EQ(prime_below(64), 61u);
  EXPECT_EQ(prime_above(64), 67u);
  EXPECT_EQ(prime_below(128), 127u);
  EXPECT_EQ(prime_above(128), 131u);
  EXPECT_TRUE(is_neighbour_prime(31));
  EXPECT_TRUE(is_neighbour_prime(131));
  EXPECT_FALSE(is_neighbour_prime(29));
  EXPECT_FALSE(is_neighbour_prime(32));
}

TEST(Report, MarkdownTableAndStats) {
  std::vector<TrialRecord> rs;
  for (std::size_t d : {23u, 29u, 31u, 32u, 33u, 37u, 41u})
    for (std::size_t t = 0; t < 10; ++t) rs.push_back(rec(d, t, (t + d) % 3 != 0, 0.1 * static_cast<double>(d + t)));
  const auto report = aggregate(rs);
  std::ostringstream out;
  write_report(out, report, Comparison::primes_vs_rest);
  const auto text = out.str();
  EXPECT_NE(text.find("| Field extension | Success rate | Average time [s] |"), std::string::npos);
  EXPECT_NE(text.find("| 23 | 0.70 |"), std::string::npos);
  EXPECT_NE(text.find("Neighbour primes: 31, 37"), std::string::npos);
  EXPECT_NE(text.find("Mann-Whitney, per-degree success rate: U ="), std::string::npos);
  EXPECT_NE(text.find("Kruskal-Wallis, times near 32: H ="), std::string::npos);
  EXPECT_NE(text.find("Shapiro-Wilk and Steel-Dwass: not computed"), std::string::npos);

  const auto c = compare_primes_vs_rest(report);
  ASSERT_TRUE(c.success_rates);
  EXPECT_EQ(c.prime_degrees, (std::vector<std::size_t>{31, 37}));
  EXPECT_EQ(c.other_degrees.size(), 5u);
}
