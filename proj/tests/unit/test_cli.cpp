#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "rlwe_lab/cli.hpp"
#include "rlwe_lab/io.hpp"

using namespace rlwe_lab;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::initializer_list<std::string> args) {
  std::vector<std::string> store{"rlwe_lab"};
  store.insert(store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : store) argv.push_back(s.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("rlwe_lab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string value_of(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  return "<missing>";
}

}  // namespace

TEST(Io, RingElementLine) {
  const RingContext ctx(4, 17);
  const RingElement e(ctx, {1, -2, 8, 0});
  std::ostringstream out;
  write_ring_element(out, e);
  EXPECT_EQ(out.str(), "1 -2 8 0\n");
  EXPECT_EQ(parse_ring_element("1 -2 8 0", ctx), e);
  EXPECT_THROW(parse_ring_element("1 2 3", ctx), FormatError);
  EXPECT_THROW(parse_ring_element("1 2 x 4", ctx), FormatError);
}

TEST(Io, BasisRoundTrip) {
  const IntegerBasis<std::int64_t> b{{1, 2, 3}, {-4, 5, 6}};
  std::stringstream ss;
  write_basis(ss, b);
  EXPECT_EQ(ss.str(), "2 3\n1 2 3\n-4 5 6\n");
  EXPECT_EQ(read_basis(ss), b);
  std::stringstream truncated("2 2\n1 2\n3\n");
  EXPECT_THROW(read_basis(truncated), FormatError);
}

TEST(Io, KeypairRoundTrip) {
  const RingContext ctx(5, 1997);
  Rng rng = make_rng(3);
  KeyPair kp = keygen(ctx, rng, GaussianParams());
  kp.pub.seed = 3;
  std::stringstream ss;
  write_keypair(ss, kp);
  const auto header = ss.str().substr(0, ss.str().find('\n'));
  EXPECT_EQ(header, "5 1997 1 3");
  const auto back = read_keypair(ss);
  EXPECT_EQ(back.pub.A, kp.pub.A);
  EXPECT_EQ(back.pub.A_prime, kp.pub.A_prime);
  EXPECT_EQ(back.pub.b, kp.pub.b);
  EXPECT_EQ(back.pub.b_prime, kp.pub.b_prime);
  EXPECT_EQ(back.pub.seed, 3u);
  EXPECT_EQ(back.secret, kp.secret);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, cli::kExitUsage);
  const auto r = invoke({"sweep", "--bogus"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(invoke({"keygen", "--degree", "8"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"report", "--in", "x.csv", "--compare", "nonsense"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"--help"}).code, cli::kExitOk);
}

TEST(Cli, RuntimeErrors) {
  EXPECT_EQ(invoke({"attack", "--instance", "/nonexistent/instance.txt"}).code, cli::kExitRuntime);
  EXPECT_EQ(invoke({"keygen", "--degree", "8", "--q", "1998", "--out", "/tmp/never.txt"}).code, cli::kExitRuntime);
}

TEST_F(TempDir, KeygenThenAttackMatchesInProcess) {
  const auto key = path("key.txt");
  ASSERT_EQ(invoke({"keygen", "--degree", "12", "--seed", "41", "--out", key}).code, 0);
  const auto r = invoke({"attack", "--instance", key});
  ASSERT_EQ(r.code, 0) << r.err;

  const RingContext ctx(12, 1997);
  Rng rng = make_rng(41);
  const KeyPair kp = keygen(ctx, rng, GaussianParams());
  const auto res = attack(kp.pub);
  EXPECT_EQ(value_of(r.out, "success"), res.success ? "true" : "false");
  EXPECT_EQ(value_of(r.out, "failure_kind"), std::string(to_string(res.failure)));
  ASSERT_TRUE(res.recovered_secret);
  std::string s;
  for (std::size_t i = 0; i < res.recovered_secret->size(); ++i)
    s += (i ? " " : "") + std::to_string((*res.recovered_secret)[i]);
  EXPECT_EQ(value_of(r.out, "secret"), s);
}

TEST_F(TempDir, ZeroNoiseInstanceAttack) {
  const auto key = path("key.txt");
  ASSERT_EQ(invoke({"keygen", "--degree", "8", "--sigma", "0", "--out", key}).code, 0);
  const auto r = invoke({"attack", "--instance", key, "--delta", "0.75"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(value_of(r.out, "success"), "true");
  EXPECT_EQ(value_of(r.out, "e"), "0 0 0 0 0 0 0 0");
}

TEST_F(TempDir, EncryptDecrypt) {
  const auto key = path("key.txt"), msg = path("msg.txt"), ct = path("ct.txt");
  ASSERT_EQ(invoke({"keygen", "--degree", "6", "--seed", "2", "--out", key}).code, 0);
  {
    std::ofstream m(msg);
    m << "1 0 1 1 0 1\n";
  }
  ASSERT_EQ(invoke({"encrypt", "--key", key, "--message", msg, "--seed", "9", "--out", ct}).code, 0);
  const auto r = invoke({"decrypt", "--key", key, "--in", ct});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "1 0 1 1 0 1\n");
}

TEST_F(TempDir, Reduce) {
  const auto basis = path("basis.txt");
  {
    std::ofstream b(basis);
    b << "2 2\n201 37\n1648 297\n";
  }
  const auto r = invoke({"reduce", "--basis", basis, "--delta", "0.99"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  const auto reduced = read_basis(in);
  EXPECT_TRUE(is_lll_reduced(reduced));
  EXPECT_TRUE(same_lattice(reduced, IntegerBasis<std::int64_t>{{201, 37}, {1648, 297}}));
}

TEST_F(TempDir, SweepThenReport) {
  const auto csv = path("results.csv");
  const auto s = invoke({"sweep", "--degrees", "6,4", "--trials", "2", "--seed", "7", "--out", csv, "--jobs", "2"});
  ASSERT_EQ(s.code, 0) << s.err;
  const auto text = slurp(csv);
  EXPECT_EQ(text.substr(0, text.find('\n')), kCsvHeader);
  std::size_t lines = 0;
  for (char ch : text) lines += ch == '\n';
  EXPECT_EQ(lines, 5u);
  const auto r = invoke({"report", "--in", csv, "--compare", "primes-vs-rest"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("| Field extension | Success rate | Average time [s] |"), std::string::npos);
  EXPECT_NE(r.out.find("Kruskal-Wallis"), std::string::npos);
}

TEST_F(TempDir, SweepSingleRow) {
  const auto csv = path("one.csv");
  ASSERT_EQ(invoke({"sweep", "--degrees", "8", "--trials", "1", "--seed", "7", "--out", csv}).code, 0);
  std::ifstream in(csv);
  EXPECT_EQ(read_csv(in).size(), 1u);
}
