#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "heron/cli.hpp"

using namespace heron;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "heron");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (!l.empty()) out.push_back(l);
  return out;
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("heron_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override {
    unsetenv("HERON_OUTPUT_DIR");
    std::filesystem::remove_all(dir_);
  }
  std::filesystem::path dir_;
};

}  // namespace

TEST(Construct, KSix) {
  const auto r = run({"construct", "--k", "6"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("a = 160, b = 96, c = 128"), std::string::npos);
  EXPECT_NE(r.out.find("  a2 = 192512\n"), std::string::npos);
  EXPECT_NE(r.out.find("  a4 = 12079595520\n"), std::string::npos);
  EXPECT_NE(r.out.find("  a6 = 247390116249600\n"), std::string::npos);
  EXPECT_NE(r.out.find("area            6144"), std::string::npos);
}

TEST(Construct, SingularParameter) {
  const auto r = run({"construct", "--k", "2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("singular parameter"), std::string::npos) << r.err;
}

TEST(Construct, FractionalParameterAsJson) {
  const auto r = run({"construct", "--k", "98/625", "--format", "jsonl"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["k"], "98/625");
  EXPECT_EQ(j["table_model"][0], "-3859986810117979136/59604644775390625");
}

TEST(Construct, BadInputs) {
  EXPECT_EQ(run({"construct", "--k", "x/y"}).code, 2);
  EXPECT_EQ(run({"construct", "--k", "1/0"}).code, 2);
  EXPECT_EQ(run({"construct"}).code, 2);
  EXPECT_EQ(run({"construct", "--k", "6", "--bogus"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"construct", "--k", "6", "--format", "csv"}).code, 2);
  EXPECT_EQ(run({"sieve", "--k", "6", "--limit", "1"}).code, 2);
  EXPECT_EQ(run({"rank", "--k", "6", "--effort", "9"}).code, 2);
}

TEST(Torsion, KNineteen) {
  const auto r = run({"torsion", "--k", "19"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("torsion          Z/2Z x Z/2Z"), std::string::npos);
  EXPECT_NE(r.out.find("base point order infinite"), std::string::npos);
}

TEST(Rank, KFour) {
  const auto r = run({"rank", "--k", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("rank in [2, 2] determined"), std::string::npos) << r.out;
}

TEST(Rank, RequireDeterminedFailsOnInterval) {
  const auto r = run({"rank", "--k", "23", "--require-determined"});
  EXPECT_EQ(r.code, 3) << r.out << r.err;
  EXPECT_NE(r.out.find("interval"), std::string::npos);
}

TEST(Sieve, KSixAtTen) {
  const auto r = run({"sieve", "--k", "6", "--limit", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("S(10) = 0.972955074527657"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("bad primes skipped 2 3 5"), std::string::npos);
}

TEST(Descent, ListsSelmerClasses) {
  const auto r = run({"descent", "--k", "6"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Selmer classes  8  (s = 1)"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("undecided"), std::string::npos);
}

TEST_F(TempDir, ScanWritesJsonLinesAndResumes) {
  const auto file = (dir_ / "scan.jsonl").string();
  const std::vector<std::string> base{"scan", "--k-min", "3", "--k-max", "6", "--top-fraction", "100",
                                      "--out", file};
  const auto first = run(base);
  ASSERT_EQ(first.code, 0) << first.err;
  const auto text = slurp(file);
  const auto recs = lines(text);
  ASSERT_EQ(recs.size(), 4u);
  EXPECT_EQ(recs[0].rfind("{\"k\":\"3\",\"scale\":\"2\",", 0), 0u) << recs[0];
  EXPECT_NE(first.out.find("Rank          Percent"), std::string::npos);

  auto again = base;
  again.push_back("--resume");
  ASSERT_EQ(run(again).code, 0);
  EXPECT_EQ(slurp(file), text);

  // Interrupted: the last record half written and one record missing.
  {
    std::ofstream out(file, std::ios::trunc);
    out << recs[0] << '\n' << recs[1] << '\n' << recs[2].substr(0, 20);
  }
  ASSERT_EQ(run(again).code, 0);
  EXPECT_EQ(slurp(file), text);
}

TEST_F(TempDir, ScanCsvAndReport) {
  const auto jsonl = (dir_ / "s.jsonl").string(), csv = (dir_ / "s.csv").string();
  ASSERT_EQ(run({"scan", "--k-min", "3", "--k-max", "6", "--top-fraction", "100", "--out", jsonl}).code, 0);
  ASSERT_EQ(run({"scan", "--k-min", "3", "--k-max", "6", "--top-fraction", "100", "--out", csv, "--format", "csv"}).code,
            0);
  const auto rows = lines(slurp(csv));
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], scan::csv_header());
  EXPECT_EQ(rows[4].rfind("6,192512,12079595520,247390116249600,Z/2Z x Z/2Z,", 0), 0u) << rows[4];

  const auto rep = run({"report", jsonl});
  ASSERT_EQ(rep.code, 0) << rep.err;
  EXPECT_EQ(rep.out.rfind("Rank          Percent\n3             25.0%\n2             50.0%\n1             25.0%\n"
                          "undetermined  0.0%\n",
                          0),
            0u)
      << rep.out;
  EXPECT_EQ(run({"report", (dir_ / "missing.jsonl").string()}).code, 1);
  EXPECT_EQ(run({"scan", "--resume", "--k-min", "3", "--k-max", "4"}).code, 2);
}

TEST_F(TempDir, ReportOnEmptyOrMalformedFile) {
  const auto empty = dir_ / "empty.jsonl", bad = dir_ / "bad.jsonl";
  std::ofstream(empty).flush();
  std::ofstream(bad) << "{\"k\":\"3\"}\n";
  EXPECT_EQ(run({"report", empty.string()}).code, 2);
  EXPECT_EQ(run({"report", bad.string()}).code, 2);
}

TEST_F(TempDir, OutputDirectoryFromEnvironment) {
  setenv("HERON_OUTPUT_DIR", dir_.c_str(), 1);
  ASSERT_EQ(run({"scan", "--k-min", "6", "--k-max", "6", "--top-fraction", "100", "--out", "rel.jsonl"}).code, 0);
  EXPECT_TRUE(std::filesystem::exists(dir_ / "rel.jsonl"));
  EXPECT_EQ(lines(slurp(dir_ / "rel.jsonl")).size(), 1u);
}

TEST_F(TempDir, ConfigFileLosesToFlags) {
  const auto cfg = dir_ / "heron.ini";
  std::ofstream(cfg) << "k=6\nlimit=10\n";
  const auto from_file = run({"sieve", "--config", cfg.string()});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_NE(from_file.out.find("S(10) = "), std::string::npos);
  const auto overridden = run({"sieve", "--config", cfg.string(), "--limit", "100"});
  ASSERT_EQ(overridden.code, 0);
  EXPECT_NE(overridden.out.find("S(100) = "), std::string::npos);
}

TEST(Scan, StdoutWhenNoFile) {
  const auto r = run({"scan", "--k-min", "6", "--k-max", "6", "--top-fraction", "100", "--threads", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out).size(), 1u);
  EXPECT_NE(r.err.find("Rank          Percent"), std::string::npos);
}
