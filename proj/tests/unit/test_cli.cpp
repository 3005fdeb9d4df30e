#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "ineqforge/baseline.hpp"
#include "ineqforge/certificates.hpp"
#include "ineqforge/json_io.hpp"

using namespace ineqforge;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = INEQFORGE_FIXTURE_DIR;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "ineqforge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ineqforge_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string fixture(const std::string& name) const { return (kFixtures / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, CertifyAndVerifyGaussian) {
  const CliRun c = run({"certify", "--potential", fixture("gauss.json"), "--route", "main2",
                     "--witness", "expaV:0.5", "--out", path("cert.json"), "--csv", path("cert.csv")});
  ASSERT_EQ(c.code, cli::kExitOk) << c.err;
  const auto cert = nlohmann::json::parse(slurp(path("cert.json")));
  EXPECT_EQ(cert.at("schema_version"), kSchemaVersion);
  EXPECT_TRUE(cert.contains("provenance"));
  EXPECT_EQ(slurp(path("cert.csv")).substr(0, 7), "s,beta\n");

  const CliRun v = run({"verify", "--cert", path("cert.json"), "--out", path("report.json")});
  ASSERT_EQ(v.code, cli::kExitOk) << v.err;
  EXPECT_NE(v.out.find("violations: 0"), std::string::npos);
  const auto report = nlohmann::json::parse(slurp(path("report.json")));
  EXPECT_TRUE(report.at("violations").empty());
}

TEST_F(CliTest, VerifyExitsWithViolationCode) {
  RateFunction halved(
      [](double log_s) { return std::log(0.5) + lebesgue_log_beta(1, std::exp(log_s)); },
      ClassTag::polynomial(0.5), {}, Validity{0.0, 1.0});
  write_text_file(path("bad.json"), canonical_dump(certificate_to_json(make_certificate(halved, "test"))));
  const CliRun v = run({"verify", "--cert", path("bad.json"), "--potential", fixture("gauss.json"),
                     "--out", path("report.json"), "--csv", path("report.csv")});
  EXPECT_EQ(v.code, cli::kExitViolations) << v.err;
  const auto report = nlohmann::json::parse(slurp(path("report.json")));
  EXPECT_FALSE(report.at("violations").empty());
  EXPECT_TRUE(fs::exists(path("report.csv")));
}

TEST_F(CliTest, UnknownFlagWritesNothing) {
  const CliRun c = run({"certify", "--potential", fixture("gauss.json"), "--bogus", "1", "--out",
                     path("cert.json")});
  EXPECT_EQ(c.code, cli::kExitInputError);
  EXPECT_FALSE(fs::exists(path("cert.json")));
  EXPECT_FALSE(c.err.empty());
}

TEST_F(CliTest, BadInputWritesNothing) {
  const CliRun c = run({"certify", "--potential", R"({"family":"gaussian","c":-1})", "--out",
                     path("cert.json"), "--csv", path("cert.csv")});
  EXPECT_EQ(c.code, cli::kExitInputError);
  EXPECT_FALSE(fs::exists(path("cert.json")));
  EXPECT_FALSE(fs::exists(path("cert.csv")));
  const CliRun same = run({"certify", "--potential", fixture("gauss.json"), "--out", path("x.json"),
                        "--csv", path("x.json")});
  EXPECT_EQ(same.code, cli::kExitInputError);
  EXPECT_FALSE(fs::exists(path("x.json")));
}

TEST_F(CliTest, CertifyIsDeterministic) {
  for (const char* name : {"a.json", "b.json"}) {
    ASSERT_EQ(run({"certify", "--potential", fixture("double_well.json"), "--route", "main1",
                   "--out", path(name)})
                  .code,
              cli::kExitOk);
  }
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
}

TEST_F(CliTest, DistanceCertificateIsClassified) {
  ASSERT_EQ(run({"certify", "--potential", fixture("power1_5.json"), "--route", "distance",
                 "--classify", "--out", path("cert.json")})
                .code,
            cli::kExitOk);
  const auto cert = certificate_from_json(read_json_file(path("cert.json")));
  EXPECT_EQ(cert.kind, CertificateKind::FSob);
}

TEST_F(CliTest, ConvertToLogSobolevConstant) {
  ASSERT_EQ(run({"convert", "--to", "lsi", "--c-ls", "4", "--d-ls", "1", "--c-p", "1", "--out",
                 path("lsi.json")})
                .code,
            cli::kExitOk);
  EXPECT_EQ(nlohmann::json::parse(slurp(path("lsi.json"))).at("C_LSI"), 7.0);
}

TEST_F(CliTest, ConvertNamedRateToFSobolev) {
  ASSERT_EQ(run({"convert", "--beta", "lebesgue:1", "--to", "fsob", "--u", "10:1000:3:log",
                 "--out", path("f.csv")})
                .code,
            cli::kExitOk);
  const std::string csv = slurp(path("f.csv"));
  EXPECT_EQ(csv.substr(0, 4), "u,F\n");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST_F(CliTest, SweepAndBaselineTables) {
  ASSERT_EQ(run({"baseline", "--n", "2", "--s", "0.25:1:3:log", "--out", path("b.csv")}).code,
            cli::kExitOk);
  const std::string csv = slurp(path("b.csv"));
  EXPECT_EQ(csv.substr(0, 7), "s,beta\n");
  EXPECT_NE(csv.find("0.25,"), std::string::npos);

  ASSERT_EQ(run({"certify", "--potential", fixture("gauss.json"), "--out", path("cert.json")}).code,
            cli::kExitOk);
  ASSERT_EQ(run({"sweep", "--cert", path("cert.json"), "--s", "0.1:1:5:log", "--out",
                 path("sweep.csv")})
                .code,
            cli::kExitOk);
  const std::string sweep = slurp(path("sweep.csv"));
  EXPECT_EQ(std::count(sweep.begin(), sweep.end(), '\n'), 6);
}

TEST_F(CliTest, MalformedGridIsAParseError) {
  const CliRun r = run({"baseline", "--s", "1:2", "--out", path("b.csv")});
  EXPECT_EQ(r.code, cli::kExitInputError);
  EXPECT_NE(r.err.find("ParseError"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("b.csv")));
}

TEST_F(CliTest, AutomaticGridAvoidsUnderflow) {
  ASSERT_EQ(run({"certify", "--potential", fixture("double_well.json"), "--route", "main2", "--out",
                 path("cert.json")})
                .code,
            cli::kExitOk);
  const CliRun v = run({"verify", "--cert", path("cert.json"), "--out", path("report.json")});
  EXPECT_EQ(v.code, cli::kExitOk) << v.err;
  const CliRun fixed = run({"verify", "--cert", path("cert.json"), "--grid", "8:2001", "--out",
                            path("fixed.json")});
  EXPECT_EQ(fixed.code, cli::kExitInputError);
  EXPECT_FALSE(fs::exists(path("fixed.json")));
}
