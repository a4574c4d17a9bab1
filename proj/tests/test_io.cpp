#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "gfflab/io.hpp"

using namespace gfflab;
namespace fs = std::filesystem;

TEST(FormatDouble, ShortestRoundTrip) {
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(-1e6), "-1000000");
    for (double v : {1.0 / 3.0, 2.0 / 7.0, 1e-300, 6.02214076e23, -0.0625})
        EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
}

TEST(GitBlobHash, MatchesGit) {
    EXPECT_EQ(git_blob_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    EXPECT_EQ(git_blob_hash("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST(AtomicWrite, CreatesDirectoriesAndLeavesNoTemporary) {
    const fs::path dir = fs::temp_directory_path() / "gfflab_io_test";
    fs::remove_all(dir);
    const fs::path file = dir / "nested" / "out.csv";
    atomic_write(file, "a,b\n1,2\n");
    std::ifstream in(file);
    std::stringstream buf;
    buf << in.rdbuf();
    EXPECT_EQ(buf.str(), "a,b\n1,2\n");
    atomic_write(file, "x\n");
    std::ifstream again(file);
    std::string line;
    std::getline(again, line);
    EXPECT_EQ(line, "x");
    EXPECT_FALSE(fs::exists(dir / "nested" / "out.csv.tmp"));
    fs::remove_all(dir);
}

TEST(AtomicWrite, UnwritableTargetThrowsIoError) {
    EXPECT_THROW(atomic_write("/proc/gfflab/cannot/exist.csv", "x"), io_error);
}

TEST(EstimateCsv, ColumnOrder) {
    const Estimate e = make_estimate("crossing:vertical", -0.5, 8, 50, 100, 42);
    const std::string row = estimate_csv_row("run-1", e, "abc123");
    EXPECT_EQ(std::string(kEstimateHeader), "experiment_id,event,h,n,M,p_hat,ci_lo,ci_hi,seed,schema_version,config_hash");
    EXPECT_EQ(row.rfind("run-1,crossing:vertical,-0.5,8,100,0.5,", 0), 0u);
    EXPECT_NE(row.find(",42,1,abc123"), std::string::npos);
}

TEST(EstimateCsv, QuotesFieldsWithSeparators) {
    EXPECT_EQ(csv_field("crossing:vertical@1,2,3,4"), "\"crossing:vertical@1,2,3,4\"");
    EXPECT_EQ(csv_field("a\"b"), "\"a\"\"b\"");
    EXPECT_EQ(csv_field("plain"), "plain");
}

TEST(CheckJson, SchemaAndNonFiniteValues) {
    CheckReport r;
    r.name = "fkg";
    r.lhs = 0.25;
    r.rhs = std::numeric_limits<double>::quiet_NaN();
    r.margin = 0.0;
    r.se = std::numeric_limits<double>::infinity();
    r.verdict = Verdict::violated_within_noise;
    r.params = {{"h", 0.0}};
    r.labels = {{"event_a", "site:1,1"}};
    r.seed = 9;
    const nlohmann::json j = to_json(r);
    for (const char* key : {"name", "lhs", "rhs", "margin", "se", "verdict", "params", "seed"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["verdict"], "violated-within-noise");
    EXPECT_TRUE(j["rhs"].is_null() || j.dump().find("null") != std::string::npos);
    EXPECT_EQ(j.dump().find("nan"), std::string::npos);
    EXPECT_EQ(j["params"]["event_a"], "site:1,1");
}

TEST(RenormCsv, EasyRows) {
    const auto s = easy_sequences<double>(0.5, 100.0, 1.0, 2);
    EXPECT_EQ(renorm_csv(s), "k,delta,n,h\n0,0.5,100,1\n1,0.25,400,0.5\n2,0.0625,6400,0.25\n");
}
