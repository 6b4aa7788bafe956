#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int status;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("fracprice_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    Outcome invoke(const std::string& args) const {
        const std::string err = path("stderr.txt");
        const std::string cmd = std::string("'") + FRACPRICE_CLI_PATH + "' " + args + " 2>'" + err + "' >/dev/null";
        const int raw = std::system(cmd.c_str());
        return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(err)};
    }

    static std::string slurp(const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    void expect_error(const std::string& args, const std::string& code) const {
        const Outcome r = invoke(args);
        EXPECT_EQ(r.status, 2) << args;
        const auto j = nlohmann::json::parse(r.err, nullptr, false);
        ASSERT_FALSE(j.is_discarded()) << r.err;
        EXPECT_EQ(j.value("error", ""), code) << r.err;
        EXPECT_FALSE(j.value("message", "").empty());
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, GaussianGreenCurve) {
    const std::string out = path("g.tsv");
    ASSERT_EQ(invoke("green --alpha 2 --gamma 1 --sigma 1 --tau 1 --grid -5:5:101 --out '" + out + "'").status, 0);
    std::ifstream in(out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "xi\tg\tlog10_g");
    int rows = 0;
    bool centre = false;
    while (std::getline(in, line)) {
        ++rows;
        std::istringstream ls(line);
        double xi = 0, g = 0;
        ls >> xi >> g;
        if (xi == 0.0) {
            centre = true;
            EXPECT_NEAR(g, 0.2820948, 5e-8);
        }
    }
    EXPECT_EQ(rows, 101);
    EXPECT_TRUE(centre);

    const auto m = nlohmann::json::parse(slurp(out + ".manifest.json"));
    EXPECT_EQ(m["command"], "green");
    ASSERT_EQ(m["outputs"].size(), 1u);
    EXPECT_EQ(m["outputs"][0]["name"], "g.tsv");
    EXPECT_EQ(m["outputs"][0]["sha256"].get<std::string>().size(), 64u);
}

TEST_F(Cli, SynthIsByteIdentical) {
    const std::string args = "synth --days 2 --quotes 6 --seed 11 --out ";
    ASSERT_EQ(invoke(args + "'" + path("a/chain.csv") + "'").status, 0);
    ASSERT_EQ(invoke(args + "'" + path("b/chain.csv") + "'").status, 0);
    EXPECT_EQ(slurp(path("a/chain.csv")), slurp(path("b/chain.csv")));
    EXPECT_EQ(slurp(path("a/chain.csv.manifest.json")), slurp(path("b/chain.csv.manifest.json")));
    ASSERT_EQ(invoke("synth --days 2 --quotes 6 --seed 12 --out '" + path("c/chain.csv") + "'").status, 0);
    EXPECT_NE(slurp(path("a/chain.csv")), slurp(path("c/chain.csv")));
}

TEST_F(Cli, HedgeAndKernelsWriteTables) {
    ASSERT_EQ(invoke("hedge --alpha 1.6 --gamma 1.05 --sigma 0.15 --spot 1000 --strikes 900:1100:5 --tau 0.25 --out '" +
                  path("h.tsv") + "'")
                  .status,
              0);
    std::istringstream h(slurp(path("h.tsv")));
    std::string line;
    int rows = -1;
    while (std::getline(h, line)) ++rows;
    EXPECT_EQ(rows, 5);
    ASSERT_EQ(invoke("kernels --gamma 0.8 --tau 1 --grid 0.1:2:4 --out '" + path("k.tsv") + "'").status, 0);
    EXPECT_EQ(slurp(path("k.tsv")).substr(0, 14), "l\trf\tcaputo\n0.");
}

TEST_F(Cli, FailuresEmitErrorJson) {
    expect_error("green --grid 1:2 --out '" + path("x.tsv") + "'", "invalid_argument");
    expect_error("green --alpha 2.5 --out '" + path("x.tsv") + "'", "invalid_argument");
    expect_error("green --alpha 1.5 --gamma 1.45 --grid 1:2:3 --out '" + path("x.tsv") + "'", "contour_truncation_error_exceeded");
    expect_error("green", "invalid_argument");
    expect_error("nonsense", "invalid_argument");
    expect_error("calibrate --chain '" + path("missing.csv") + "' --out '" + path("fit") + "'", "io_error");
    {
        std::ofstream f(path("empty.csv"));
    }
    expect_error("calibrate --chain '" + path("empty.csv") + "' --out '" + path("fit") + "'", "empty_file");
    {
        std::ofstream f(path("bad.csv"));
        f << "date,side,strike,maturity_years,mid_price,spot,rate,div_yield\n"
             "2008-11-03,C,1050,0.25,12.5,1000,0.01,0.02\n"
             "2008-11-03,P,950,0.25,9.75,999,0.01,0.02\n";
    }
    expect_error("calibrate --chain '" + path("bad.csv") + "' --out '" + path("fit") + "'", "inconsistent_spot_within_day");
}
