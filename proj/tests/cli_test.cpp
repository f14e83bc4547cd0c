#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tickerlab/market_data.h"

namespace {

const std::filesystem::path kFixtures = TICKERLAB_FIXTURE_DIR;

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("tickerlab_cli_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Runs the CLI with `args`, returning its exit status; output goes to `log`.
int run(const std::string& args, const std::filesystem::path& log) {
    const std::string cmd = std::string("\"") + TICKERLAB_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string kTiny =
    "--units 2 --units2 2 --filters 2 --epochs 2 --batch-size 64";

TEST(Cli, UsageErrorsAreConfigErrors) {
    const auto dir = scratch("usage");
    EXPECT_EQ(run("", dir / "log"), 2);
    EXPECT_EQ(run("compare", dir / "log"), 2);
    EXPECT_EQ(run("--help", dir / "log"), 0);
    EXPECT_EQ(run("--offline compare MSFT --models '' --no-kalman", dir / "log"), 2);
    EXPECT_EQ(run("--offline compare MSFT --models gru", dir / "log"), 2);
    EXPECT_EQ(run("--offline --start 2020-13-01 compare MSFT", dir / "log"), 2);
}

TEST(Cli, DataErrors) {
    const auto dir = scratch("data");
    EXPECT_EQ(run("--offline compare ZZZZZZ --models ''", dir / "log"), 1);
    EXPECT_NE(read_text(dir / "log").find("ZZZZZZ"), std::string::npos);
    EXPECT_EQ(run("--offline --start 1990-01-01 --end 1991-01-01 compare MSFT --models ''", dir / "log"), 1);
}

TEST(Cli, DivergenceExitCode) {
    const auto dir = scratch("diverge");
    EXPECT_EQ(run("--offline --start 2019-01-01 --end 2020-01-01 compare MSFT --models single --no-kalman "
                  "--units 2 --epochs 20 --lr 1e300 --clip-norm 0",
                  dir / "log"),
              3);
}

TEST(Cli, CompareWritesReport) {
    const auto dir = scratch("compare");
    ASSERT_EQ(run("--offline --start 2019-01-01 --end 2020-01-01 compare msft ^GSPC " + kTiny + " -o \"" +
                      (dir / "out").string() + "\"",
                  dir / "log"),
              0)
        << read_text(dir / "log");
    const auto report = read_text(dir / "out" / "report.csv");
    EXPECT_EQ(std::count(report.begin(), report.end(), '\n'), 11);
    EXPECT_NE(report.find("MSFT,kalman,"), std::string::npos);
    EXPECT_NE(read_text(dir / "log").find("Kalman Filter"), std::string::npos);
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / "plots" / "GSPC_cnn_lstm.svg"));
}

TEST(Cli, ConfigFileMirrorsFlags) {
    const auto dir = scratch("config");
    {
        std::ofstream cfg(dir / "run.ini");
        cfg << "offline=true\nstart=2019-01-01\nend=2020-01-01\n[compare]\nmodels=\"\"\n";
    }
    ASSERT_EQ(run("--config \"" + (dir / "run.ini").string() + "\" compare TSLA -o \"" + (dir / "out").string() + "\"",
                  dir / "log"),
              0)
        << read_text(dir / "log");
    const auto report = read_text(dir / "out" / "report.csv");
    EXPECT_EQ(std::count(report.begin(), report.end(), '\n'), 2);
    // One year: 252 sessions, a quarter of them in the test partition.
    EXPECT_NE(report.find(",63,"), std::string::npos) << report;
}

TEST(Cli, FetchTrainTransferPlot) {
    const auto dir = scratch("flow");
    ASSERT_EQ(run("--offline fetch MSFT ^RUMIC -o \"" + dir.string() + "\"", dir / "log"), 0) << read_text(dir / "log");
    const auto fetched = tickerlab::data::load_csv_file(dir / "RUMIC.csv", "^RUMIC");
    EXPECT_EQ(fetched, tickerlab::data::load_csv_file(kFixtures / "csv" / "RUMIC.csv", "^RUMIC"));

    const std::string range = "--csv-dir \"" + dir.string() + "\" --start 2019-01-01 --end 2020-01-01 ";
    const auto model = dir / "msft.tklb";
    ASSERT_EQ(run(range + "train MSFT -m cnn " + kTiny + " -o \"" + model.string() + "\"", dir / "log"), 0)
        << read_text(dir / "log");
    EXPECT_TRUE(std::filesystem::exists(model));
    ASSERT_EQ(run(range + "transfer -m \"" + model.string() + "\" ^RUMIC -o \"" + dir.string() + "\"", dir / "log"), 0)
        << read_text(dir / "log");
    EXPECT_NE(read_text(dir / "log").find("r_squared="), std::string::npos);
    EXPECT_TRUE(std::filesystem::exists(dir / "RUMIC_transfer_cnn_lstm.csv"));

    ASSERT_EQ(run(range + "plot MSFT -a kalman --kalman-r 0.5 -o \"" + (dir / "k").string() + "\"", dir / "log"), 0)
        << read_text(dir / "log");
    const auto csv = read_text(dir / "k.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 253);
    ASSERT_EQ(run(range + "plot MSFT -m \"" + model.string() + "\" -o \"" + (dir / "m").string() + "\"", dir / "log"), 0)
        << read_text(dir / "log");
    EXPECT_TRUE(std::filesystem::exists(dir / "m.svg"));

    std::ofstream(dir / "broken.tklb") << "TKLB";
    EXPECT_EQ(run(range + "transfer -m \"" + (dir / "broken.tklb").string() + "\" MSFT", dir / "log"), 1);
}

}  // namespace
