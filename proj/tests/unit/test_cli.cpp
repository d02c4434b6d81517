#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

#ifndef QTHERMO_CLI
#error "QTHERMO_CLI must point at the command-line binary"
#endif

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(QTHERMO_CLI) + " " + args + " 2>/dev/null";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

nlohmann::json run_json(const std::string& args) {
    Result r = run(args + " --json");
    EXPECT_EQ(r.code, 0) << args;
    return nlohmann::json::parse(r.out);
}

std::string temp_file(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / ("qthermo_cli_" + name);
    std::ofstream(path) << text;
    return path.string();
}

}  // namespace

TEST(Cli, EntropyOfMaximallyEntangledState) {
    auto j = run_json("entropy --state special:max_entangled:2:2 --variant min");
    EXPECT_NEAR(j["value_bits"].get<double>(), -1.0, 1e-9);
}

TEST(Cli, WorkCostExamples) {
    EXPECT_NEAR(run_json("workcost --state special:max_entangled:2:2 --mode prep")["work_bits"].get<double>(), 1.0, 1e-9);
    EXPECT_NEAR(run_json("workcost --state special:uniform:2:2 --mode eras")["work_bits"].get<double>(), 1.0, 1e-9);
    auto conv = run_json("workcost --state special:max_entangled:2:2 --mode convert --eps 0.1");
    EXPECT_NEAR(conv["work_bits"].get<double>(), 0.0, 1e-12);
}

TEST(Cli, GlobalFlagsAfterSubcommand) {
    auto j = run_json("mutualinfo --state special:max_entangled:2:2 --variant max_up --tol-gap 1e-9");
    EXPECT_NEAR(j["value_bits"].get<double>(), 2.0, 1e-9);
}

TEST(Cli, AepCsvAndJson) {
    const std::string state =
        temp_file("diag.json", R"({"dims": [2, 2], "re": [[0.4,0,0,0],[0,0.1,0,0],[0,0,0.2,0],[0,0,0,0.3]]})");
    auto j = run_json("aep --state " + state + " --eps 0.1 --n-max 3");
    ASSERT_TRUE(j.is_array());
    EXPECT_EQ(j.size(), 3u);
    for (const auto& row : j) EXPECT_TRUE(row["bounds_hold"].get<bool>());
    Result csv = run("aep --state " + state + " --eps 0.1 --n-max 2");
    EXPECT_EQ(csv.code, 0);
    EXPECT_EQ(csv.out.rfind("n,eps,value_bits,lower_bound,upper_bound", 0), 0u);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("entropy --state /nonexistent/file.json").code, 2);
    EXPECT_EQ(run("workcost --state special:max_entangled:2:2 --mode prep --eps 2").code, 2);
    EXPECT_EQ(run("entropy --state special:bogus:2:2").code, 2);
    EXPECT_EQ(run("nosuchcommand").code, 2);
    const std::string broken = temp_file("broken.json", "{ nope");
    EXPECT_EQ(run("entropy --state " + broken).code, 2);
}

TEST(Cli, ProtocolWritesFile) {
    const auto path = (std::filesystem::temp_directory_path() / "qthermo_cli_protocol.json").string();
    auto j = run_json("protocol --state special:max_entangled:2:2 --mode eras --eps 0.05 --protocol-out " + path);
    EXPECT_TRUE(j["verification"]["pass"].get<bool>());
    EXPECT_TRUE(std::filesystem::exists(path));
}
