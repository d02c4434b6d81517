#include "qthermo/io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "../support/test_support.hpp"

using namespace qthermo;
using namespace qthermo::testing;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("qthermo_test_" + name)).string();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST(Io, OperatorRoundTripIsBitExact) {
    Rng rng(1);
    Mat rho = random_state({2, 3}, 4, rng).mat();
    const std::string path = temp_path("rho.json");
    save_operator(path, rho, {2, 3});
    Dims dims;
    Mat back = load_operator(path, &dims);
    EXPECT_TRUE(back == rho);
    EXPECT_EQ(dims, (Dims{2, 3}));
    std::filesystem::remove(path);
}

TEST(Io, ImaginaryPartIsOptional) {
    Json j = Json::parse(R"({"re": [[0.5, 0], [0, 0.5]]})");
    Dims dims;
    Mat m = operator_from_json(j, &dims);
    EXPECT_LT(max_abs(m - diag({0.5, 0.5})), 1e-15);
    EXPECT_EQ(dims, (Dims{2}));
}

TEST(Io, MalformedInputsNameTheField) {
    auto message = [](const std::string& text) {
        try {
            operator_from_json(Json::parse(text), nullptr, "in.json");
        } catch (const std::exception& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_NE(message(R"({"im": [[0]]})").find("missing field 're'"), std::string::npos);
    EXPECT_NE(message(R"({"re": [[1, 0], [0]]})").find("ragged row 1"), std::string::npos);
    EXPECT_NE(message(R"({"re": [[1, "x"], [0, 0]]})").find("in.json"), std::string::npos);
    EXPECT_THROW(operator_from_json(Json::parse(R"({"re": [[1, 0, 0]]})")), DimensionError);
    EXPECT_THROW(operator_from_json(Json::parse(R"({"dims": [3], "re": [[1, 0], [0, 0]]})")), DimensionError);
    EXPECT_THROW(operator_from_json(Json::parse(R"({"dims": [0, 2], "re": [[1, 0], [0, 0]]})")), ValidationError);
}

TEST(Io, FileErrors) {
    EXPECT_THROW(read_json_file(temp_path("does_not_exist.json")), ValidationError);
    const std::string path = temp_path("broken.json");
    write(path, "{ not json");
    EXPECT_THROW(read_json_file(path), ValidationError);
    std::filesystem::remove(path);
}

TEST(Io, ChoiRoundTrip) {
    Rng rng(2);
    ChoiOperator ch = random_channel({2}, {3}, rng);
    ChoiOperator back = choi_from_json(choi_to_json(ch));
    EXPECT_TRUE(back.mat() == ch.mat());
    EXPECT_EQ(back.in_dims(), ch.in_dims());
    EXPECT_EQ(back.out_dims(), ch.out_dims());
}

TEST(Io, ProtocolRoundTrip) {
    ThermoState ts = random_ts(2, 2, 3);
    Protocol p = build_erasure_protocol(ts, 0.1);
    Protocol back = protocol_from_json(Json::parse(protocol_to_json(p).dump()));
    ASSERT_EQ(back.stages.size(), 1u);
    EXPECT_TRUE(back.stages[0].operation.channel.mat() == p.stages[0].operation.channel.mat());
    EXPECT_EQ(back.ideal_work_bits(), p.ideal_work_bits());
    EXPECT_EQ(back.d_battery_in(), p.d_battery_in());
    EXPECT_LT(max_abs(run_protocol(back, ts.rho().mat()) - run_protocol(p, ts.rho().mat())), 1e-14);
}

TEST(Io, ReportsSerialize) {
    WorkReport r;
    r.work_bits = std::numeric_limits<double>::infinity();
    r.diagnostics["x"] = 1.5;
    Json j = work_report_to_json(r);
    EXPECT_TRUE(j["work_bits"].is_null());
    EXPECT_EQ(j["diagnostics"]["x"].get<double>(), 1.5);

    std::vector<AepPoint> pts(2);
    pts[0].n = 1;
    pts[1].n = 2;
    pts[1].value_bits = 0.125;
    std::string csv = aep_to_csv(pts);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,eps,value_bits,lower_bound,upper_bound");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    EXPECT_EQ(aep_to_json(pts).size(), 2u);
}
