#include <filesystem>
#include <fstream>
#include <sstream>

#include "bmw/cli.hpp"
#include "bmw/config_io.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace bmw;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("run writes one row per seed plus aggregates") {
    const auto r = cli({"run", "--scenario", "S2", "--policy", "qbmw", "--horizon", "20000", "--warmup", "2000",
                        "--seeds", "3", "--workers", "2"});
    CHECK(r.code == exit_ok);
    CHECK(line_count(r.out) == 1 + 3 + 2);
}

TEST_CASE("sweep crosses values, policies and seeds") {
    const auto r = cli({"sweep", "--scenario", "S3", "--axis", "beta_star", "--values", "0.5,0.7",
                        "--policy", "qbmw,vfmw:0.5", "--horizon", "10000", "--warmup", "1000", "--seeds", "2"});
    CHECK(r.code == exit_ok);
    CHECK(line_count(r.out) == 1 + 2 * 2 * 2);
    const auto a = cli({"sweep", "--scenario", "S3", "--axis", "beta_star", "--values", "0.5,0.7",
                        "--policy", "qbmw,vfmw:0.5", "--horizon", "10000", "--warmup", "1000", "--seeds", "2",
                        "--aggregate"});
    CHECK(line_count(a.out) == 1 + 2 * 2 * (2 + 2));
    const auto ts = cli({"sweep", "--scenario", "S4", "--beta-star", "0.9", "--axis", "ts", "--values", "1,3",
                         "--policy", "wbmw", "--horizon", "5000", "--warmup", "500", "--seeds", "1", "--format", "json"});
    CHECK(ts.code == exit_ok);
    const auto j = nlohmann::json::parse(ts.out);
    CHECK(j["runs"].size() == 2);
    CHECK(j["runs"][1]["T_s"] == 3);
}

TEST_CASE("usage errors exit 1") {
    CHECK(cli({}).code == exit_usage);
    CHECK(cli({"frobnicate"}).code == exit_usage);
    CHECK(cli({"run", "--scenario", "S9"}).code == exit_usage);
    CHECK(cli({"run", "--scenario", "S3"}).code == exit_usage);
    CHECK(cli({"run", "--scenario", "S1", "--horizon", "100", "--warmup", "200"}).code == exit_usage);
    CHECK(cli({"run", "--scenario", "S1", "--policy", "fifo"}).code == exit_usage);
    const auto b = cli({"sweep", "--scenario", "S1", "--axis", "beta_star", "--values", "0.9", "--horizon", "1000",
                        "--warmup", "10", "--seeds", "1"});
    CHECK(b.code == exit_usage);
    CHECK_FALSE(b.err.empty());
    CHECK(cli({"run", "--config", "/nonexistent.json"}).code == exit_usage);
}

TEST_CASE("diverged runs exit 2") {
    const auto r = cli({"run", "--scenario", "S1", "--policy", "maxweight", "--horizon", "50000", "--warmup",
                        "5000", "--seeds", "1"});
    CHECK(r.code == exit_diverged);
    CHECK(r.out.find(",1,") != std::string::npos);
}

TEST_CASE("capacity") {
    const auto r = cli({"capacity", "--scenario", "S2"});
    REQUIRE(r.code == exit_ok);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["beta_star"].get<double>() == doctest::Approx(0.95).epsilon(1e-9));
    CHECK(j["feasible"] == true);
    const auto s5 = nlohmann::json::parse(cli({"capacity", "--scenario", "S5", "--beta-star", "0.9"}).out);
    CHECK(s5["beta_star"].get<double>() == doctest::Approx(0.9).epsilon(1e-9));

    const auto dir = std::filesystem::temp_directory_path() / "bmw_cli_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "zero.json").string();
    std::ofstream(path) << R"({"system": {"n_queues": 2, "schedules": [[1], [2]], "traffic": [
        {"arrival": {"type": "bernoulli", "p": 0}, "service": {"type": "bernoulli", "p": 0.5}},
        {"arrival": {"type": "bernoulli", "p": 0}, "service": {"type": "bernoulli", "p": 0.5}}]}})";
    const auto z = cli({"capacity", "--config", path});
    REQUIRE(z.code == exit_ok);
    CHECK(nlohmann::json::parse(z.out)["beta_star"] == 0.0);
}

TEST_CASE("print-config round-trips through --config") {
    const auto p = cli({"sweep", "--scenario", "S5", "--beta-star", "0.8", "--axis", "alpha", "--values",
                        "0.1,0.5", "--policy", "qbmw,wbmw", "--horizon", "4000", "--warmup", "400", "--seed-list",
                        "3,5", "--print-config"});
    REQUIRE(p.code == exit_ok);
    const RunConfig c = parse_run_config(p.out);
    CHECK(c.system.scenario == "S5");
    CHECK(c.seeds.seeds() == std::vector<std::uint64_t>{3, 5});
    REQUIRE(c.sweep);
    CHECK(c.sweep->values.size() == 2);

    const auto dir = std::filesystem::temp_directory_path() / "bmw_cli_test";
    std::filesystem::create_directories(dir);
    const auto cfg = (dir / "cfg.json").string();
    std::ofstream(cfg) << p.out;
    const auto out = (dir / "sweep.csv").string();
    const auto a = cli({"sweep", "--config", cfg, "--out", out});
    REQUIRE(a.code == exit_ok);
    CHECK(std::filesystem::exists(out + ".meta.json"));
    std::ifstream in(out);
    const std::string file((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto b = cli({"sweep", "--scenario", "S5", "--beta-star", "0.8", "--axis", "alpha", "--values",
                        "0.1,0.5", "--policy", "qbmw,wbmw", "--horizon", "4000", "--warmup", "400", "--seed-list",
                        "3,5"});
    CHECK(b.out == file);
}

TEST_CASE("validate reports a failing negative control with exit 3") {
    const auto ok = cli({"validate", "--horizon", "20000"});
    CHECK(ok.code == exit_ok);
    CHECK(ok.err.find("FAIL") == std::string::npos);
    const auto bad = cli({"validate", "--horizon", "20000", "--inject-fault"});
    CHECK(bad.code == exit_validation);
    CHECK(bad.err.find("FAIL interval_bounds") != std::string::npos);
    CHECK(nlohmann::json::parse(bad.out).is_array());
}
