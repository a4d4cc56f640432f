#include "cli.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = hdcast::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string &name) {
    const auto dir = fs::temp_directory_path() / ("hdcast_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("help and usage errors") {
    CHECK(run({"--help"}).code == 0);
    CHECK(run({}).code == 1);
    CHECK(run({"indices", "--bogus"}).code == 1);
    CHECK(run({"nonsense"}).code == 1);
}

TEST_CASE("synth, aggregate and indices") {
    const auto dir = scratch("pipeline");
    const auto corpus = dir / "corpus";
    REQUIRE(run({"synth", "--out", corpus.string(), "--seed", "3", "--weeks", "120"}).code == 0);
    CHECK(fs::exists(corpus / "events.csv"));
    CHECK(fs::exists(corpus / "truth.json"));
    CHECK(fs::exists(dir / "corpus.config.json"));

    const auto weekly = dir / "weekly.csv";
    REQUIRE(run({"aggregate", "--events", (corpus / "events.csv").string(), "--out", weekly.string()}).code == 0);
    CHECK(slurp(weekly) == slurp(corpus / "weekly.csv"));
    CHECK(fs::exists(dir / "weekly.csv.config.json"));

    const auto r = run({"indices", "--weekly", weekly.string()});
    CHECK(r.code == 0);
    CHECK(r.out.starts_with("year,week,"));

    CHECK(run({"indices", "--weekly", (dir / "missing.csv").string()}).code == 2);
}

TEST_CASE("config file with flag override") {
    const auto dir = scratch("config");
    REQUIRE(run({"synth", "--out", (dir / "c").string(), "--seed", "5", "--weeks", "110"}).code == 0);
    const auto weekly = (dir / "c" / "weekly.csv").string();
    {
        std::ofstream cfg(dir / "cfg.json");
        cfg << R"({"weekly": ")" << weekly << R"(", "max_lag": 3, "x": "showings", "y": "sold"})";
    }
    const auto from_file = run({"xcorr", "--config", (dir / "cfg.json").string()});
    REQUIRE(from_file.code == 0);
    const auto overridden = run({"xcorr", "--config", (dir / "cfg.json").string(), "--max-lag", "2"});
    REQUIRE(overridden.code == 0);
    CHECK(std::count(from_file.out.begin(), from_file.out.end(), '\n') == 1 + 7);
    CHECK(std::count(overridden.out.begin(), overridden.out.end(), '\n') == 1 + 5);

    std::ofstream(dir / "bad.json") << "{not json";
    CHECK(run({"xcorr", "--config", (dir / "bad.json").string()}).code != 0);
}

TEST_CASE("fit and forecast") {
    const auto dir = scratch("fit");
    REQUIRE(run({"synth", "--out", (dir / "c").string(), "--seed", "2"}).code == 0);
    const auto weekly = (dir / "c" / "weekly.csv").string();
    const auto model = (dir / "lin.json").string();
    REQUIRE(run({"fit-linear", "--weekly", weekly, "--out", model}).code == 0);
    const auto fc = run({"forecast", "--model", model, "--weekly", weekly, "--horizon", "2"});
    CHECK(fc.code == 0);
    CHECK(fc.out.starts_with("step,point,lower,upper,level,xreg_fill"));
    CHECK(run({"forecast", "--model", model, "--weekly", weekly, "--horizon", "5"}).code == 1);

    const auto arima_model = (dir / "arima.json").string();
    REQUIRE(run({"fit-arima", "--weekly", weekly, "--spec", "0,1,1:0,1,0:52", "--out", arima_model}).code == 0);
    const auto afc = run({"forecast", "--model", arima_model, "--weekly", weekly, "--horizon", "4"});
    CHECK(afc.code == 0);
    CHECK(std::count(afc.out.begin(), afc.out.end(), '\n') == 5);
    CHECK(run({"fit-arima", "--weekly", weekly, "--spec", "0,1"}).code == 1);
}
