#include "ecp/cli.hpp"
#include "ecp/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

namespace fs = std::filesystem;
using ecp::cli::run;
namespace exit_code = ecp::cli::exit_code;
using json = nlohmann::ordered_json;

namespace
{

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("ecp-cli-test-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int invoke(std::vector<std::string> args, std::string* output = nullptr)
{
    args.insert(args.begin(), "ecp");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int status = run(static_cast<int>(argv.size()), argv.data(), out, err);
    if (output)
        *output = out.str() + err.str();
    return status;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void write(const fs::path& path, const std::string& text)
{
    std::ofstream(path) << text;
}

} // namespace

TEST_CASE("euler-curve on a two-point fixture")
{
    const auto dir = scratch("fixture");
    write(dir / "cloud.csv", "x0\n0\n0.5\n");
    write(dir / "config.json", R"({"density": {"kind": "uniform-cube", "dimension": 1}, "scaling": {"n": 1},
                                   "grid": {"t": [0.1, 0.5]}})");
    const int status = invoke({"euler-curve", (dir / "config.json").string(), "--cloud", (dir / "cloud.csv").string(),
                               "--out", (dir / "out").string()});
    REQUIRE(status == exit_code::success);
    std::istringstream csv(slurp(dir / "out" / "curve.csv"));
    std::string header, first, second, third;
    std::getline(csv, header);
    std::getline(csv, first);
    std::getline(csv, second);
    CHECK(header == "t,chi");
    CHECK(first == "0,2");
    CHECK(second == "0.25,1");
    CHECK_FALSE(std::getline(csv, third));
    const auto manifest = json::parse(slurp(dir / "out" / "manifest.json"));
    CHECK(manifest["command"] == "euler-curve");
    CHECK(manifest["exit_status"] == 0);
    CHECK(manifest["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
    const auto effective = slurp(dir / "out" / "config.effective.json");
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(ecp::cli::fnv1a64(effective)));
    CHECK(manifest["config_hash"] == std::string("fnv1a64:") + hex);
    CHECK(fs::exists(dir / "out" / "curve.json"));
}

TEST_CASE("validation failures write nothing")
{
    const auto dir = scratch("invalid");
    write(dir / "negative.json", R"({"scaling": {"n": -5}})");
    CHECK(invoke({"sample", (dir / "negative.json").string(), "--out", (dir / "a").string()}) ==
          exit_code::validation);
    CHECK_FALSE(fs::exists(dir / "a"));

    write(dir / "unknown.json", R"({"scaling": {"n": 5, "bogus": 1}})");
    std::string message;
    CHECK(invoke({"sample", (dir / "unknown.json").string(), "--out", (dir / "b").string()}, &message) ==
          exit_code::validation);
    CHECK(message.find("bogus") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "b"));

    write(dir / "broken.json", "{ not json");
    CHECK(invoke({"sample", (dir / "broken.json").string(), "--out", (dir / "c").string()}) == exit_code::validation);
    CHECK(invoke({"sample", (dir / "missing.json").string()}) == exit_code::validation);
    CHECK(invoke({"no-such-command"}) == exit_code::validation);
    CHECK(invoke({"limit-mean", "--set", "compute.epsilon=-1", "--out", (dir / "d").string()}) ==
          exit_code::validation);
    CHECK_FALSE(fs::exists(dir / "d"));
}

TEST_CASE("guard trips map to their exit status")
{
    const auto dir = scratch("guard");
    CHECK(invoke({"limit-mean", "--set", "grid.t=[5.0]", "--set", "compute.k_max_cap=2", "--out",
                  (dir / "a").string()}) == exit_code::guard);
    CHECK_FALSE(fs::exists(dir / "a"));
}

TEST_CASE("limit-mean on the unit interval")
{
    const auto dir = scratch("limit");
    std::string message;
    REQUIRE(invoke({"limit-mean", "--set", "grid.t=[0.5]", "--eps", "1e-9", "--out", (dir / "out").string()},
                   &message) == exit_code::success);
    const auto doc = json::parse(slurp(dir / "out" / "limit_mean.json"));
    const double value = doc["results"][0]["estimate"]["value"].get<double>();
    CHECK(std::fabs(value - std::exp(-1.0)) <= 1e-9);
    CHECK(doc["results"][0]["truncation"]["epsilon"] == 1e-9);
}

TEST_CASE("override precedence and the effective config")
{
    const auto dir = scratch("precedence");
    write(dir / "config.json", R"({"seeds": {"base": 3}, "scaling": {"n": 20}})");
    REQUIRE(invoke({"sample", (dir / "config.json").string(), "--set", "seeds.base=4", "--seed", "5", "--out",
                    (dir / "out").string()}) == exit_code::success);
    const auto effective = json::parse(slurp(dir / "out" / "config.effective.json"));
    CHECK(effective["seeds"]["base"] == 5);
    CHECK(effective["scaling"]["n"] == 20);
    CHECK(effective.contains("compute"));
    CHECK(effective["compute"].contains("epsilon"));

    // The effective config alone reproduces the run, including its output location.
    const auto cloud = slurp(dir / "out" / "cloud.csv");
    const auto hash = json::parse(slurp(dir / "out" / "manifest.json"))["config_hash"];
    fs::copy_file(dir / "out" / "config.effective.json", dir / "effective.json");
    fs::remove_all(dir / "out");
    REQUIRE(invoke({"sample", (dir / "effective.json").string()}) == exit_code::success);
    CHECK(slurp(dir / "out" / "cloud.csv") == cloud);
    CHECK(json::parse(slurp(dir / "out" / "manifest.json"))["config_hash"] == hash);
}

TEST_CASE("apply_override")
{
    json doc = json::object();
    ecp::cli::apply_override(doc, "compute.epsilon=1e-5");
    ecp::cli::apply_override(doc, "region.kind=box");
    ecp::cli::apply_override(doc, "grid.t=[0.1,0.2]");
    CHECK(doc["compute"]["epsilon"] == 1e-5);
    CHECK(doc["region"]["kind"] == "box");
    CHECK(doc["grid"]["t"].size() == 2);
    CHECK_THROWS_AS(ecp::cli::apply_override(doc, "novalue"), ecp::ValidationError);
}

TEST_CASE("output root from the environment")
{
    const auto dir = scratch("root");
    ::setenv("ECP_OUTPUT_ROOT", dir.string().c_str(), 1);
    const int status = invoke({"psi", "--set", "psi.queries=[{\"j\":1,\"k1\":1,\"k2\":0,\"t\":0.5,\"s\":0.5}]"});
    ::unsetenv("ECP_OUTPUT_ROOT");
    REQUIRE(status == exit_code::success);
    CHECK(fs::exists(dir / "psi" / "psi.csv"));
    CHECK(fs::exists(dir / "psi" / "manifest.json"));
}

TEST_CASE("the installed binary reports exit statuses")
{
    const auto dir = scratch("binary");
    const std::string binary = ECP_BINARY;
    const std::string ok = binary + " limit-mean --out " + (dir / "ok").string() + " > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(ok.c_str())) == 0);
    const std::string bad = binary + " sample --set scaling.n=-1 --out " + (dir / "bad").string() + " > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(bad.c_str())) == 2);
    CHECK_FALSE(fs::exists(dir / "bad"));
}
