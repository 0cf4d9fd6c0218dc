#include "cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using collatzlab::cli::run;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "collatzlab-cli-test";
    fs::create_directories(dir);
    const fs::path p = dir / name;
    fs::remove(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct EnvGuard {
    std::string name;
    EnvGuard(std::string n, const std::string& value) : name(std::move(n)) { setenv(name.c_str(), value.c_str(), 1); }
    ~EnvGuard() { unsetenv(name.c_str()); }
};

} // namespace

TEST_CASE("verify-range small range") {
    const Result r = invoke({"verify-range", "2", "5"});
    CHECK(r.code == 0);
    CHECK(r.out.find("4/4 PASS") != std::string::npos);
    CHECK(r.out.find("k=3  det=1 - x^2") != std::string::npos);
}

TEST_CASE("verify-range with both engines") {
    const Result r = invoke({"verify-range", "2", "300", "--engine", "both", "--failures-only"});
    CHECK(r.code == 0);
    CHECK(r.out.find("299/299 PASS") != std::string::npos);
}

TEST_CASE("usage errors") {
    CHECK(invoke({"verify-range", "5", "2"}).code == 1);
    CHECK(invoke({"verify-range", "1", "4"}).code == 1);
    CHECK(invoke({"verify-range", "2", "5", "--engine", "gauss"}).code == 1);
    CHECK(invoke({"verify-range", "2", "x"}).code == 1);
    CHECK(invoke({}).code == 1);
    CHECK(invoke({"frobnicate"}).code == 1);
    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("bruteforce beyond its limit is reported as a failure") {
    const Result r = invoke({"verify-range", "10", "11", "--engine", "bruteforce"});
    CHECK(r.code == 2);
    CHECK(r.out.find("1/2 PASS, 1 FAIL") != std::string::npos);
}

TEST_CASE("json and csv reports list every k once, in order") {
    const Result j = invoke({"verify-range", "2", "40", "--format", "json", "--jobs", "2"});
    CHECK(j.code == 0);
    const json doc = json::parse(j.out);
    REQUIRE(doc["items"].size() == 39);
    for (std::size_t i = 0; i < 39; ++i) CHECK(doc["items"][i]["k"] == static_cast<int>(i) + 2);
    CHECK(doc["totals"]["pass"] == 39);
    CHECK(doc["command"] == "verify-range 2 40 --format json --jobs 2");

    const Result c = invoke({"--format", "csv", "verify-range", "2", "4"});
    CHECK(c.out == "k,det,engines,engines_agree,eval_checks,eval_agree,cached,status\n"
                   "2,1 - x^2,cycle+elim,true,0,true,false,PASS\n"
                   "3,1 - x^2,cycle+elim,true,0,true,false,PASS\n"
                   "4,1 - x^2,cycle+elim,true,0,true,false,PASS\n");
}

TEST_CASE("reports do not depend on the worker count") {
    const auto a = invoke({"verify-range", "2", "500", "--eval-sample", "0.1", "--jobs", "1"});
    const auto b = invoke({"verify-range", "2", "500", "--eval-sample", "0.1", "--jobs", "3"});
    const auto c = invoke({"verify-range", "2", "500", "--eval-sample", "0.1", "--serial"});
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
}

TEST_CASE("results cache") {
    const fs::path cache = scratch("cache.json");
    const Result first = invoke({"verify-range", "2", "30", "--cache", cache.string()});
    CHECK(first.code == 0);
    CHECK(first.out.find("(cached)") == std::string::npos);
    const json stored = json::parse(slurp(cache));
    CHECK(stored["entries"].contains(std::string("17|cycle|") + collatzlab::cli::version()));

    const Result second = invoke({"verify-range", "2", "35", "--cache", cache.string()});
    CHECK(second.code == 0);
    CHECK(second.out.find("k=30  det=1 - x^2  [cycle+elim]  (cached)  PASS") != std::string::npos);
    CHECK(second.out.find("k=31  det=1 - x^2  [cycle+elim]  PASS") != std::string::npos);

    // Entries from another version are ignored and dropped.
    json old = {{"entries", {{"40|cycle|0.0.1", {{"det", {"1", "0", "-1"}}, {"engines", "cycle"}, {"eval_checks", 0}}}}}};
    std::ofstream(cache) << old.dump();
    const Result third = invoke({"verify-range", "40", "40", "--cache", cache.string()});
    CHECK(third.out.find("(cached)") == std::string::npos);
    CHECK_FALSE(json::parse(slurp(cache))["entries"].contains("40|cycle|0.0.1"));

    // A corrupt cache is advisory only.
    std::ofstream(cache) << "{not json";
    const Result fourth = invoke({"verify-range", "2", "3", "--cache", cache.string()});
    CHECK(fourth.code == 0);
    CHECK(fourth.err.find("warning") != std::string::npos);
}

TEST_CASE("config precedence: flag over environment over file") {
    const fs::path cfg = scratch("config.json");
    std::ofstream(cfg) << R"({"engine": "elim", "format": "csv"})";

    const Result file_only = invoke({"--config", cfg.string(), "verify-range", "2", "3"});
    CHECK(file_only.out.find("2,1 - x^2,elim,") != std::string::npos);

    {
        EnvGuard env("COLLATZLAB_ENGINE", "both");
        const Result with_env = invoke({"--config", cfg.string(), "verify-range", "2", "3"});
        CHECK(with_env.out.find("2,1 - x^2,cycle+elim,") != std::string::npos);

        const Result with_flag = invoke({"--config", cfg.string(), "verify-range", "2", "3", "--engine", "cycle",
                                         "--cross-check-below", "0"});
        CHECK(with_flag.out.find("2,1 - x^2,cycle,") != std::string::npos);
    }
    {
        EnvGuard env("COLLATZLAB_CONFIG", cfg.string());
        const Result via_env = invoke({"verify-range", "2", "3"});
        CHECK(via_env.out.find("2,1 - x^2,elim,") != std::string::npos);
    }

    std::ofstream(cfg) << R"({"certify": {"max-modulus": 486}})";
    const fs::path out = scratch("cert.json");
    const Result sect = invoke({"--config", cfg.string(), "certify", "26", "54", "-o", out.string()});
    CHECK(sect.code == 0);
    CHECK(json::parse(slurp(out))["config"]["max_modulus"] == 486);

    std::ofstream(cfg) << R"({"no-such-option": 1})";
    CHECK(invoke({"--config", cfg.string(), "verify-range", "2", "3"}).code == 1);
    std::ofstream(cfg) << "[1, 2";
    CHECK(invoke({"--config", cfg.string(), "verify-range", "2", "3"}).code == 1);
    CHECK(invoke({"--config", (cfg.string() + ".missing"), "verify-range", "2", "3"}).code == 1);
}

TEST_CASE("mtilde") {
    const Result r = invoke({"mtilde", "8"});
    CHECK(r.code == 0);
    CHECK(r.out == "k=8  ZeroCertified  det=0  nodes=4\n  4 → 5 → 3 → 6 → ✕\n");
    CHECK(invoke({"mtilde", "98"}).out.find("ZeroCertified") != std::string::npos);
    const Result na = invoke({"mtilde", "12"});
    CHECK(na.code == 1);
    CHECK(na.err.find("NotApplicable") != std::string::npos);

    const Result two = invoke({"mtilde", "2"});
    CHECK(two.code == 0);
    CHECK(two.out.find("CycleFound  det=x") != std::string::npos);

    const Result sweep =
        invoke({"mtilde", "--modulus", "54", "--residues", "8,26,44", "--k-max", "600", "--no-trace", "--format", "json"});
    CHECK(sweep.code == 0);
    const json doc = json::parse(sweep.out);
    CHECK(doc["items"].size() == 33);
    CHECK(doc["totals"]["ZeroCertified"] == 33);
    CHECK(doc["totals"]["inconsistent"] == 0);
}

TEST_CASE("certify") {
    const fs::path out = scratch("c8.json");
    const Result r = invoke({"certify", "8", "54", "-o", out.string(), "--sample", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("all l certified") != std::string::npos);
    CHECK(r.out.find("sampled 2 members, 0 counterexamples") != std::string::npos);
    CHECK(json::parse(slurp(out))["family"]["a"] == 8);

    const Result bad = invoke({"certify", "10", "54", "-o", "-"});
    CHECK(bad.code == 1);

    const Result partial = invoke({"certify", "44", "54", "--max-modulus", "1458", "-o", "-", "--format", "csv"});
    CHECK(partial.code == 0);
    CHECK(partial.out.find("\"l=2+3l1, 3|(l1-1)\",") != std::string::npos);
    CHECK(partial.out.find("undecided") != std::string::npos);
}

TEST_CASE("orbit-trace and dump-matrix") {
    const Result t = invoke({"orbit-trace", "8"});
    CHECK(t.code == 0);
    CHECK(t.out == "k=8\ncycles: (1 2)\nmtilde: ZeroCertified (nodes=4)\n  4 → 5 [tri] → 3 [tri] → 6 [double] → ✕\n");
    CHECK(invoke({"orbit-trace", "9"}).out.find("mtilde: not applicable") != std::string::npos);

    const Result d = invoke({"dump-matrix", "8", "--kind", "tilde", "--dense"});
    CHECK(d.out == slurp(std::string(COLLATZLAB_GOLDEN_DIR) + "/M7tilde.txt"));
    CHECK(invoke({"dump-matrix", "8", "--dense"}).out == slurp(std::string(COLLATZLAB_GOLDEN_DIR) + "/M8.txt"));
    CHECK(invoke({"dump-matrix", "8", "--kind", "prime", "--dense"}).out ==
          slurp(std::string(COLLATZLAB_GOLDEN_DIR) + "/M7prime.txt"));
    CHECK(invoke({"dump-matrix", "12", "--kind", "tilde"}).code == 1);
    const json j = json::parse(invoke({"dump-matrix", "3", "--format", "json"}).out);
    CHECK(j["rows"][0] == json{{"row", 1}, {"one", 1}, {"x", 2}});
    CHECK(j["rows"][2]["x"].is_null());
}
