#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cavdet/config.hpp"
#include "cavdet/io.hpp"

using namespace cavdet;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/cavdet_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("parsing sections, comments and values") {
    const std::string text =
        "# full line comment\n"
        "seed = 7\n"
        "\n"
        "[cavity]\n"
        "length = 6.2831853\n"
        "boundary = dirichlet\n"
        "; alternative comment style\n"
        "[detector]\n"
        "gap = 4.5\n"
        "enabled = yes\n";
    const auto cfg = ConfigMap::parse_string(text);
    CHECK(cfg.get_int("seed") == 7);
    CHECK(cfg.get_double("cavity.length") == doctest::Approx(6.2831853));
    CHECK(cfg.get_string("cavity.boundary") == "dirichlet");
    CHECK(cfg.get_double("detector.gap") == 4.5);
    CHECK(cfg.get_bool("detector.enabled"));
    CHECK(cfg.has("cavity.length"));
    CHECK_FALSE(cfg.has("cavity.width"));
    CHECK_NOTHROW(cfg.check_consumed());
}

TEST_CASE("malformed input errors carry the line number") {
    try {
        ConfigMap::parse_string("a = 1\nnot a key value pair\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(ConfigMap::parse_string("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(ConfigMap::parse_string("a =\n"), ConfigError);
    const auto cfg = ConfigMap::parse_string("x = 12abc\ny = true\n");
    CHECK_THROWS_AS(cfg.get_int("x"), ConfigError);
    CHECK_THROWS_AS(cfg.get_double("x"), ConfigError);
    CHECK_THROWS_AS(cfg.get_bool("x"), ConfigError);
    CHECK_THROWS_AS(cfg.get_int("missing"), ConfigError);
}

TEST_CASE("typed getters, fallbacks and lists") {
    const auto cfg = ConfigMap::parse_string(
        "ints = 1, 3:5, 9\n"
        "floats = 0.5, 1.25, -3\n"
        "flag_off = no\n");
    CHECK(cfg.get_int_list("ints") == std::vector<long>{1, 3, 4, 5, 9});
    CHECK(cfg.get_double_list("floats") == std::vector<double>{0.5, 1.25, -3.0});
    CHECK_FALSE(cfg.get_bool("flag_off"));
    CHECK(cfg.get_double("absent", 2.5) == 2.5);
    CHECK(cfg.get_int("absent", 4) == 4);
    CHECK(cfg.get_string("absent", "d") == "d");
    CHECK(cfg.get_bool("absent", true));
}

TEST_CASE("unconsumed keys are reported") {
    const auto cfg = ConfigMap::parse_string("used = 1\n[sec]\nunused = 2\n");
    cfg.get_int("used");
    try {
        cfg.check_consumed();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        CHECK(what.find("sec.unused") != std::string::npos);
        CHECK(what.find("used") != std::string::npos);
    }
    cfg.get_int("sec.unused");
    CHECK_NOTHROW(cfg.check_consumed());
}

TEST_CASE("set refuses duplicates, replace overwrites") {
    ConfigMap cfg;
    cfg.set("a.b", "1");
    CHECK_THROWS_AS(cfg.set("a.b", "2"), ConfigError);
    cfg.replace("a.b", "3");
    CHECK(cfg.get_int("a.b") == 3);
    cfg.replace("a.c", "4");  // insert through replace is fine
    CHECK(cfg.get_int("a.c") == 4);
}

TEST_CASE("serialize round-trips keys and values") {
    const std::string text =
        "seed = 7\n"
        "[cavity]\n"
        "length = 6.2831853\n"
        "boundary = periodic\n"
        "[detector]\n"
        "gap = 4.5\n";
    const auto cfg = ConfigMap::parse_string(text);
    const std::string out = cfg.serialize();
    const auto back = ConfigMap::parse_string(out);
    CHECK(back.keys() == cfg.keys());
    for (const auto& k : cfg.keys()) CHECK(back.get_string(k) == cfg.get_string(k));
    // serialization is deterministic, so hashes are stable
    CHECK(fnv1a_hex(out) == fnv1a_hex(back.serialize()));
}

TEST_CASE("fnv1a matches the published test vectors") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a("foobar") == 0x85944171f73967e8ull);
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
}

TEST_CASE("csv files have the pinned layout, byte for byte") {
    TempFile tmp("table.csv");
    write_csv(tmp.path, {"x", "y"}, {{0.5, 1.0}, {0.25, -3.5}}, "deadbeef00000000");
    const std::string expect =
        "# config_hash=deadbeef00000000\n"
        "x,y\n"
        "0.5,1\n"
        "0.25,-3.5\n";
    CHECK(slurp(tmp.path) == expect);
}

TEST_CASE("csv values keep full double precision") {
    TempFile tmp("precision.csv");
    const double pi = 3.14159265358979323846;
    write_csv(tmp.path, {"v"}, {{pi}}, "0");
    const std::string body = slurp(tmp.path);
    const auto pos = body.rfind('\n', body.size() - 2);
    const double back = std::stod(body.substr(pos + 1));
    CHECK(back == pi);  // bitwise, thanks to 17 significant digits
}

TEST_CASE("csv writer rejects ragged rows") {
    TempFile tmp("ragged.csv");
    CHECK_THROWS_AS(write_csv(tmp.path, {"a", "b"}, {{1.0}}, "0"), std::runtime_error);
}

TEST_CASE("metadata sidecar is valid json with all fields") {
    TempFile tmp("meta.json");
    RunMetadata meta;
    meta.scenario = "demo";
    meta.config_hash = "0123456789abcdef";
    meta.config_text = "a = 1\n";
    meta.numbers["fit_r2"] = 0.995;
    meta.notes["status"] = "ok";
    write_metadata(tmp.path, meta);

    const auto j = nlohmann::json::parse(slurp(tmp.path));
    CHECK(j["scenario"] == "demo");
    CHECK(j["config_hash"] == "0123456789abcdef");
    CHECK(j["config_text"] == "a = 1\n");
    CHECK(j["numbers"]["fit_r2"] == 0.995);
    CHECK(j["notes"]["status"] == "ok");
}

TEST_CASE("writes are deterministic byte for byte") {
    TempFile a("det_a.csv"), b("det_b.csv");
    const std::vector<std::vector<double>> rows{{1.0 / 3.0, 2.0 / 7.0}, {1e-300, 1e300}};
    write_csv(a.path, {"p", "q"}, rows, "42");
    write_csv(b.path, {"p", "q"}, rows, "42");
    CHECK(slurp(a.path) == slurp(b.path));
}
