#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "gvx/config.hpp"

using namespace gvx;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("config");

TEST_CASE("config round-trips through serialize/parse") {
    RunConfig c;
    c.command = "futaki";
    c.surface = "sphere";
    c.n1 = 128;
    c.n2 = 256;
    c.tau = 8.125;
    c.alpha = 0.037109375;
    c.tol = 3.5e-9;
    c.divisor = "2*[0] + 1*[inf]";
    c.seed = 987654321;
    c.verbose = true;
    c.sweep_param = "alpha";
    c.sweep_values = "0.01,0.02";
    CHECK(parse_config(serialize_config(c)) == c);

    RunConfig d;  // defaults round-trip too
    CHECK(parse_config(serialize_config(d)) == d);
}

TEST_CASE("config parser: comments, whitespace, unknown keys") {
    RunConfig c = parse_config("# comment\n  tau =  7.5  # trailing\n\ncommand = classify\n");
    CHECK(c.tau == 7.5);
    CHECK(c.command == "classify");
    CHECK_THROWS_AS(parse_config("bogus_key = 3\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("tau 7.5\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("tau = abc\n"), InvalidArgument);
}

TEST_CASE("divisor text format round-trips") {
    for (const char* text :
         {"1*[0]", "2*[0] + 1*[inf]", "1*[0.5+0.3i] + 3*[-1-2i]", "1*[2i] + 1*[-i]"}) {
        const Divisor d = parse_divisor(text);
        const Divisor d2 = parse_divisor(serialize_divisor(d));
        REQUIRE(d.points().size() == d2.points().size());
        for (size_t i = 0; i < d.points().size(); ++i) {
            CHECK(d.points()[i].z == d2.points()[i].z);
            CHECK(d.points()[i].at_infinity == d2.points()[i].at_infinity);
            CHECK(d.points()[i].multiplicity == d2.points()[i].multiplicity);
        }
    }
    CHECK(parse_divisor("1*[0.5+0.3i]").points()[0].z == cplx(0.5, 0.3));
    CHECK(parse_divisor("1*[inf]").points()[0].at_infinity);
    CHECK(parse_divisor("1*[-i]").points()[0].z == cplx(0.0, -1.0));
    CHECK_THROWS_AS(parse_divisor(""), InvalidDivisor);
    CHECK_THROWS_AS(parse_divisor("2[0]"), InvalidDivisor);
    CHECK_THROWS_AS(parse_divisor("0*[0]"), InvalidDivisor);
}

TEST_CASE("validation catches module precondition violations") {
    RunConfig c;
    c.n1 = 4;
    CHECK_FALSE(validate_config(c).empty());
    c = RunConfig{};
    c.surface = "sphere";
    c.n2 = 65;
    CHECK_FALSE(validate_config(c).empty());
    c = RunConfig{};
    c.tau = -1.0;
    CHECK_FALSE(validate_config(c).empty());
    c = RunConfig{};
    c.command = "futaki";
    c.futaki_l = 5;
    c.futaki_n = 2;
    CHECK_FALSE(validate_config(c).empty());
    c = RunConfig{};
    c.divisor = "1*[inf]";  // torus surface cannot hold inf
    CHECK_FALSE(validate_config(c).empty());
    CHECK(validate_config(RunConfig{}).empty());
}

TEST_SUITE_END();

// ---------------------------------------------------------------------------
// End-to-end CLI checks (exit-code contract); runs the built binary from the
// build directory.
// ---------------------------------------------------------------------------

namespace {

int run_cli(const std::string& args) {
    const int status = std::system(("./gvx " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

std::string write_cfg(const std::string& name, const std::string& body) {
    const auto dir = fs::temp_directory_path() / "gvx_cli_test";
    fs::create_directories(dir);
    const std::string path = (dir / name).string();
    std::ofstream(path) << body;
    return path;
}

} // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("exit-code contract" * doctest::skip(!fs::exists("./gvx"))) {
    const std::string out = (fs::temp_directory_path() / "gvx_cli_test" / "out").string();

    const std::string classify = write_cfg("classify.cfg",
                                           "command = classify\nsurface = sphere\n"
                                           "divisor = 2*[0]\ntau = 6\nalpha = 1\n");
    CHECK(run_cli("--config " + classify) == 0);

    const std::string bad = write_cfg("bad.cfg", "command = classify\ndivisor = \n");
    CHECK(run_cli("--config " + bad) == 2);

    const std::string fut = write_cfg("futaki.cfg",
                                      "command = futaki\nsurface = sphere\nn1 = 64\n"
                                      "n2 = 128\nfutaki_n = 1\nfutaki_l = 0\n"
                                      "tau = 6\nalpha = 1\n");
    CHECK(run_cli("--config " + fut) == 0);

    const std::string fut_torus = write_cfg("futaki_torus.cfg",
                                            "command = futaki\nsurface = torus\n"
                                            "futaki_n = 1\nfutaki_l = 0\ntau = 6\n");
    CHECK(run_cli("--config " + fut_torus) == 2);

    const std::string vortex = write_cfg("vortex.cfg",
                                         "command = solve\nsurface = torus\nn1 = 32\n"
                                         "n2 = 32\ndivisor = 1*[0.5+0.5i]\ntau = 6\n"
                                         "solver = vortex\ntol = 1e-9\nout = " + out + "\n");
    CHECK(run_cli("--config " + vortex) == 0);
    CHECK(fs::exists(fs::path(out) / "f.dat"));
    CHECK(fs::exists(fs::path(out) / "manifest.txt"));
    CHECK(fs::exists(fs::path(out) / "audit.txt"));

    // inadmissible tau: NonConvergence -> exit 3
    const std::string boundary = write_cfg("boundary.cfg",
                                           "command = solve\nsurface = torus\nn1 = 32\n"
                                           "n2 = 32\ndivisor = 1*[0.5+0.5i]\ntau = 2\n"
                                           "solver = vortex\ntol = 1e-8\nout = " + out +
                                           "_b\n");
    CHECK(run_cli("--config " + boundary) == 3);

    // unstable EB divisor: NonConvergence -> exit 3
    const std::string unstable = write_cfg("unstable.cfg",
                                           "command = solve\nsurface = sphere\nn1 = 24\n"
                                           "n2 = 48\ndivisor = 2*[0]\ntau = 6\n"
                                           "max_iter = 40\ntol = 1e-8\nout = " + out +
                                           "_u\n");
    CHECK(run_cli("--config " + unstable) == 3);
}

TEST_CASE("determinism: identical config and seed give identical artifacts" *
          doctest::skip(!fs::exists("./gvx"))) {
    const std::string out1 = (fs::temp_directory_path() / "gvx_cli_test" / "d1").string();
    const std::string out2 = (fs::temp_directory_path() / "gvx_cli_test" / "d2").string();
    const std::string cfg = write_cfg("det.cfg",
                                      "command = solve\nsurface = torus\nn1 = 32\n"
                                      "n2 = 32\ndivisor = 1*[0.5+0.5i]\ntau = 6\n"
                                      "alpha = 0.02\nseed = 3\ntol = 1e-9\n");
    REQUIRE(run_cli("--config " + cfg + " --out " + out1) == 0);
    REQUIRE(run_cli("--config " + cfg + " --out " + out2) == 0);
    for (const char* name : {"f.dat", "v.dat", "path.log", "audit.txt"}) {
        std::ifstream a(fs::path(out1) / name), b(fs::path(out2) / name);
        std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
        std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
        CHECK(sa == sb);
        CHECK(!sa.empty());
    }
}

TEST_SUITE_END();
