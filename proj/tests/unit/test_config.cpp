#include <catch_amalgamated.hpp>

#include <polcascade/config.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace polcascade;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

struct Run
{
    int code = -1;
    std::string out;
};

// runs the CLI binary with stdout captured; stderr discarded
Run run_cli(const std::string& args, const std::string& env = "")
{
    const std::string cmd = env + (env.empty() ? "" : " ") + "\"" + POLCASCADE_CLI + "\" " + args + " 2>/dev/null";
    Run r;
    FILE* f = popen(cmd.c_str(), "r");
    REQUIRE(f);
    std::array<char, 4096> buf{};
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), f)) r.out.append(buf.data(), n);
    const int status = pclose(f);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name)
{
    auto d = fs::temp_directory_path() / ("polcascade_cfg_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("defaults", "[config]")
{
    RunConfig c;
    CHECK(c.scheme == Scheme::Scheme1);
    CHECK(c.window.width == 0.2);
    CHECK(c.seed == 1);
    CHECK(c.samples == 100000);
    CHECK(c.workers >= 1);
    CHECK_NOTHROW(validate(c));
    CHECK(effective_pairing(c) == Pairing::LpLp);
    const auto p = effective_params(c);
    CHECK(p.cav_mean == p.ex_mean);  // Scheme1 is degenerate at resonance

    c.scheme = Scheme::Scheme2;
    CHECK(effective_pairing(c) == Pairing::LpUp);
    CHECK(effective_params(c).detuning() == Approx(0.0536656314599950).margin(1e-9));
    c.detuning = -0.1;
    CHECK(effective_params(c).detuning() == Approx(-0.1).margin(1e-12));
}

TEST_CASE("config text", "[config]")
{
    RunConfig c;
    apply_config_text(c,
                      "# comment line\n"
                      "scheme = 3\n"
                      "\n"
                      "tau_c = 12.5   # trailing comment\n"
                      "width = 0.3\n"
                      "pairing = UP-UP\n"
                      "seed = 77\n",
                      "run.cfg");
    CHECK(c.scheme == Scheme::Scheme3);
    CHECK(c.params.tau_c == 12.5);
    CHECK(c.window.width == 0.3);
    CHECK(c.pairing == Pairing::UpUp);
    CHECK(c.seed == 77);

    try {
        apply_config_text(c, "scheme = 1\nbogus_key = 4\n", "run.cfg");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string m = e.what();
        CHECK(m.find("bogus_key") != std::string::npos);
        CHECK(m.find("run.cfg:2") != std::string::npos);
    }
    CHECK_THROWS_AS(apply_config_text(c, "tau_c = abc\n", "x"), ValidationError);
    CHECK_THROWS_AS(apply_config_text(c, "tau_c\n", "x"), ValidationError);
    CHECK_THROWS_AS(apply_config_text(c, "scheme = 4\n", "x"), ValidationError);
}

TEST_CASE("echo round trip", "[config]")
{
    RunConfig c;
    apply_config_text(c, "scheme = 2\ndelta_x = 0.15\nangle_a = 22.5\nworkers = 3\nsvg = true\nrel_tol = 1e-8\n",
                      "a");
    const std::string echo = config_echo(c);
    CHECK(echo.find("# detuning = (default)") != std::string::npos);
    RunConfig d;
    apply_config_text(d, echo, "echo");
    CHECK(config_echo(d) == echo);
    CHECK(d.params.delta_x == 0.15);
    CHECK(d.angle_a == 22.5);
    CHECK(d.svg);
    CHECK(d.quadrature.rel_tol == 1e-8);
}

TEST_CASE("worker environment variable", "[config]")
{
    RunConfig c;
    ::setenv("POLCASCADE_WORKERS", "6", 1);
    apply_worker_env(c);
    CHECK(c.workers == 6);
    ::setenv("POLCASCADE_WORKERS", "zero", 1);
    CHECK_THROWS_AS(apply_worker_env(c), ValidationError);
    ::unsetenv("POLCASCADE_WORKERS");
}

TEST_CASE("command line", "[config]")
{
    SECTION("entangle Scheme1")
    {
        const auto r = run_cli("entangle --scheme 1");
        CHECK(r.code == 0);
        CHECK(r.out.find("\"entangled\":true") != std::string::npos);
        CHECK(r.out.find("\"min_pt_eigenvalue\":") != std::string::npos);
    }
    SECTION("gamma")
    {
        const auto r = run_cli("gamma --scheme 3");
        CHECK(r.code == 0);
        CHECK(r.out.find("\"abs_gamma_prime\":0.155") != std::string::npos);
        CHECK(r.out.find("\"pairing\":\"LP-LP\"") != std::string::npos);
        CHECK(run_cli("gamma --scheme 1 --center-offset 1000").code == 1);
    }
    SECTION("non-convergence exits with 2")
    {
        CHECK(run_cli("gamma --base-nodes 8 --max-refinements 1 --rel-tol 1e-15").code == 2);
    }
    SECTION("invalid lifetime exits with 1")
    {
        CHECK(run_cli("gamma --tau-c -5").code == 1);
        CHECK(run_cli("gamma --no-such-flag 1").code == 1);
        CHECK(run_cli("").code == 1);
    }
    SECTION("config file and flags")
    {
        const auto d = scratch("file");
        {
            std::ofstream f(d / "run.cfg");
            f << "scheme = 3\nwidth = 0.1\n";
        }
        const auto r = run_cli("config --config \"" + (d / "run.cfg").string() + "\" --width 0.25");
        CHECK(r.code == 0);
        CHECK(r.out.find("scheme = 3\n") != std::string::npos);
        CHECK(r.out.find("width = 0.25\n") != std::string::npos);
        const auto bad = scratch("bad");
        {
            std::ofstream f(bad / "run.cfg");
            f << "colour = red\n";
        }
        CHECK(run_cli("config --config \"" + (bad / "run.cfg").string() + "\"").code == 1);
    }
    SECTION("sample output is deterministic")
    {
        const auto d1 = scratch("s1"), d2 = scratch("s2");
        const std::string args = "sample --scheme 1 --n 20000 --seed 5 --angle-a 22.5 --angle-b -10 --out-dir ";
        REQUIRE(run_cli(args + "\"" + d1.string() + "\"").code == 0);
        REQUIRE(run_cli(args + "\"" + d2.string() + "\"", "POLCASCADE_WORKERS=3").code == 0);
        const auto a = slurp(d1 / "counts.csv");
        CHECK_FALSE(a.empty());
        CHECK(a == slurp(d2 / "counts.csv"));
        CHECK(a.find("outcome,count,born_probability") != std::string::npos);
    }
}
