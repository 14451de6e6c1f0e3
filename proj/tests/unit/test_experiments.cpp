#include <catch_amalgamated.hpp>

#include <polcascade/experiments.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace polcascade;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// data rows of a CSV file, comment and header lines skipped
std::vector<std::vector<std::string>> csv_rows(const fs::path& p, std::vector<std::string>* header = nullptr)
{
    std::istringstream in(slurp(p));
    std::string line;
    std::vector<std::vector<std::string>> rows;
    bool seen_header = false;
    while (std::getline(in, line)) {
        if (line.starts_with("#")) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!seen_header) {
            seen_header = true;
            if (header) *header = cells;
            continue;
        }
        rows.push_back(cells);
    }
    return rows;
}

fs::path scratch(const std::string& name)
{
    auto d = fs::temp_directory_path() / ("polcascade_unit_" + name);
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("fig4 sweep properties", "[experiments]")
{
    const auto grid = default_sweep_grid();
    REQUIRE(grid.size() == 161);
    CHECK(grid.front() == -0.4);
    CHECK(grid.back() == 0.4);
    const QuadratureSpec q;
    const auto s1 = fig4_sweep(Scheme::Scheme1, grid, {}, q, 4);
    const auto s3 = fig4_sweep(Scheme::Scheme3, grid, {}, q, 4);
    for (const auto* c : {&s1, &s3})
        for (std::size_t i = 0; i < c->rows.size(); ++i) {
            CHECK(c->rows[i].abs_gamma <= 0.5 + 1e-9);
            CHECK(c->rows[i].abs_gamma >= 0);
            if (i) CHECK(c->rows[i].detuning > c->rows[i - 1].detuning);
        }
    CHECK(s1.max_row().abs_gamma >= 0.45);
    CHECK(std::abs(s1.max_row().detuning) <= 0.05);
    CHECK(s3.max_row().abs_gamma < s1.max_row().abs_gamma);
    CHECK(s1.rows[80].window.width == 0.2);
    CHECK(s1.rows[80].pairing == Pairing::LpLp);
    CHECK(fig4_sweep(Scheme::Scheme2, std::vector<double>{0.0}, {}, q).rows[0].pairing == Pairing::LpUp);
}

TEST_CASE("sweeps do not depend on the worker count", "[experiments]")
{
    const auto grid = linear_grid(-0.3, 0.3, 37);
    const auto a = fig4_sweep(Scheme::Scheme3, grid, {}, QuadratureSpec{}, 1);
    const auto b = fig4_sweep(Scheme::Scheme3, grid, {}, QuadratureSpec{}, 5);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(a.rows[i].gamma == b.rows[i].gamma);
}

TEST_CASE("figure detunings", "[experiments]")
{
    CHECK(figure_detuning(Scheme::Scheme1) == 0.0);
    CHECK(figure_detuning(Scheme::Scheme2) == Approx(0.0536656314599950).margin(1e-9));
    CHECK(figure_detuning(Scheme::Scheme3) == Approx(0.280570846668003).margin(1e-9));
}

TEST_CASE("optimize_detuning", "[experiments]")
{
    const QuadratureSpec q;
    const auto s1 = optimize_detuning(Scheme::Scheme1, -0.4, 0.4, q, {}, 4);
    CHECK(std::abs(s1.detuning) < 0.02);
    const auto sweep = fig4_sweep(Scheme::Scheme1, default_sweep_grid(), {}, q, 4);
    CHECK(s1.abs_gamma >= sweep.max_row().abs_gamma - 1e-9);
    CHECK(std::abs(s1.detuning - sweep.max_row().detuning) < 0.02);

    // bracket around the LP-LP crossing; further out the tracking windows
    // give a larger but unrelated maximum
    const auto s3 = optimize_detuning(Scheme::Scheme3, 0.18, 0.38, q, {}, 4);
    CHECK(std::abs(s3.detuning - 0.280570846668003) < 0.02);

    WindowPolicy off;
    off.center_offset = 1000.0;
    CHECK_THROWS_AS(optimize_detuning(Scheme::Scheme1, -0.4, 0.4, q, off, 4), FlatObjectiveError);
    CHECK_THROWS_AS(optimize_detuning(Scheme::Scheme1, 0.4, -0.4, q), ValidationError);
}

TEST_CASE("doubling the window at the Scheme1 optimum", "[experiments]")
{
    const auto p = scheme_preset(Scheme::Scheme1);
    const double g1 = std::abs(gamma_prime(p, Pairing::LpLp, standard_window(p, Pairing::LpLp, 0.2), {}).gamma);
    const double g2 = std::abs(gamma_prime(p, Pairing::LpLp, standard_window(p, Pairing::LpLp, 0.4), {}).gamma);
    CHECK(std::abs(g1 - g2) < 0.05);
}

TEST_CASE("figure files", "[experiments]")
{
    FigureOptions o;
    o.out_dir = scratch("figs");
    o.workers = 3;
    o.svg = true;

    SECTION("2a")
    {
        const auto files = reproduce_figure(Figure::Fig2a, o);
        REQUIRE(files.size() == 2);
        std::vector<std::string> header;
        const auto rows = csv_rows(files[0], &header);
        CHECK(header == std::vector<std::string>{"delta_cx_mev", "E_H_LP", "E_H_UP", "E_V_LP", "E_V_UP",
                                                 "xex2_H_LP", "xex2_H_UP", "xex2_V_LP", "xex2_V_UP"});
        REQUIRE(rows.size() == 161);
        double gh = INFINITY, gv = INFINITY;
        for (const auto& r : rows) {
            gh = std::min(gh, std::stod(r[2]) - std::stod(r[1]));
            gv = std::min(gv, std::stod(r[4]) - std::stod(r[3]));
        }
        CHECK(gh == Approx(0.22).margin(1e-9));
        CHECK(gv == Approx(0.22).margin(1e-9));
        CHECK(slurp(files[0]).starts_with("# figure = 2a\n"));
        CHECK(slurp(files[1]).starts_with("<svg"));
    }
    SECTION("3c spectrum has four peaks per polarization")
    {
        const auto files = reproduce_figure(Figure::Fig3c, o);
        std::vector<std::string> header;
        const auto rows = csv_rows(files[0], &header);
        CHECK(header == std::vector<std::string>{"energy_mev", "intensity_H", "intensity_V"});
        Spectrum s;
        for (const auto& r : rows) {
            s.energy_grid.push_back(std::stod(r[0]));
            s.intensity_H.push_back(std::stod(r[1]));
            s.intensity_V.push_back(std::stod(r[2]));
        }
        CHECK(spectrum_peaks(s, Polarization::H).size() == 4);
        CHECK(spectrum_peaks(s, Polarization::V).size() == 4);
        CHECK(slurp(files[0]).find("# delta_cx_mev = 0.2805708") != std::string::npos);
    }
    SECTION("4 has three tagged curves")
    {
        o.sweep_grid = linear_grid(-0.4, 0.4, 21);
        const auto files = reproduce_figure(Figure::Fig4, o);
        REQUIRE(files.size() == 4);
        for (int s = 1; s <= 3; ++s) {
            const auto f = o.out_dir / ("fig4_scheme" + std::to_string(s) + ".csv");
            CHECK(fs::exists(f));
            CHECK(slurp(f).find("# curve = scheme" + std::to_string(s) + "\n") != std::string::npos);
            std::vector<std::string> header;
            const auto rows = csv_rows(f, &header);
            CHECK(header == std::vector<std::string>{"delta_cx_mev", "abs_gamma_prime", "re_gamma", "im_gamma",
                                                     "center1", "center2", "width", "pairing"});
            CHECK(rows.size() == 21);
            CHECK(rows[0][7] == (s == 2 ? "LP-UP" : "LP-LP"));
        }
    }
    SECTION("unwritable output directory")
    {
        o.out_dir = "/proc/polcascade_cannot_write_here";
        try {
            reproduce_figure(Figure::Fig1c, o);
            FAIL("expected an I/O error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("/proc/polcascade_cannot_write_here") != std::string::npos);
        }
    }
    CHECK_THROWS_AS(parse_figure("5b"), ValidationError);
    CHECK(parse_figure("fig2c") == Figure::Fig2c);
}
