#pragma once

// CSV, JSON and SVG output. Numbers go through std::to_chars (shortest
// round-trip form, always '.' as decimal point), so files never depend on
// the process locale.

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cascade.hpp"
#include "entanglement.hpp"
#include "errors.hpp"

namespace polcascade {

inline std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";  // folds -0
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

/// Locale-independent strict parse of a whole string as a double.
inline bool parse_number(std::string_view s, double& out)
{
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc{} && r.ptr == s.data() + s.size();
}

/// `# key = value` lines at the top of every output file.
class Provenance
{
public:
    Provenance& add(std::string key, std::string value)
    {
        m_lines.emplace_back(std::move(key), std::move(value));
        return *this;
    }
    Provenance& add(std::string key, double value) { return add(std::move(key), format_number(value)); }

    const std::vector<std::pair<std::string, std::string>>& lines() const { return m_lines; }

    std::string header() const
    {
        std::string s;
        for (const auto& [k, v] : m_lines) s += "# " + k + " = " + v + "\n";
        return s;
    }

private:
    std::vector<std::pair<std::string, std::string>> m_lines;
};

inline void add_params(Provenance& pv, const SystemParams& p, std::string_view prefix = "")
{
    const std::string pre(prefix);
    pv.add(pre + "ex_mean_mev", p.ex_mean)
        .add(pre + "delta_x_mev", p.delta_x)
        .add(pre + "cav_mean_mev", p.cav_mean)
        .add(pre + "delta_c_mev", p.delta_c)
        .add(pre + "rabi_mev", p.rabi)
        .add(pre + "tau_c_ps", p.tau_c)
        .add(pre + "tau_xx_ps", p.tau_xx)
        .add(pre + "binding_mev", p.binding)
        .add(pre + "exciton_width_mev", p.exciton_width)
        .add(pre + "xx_width_mode", std::string(to_string(p.xx_width_mode)));
}

/// Model conventions in force for every computation.
inline void add_conventions(Provenance& pv)
{
    pv.add("hbar_mev_ps", hbar_mev_ps())
        .add("ground_energy_mev", 0.0)
        .add("biexciton_energy", "2*ex_mean - binding")
        .add("polariton_linewidth", "x_ph^2*hbar/tau_c + x_ex^2*exciton_width")
        .add("branch_weight", "x_ex^2*x_ph^2/4, normalized over the four channels")
        .add("hopfield_gauge", "real, non-negative")
        .add("window_width", "full width, closed intervals")
        .add("window_centers", "center2 = mean of the paired polariton energies, center1 = E_XX - center2")
        .add("photon_ordering", "k2 is the polariton photon, no exchange symmetrization");
}

inline void add_quadrature(Provenance& pv, const QuadratureSpec& q)
{
    pv.add("quadrature_base_nodes", std::to_string(q.base_nodes))
        .add("quadrature_rel_tol", q.rel_tol)
        .add("quadrature_max_refinements", std::to_string(q.max_refinements));
}

class CsvTable
{
public:
    explicit CsvTable(std::vector<std::string> columns) : m_columns(std::move(columns)) {}

    void add_row(std::vector<std::string> cells)
    {
        if (cells.size() != m_columns.size()) throw Error("CSV row has the wrong number of cells");
        m_rows.push_back(std::move(cells));
    }

    std::string str(const Provenance& pv = {}) const
    {
        std::string s = pv.header();
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) s += ',';
                s += cells[i];
            }
            s += '\n';
        };
        line(m_columns);
        for (const auto& r : m_rows) line(r);
        return s;
    }

private:
    std::vector<std::string> m_columns;
    std::vector<std::vector<std::string>> m_rows;
};

inline void write_text_file(const std::filesystem::path& path, std::string_view content)
{
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed: " + path.string());
}

inline std::string spectrum_csv(const Spectrum& s, const Provenance& pv = {})
{
    CsvTable t({"energy_mev", "intensity_H", "intensity_V"});
    for (std::size_t i = 0; i < s.energy_grid.size(); ++i)
        t.add_row({format_number(s.energy_grid[i]), format_number(s.intensity_H[i]),
                   format_number(s.intensity_V[i])});
    return t.str(pv);
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::ordered_json to_json(const EntanglementReport& r)
{
    return {{"min_pt_eigenvalue", r.min_pt_eigenvalue},
            {"negativity", r.negativity},
            {"entangled", r.entangled},
            {"chsh_max", r.chsh_max},
            {"gamma_magnitude", r.gamma_magnitude}};
}

inline nlohmann::ordered_json to_json(const ChannelReport& r)
{
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& c : r.rows)
        rows.push_back({{"pol", to_string(c.label.pol)},
                        {"branch", to_string(c.label.branch)},
                        {"intermediate_energy", c.intermediate_energy},
                        {"photon1", c.photon1},
                        {"photon2", c.photon2},
                        {"weight", c.weight},
                        {"x_ex2", c.x_ex2},
                        {"x_ph2", c.x_ph2},
                        {"polariton_width", c.polariton_width},
                        {"xx_channel_width", c.xx_channel_width}});
    return {{"ex_mean", r.ex_mean},
            {"biexciton_energy", r.biexciton_energy},
            {"xx_total_width", r.xx_total_width},
            {"channels", rows}};
}

inline nlohmann::ordered_json to_json(const DetectorWindow& w)
{
    return {{"center1", w.center1}, {"center2", w.center2}, {"width", w.width}};
}

inline nlohmann::ordered_json to_json(const PairCoherence& pc)
{
    return {{"abs_gamma_prime", std::abs(pc.gamma)},
            {"re_gamma", pc.gamma.real()},
            {"im_gamma", pc.gamma.imag()},
            {"pairing", to_string(pc.pairing)},
            {"channel_norms", {pc.channel_norms[0], pc.channel_norms[1]}},
            {"window", to_json(pc.window)}};
}

// ---------------------------------------------------------------------------
// SVG line plots

struct SvgSeries
{
    std::string name;
    std::vector<double> y;
};

/// Minimal multi-series line plot with axis ticks and a legend.
inline std::string svg_line_plot(std::string_view title, std::string_view xlabel,
                                 std::string_view ylabel, const std::vector<double>& x,
                                 const std::vector<SvgSeries>& series)
{
    constexpr double W = 720, H = 460, L = 70, R = 150, T = 40, B = 55;
    static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                              "#ff7f0e", "#8c564b"};
    if (x.empty()) throw Error("svg_line_plot: no data");
    double x0 = x.front(), x1 = x.back();
    double y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series)
        for (double v : s.y)
            if (std::isfinite(v)) {
                y0 = std::min(y0, v);
                y1 = std::max(y1, v);
            }
    if (!(y1 > y0)) {
        y0 -= 1;
        y1 += 1;
    }
    if (!(x1 > x0)) x1 = x0 + 1;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };
    auto f = [](double v) { return format_number(std::round(v * 100) / 100); };

    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + f(W) + "\" height=\"" + f(H) +
                    "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + f(W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + std::string(title) + "</text>\n";
    s += "<rect x=\"" + f(L) + "\" y=\"" + f(T) + "\" width=\"" + f(W - L - R) + "\" height=\"" + f(H - T - B) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
        s += "<text x=\"" + f(px(xv)) + "\" y=\"" + f(H - B + 18) + "\" text-anchor=\"middle\">" +
             format_number(std::round(xv * 1e4) / 1e4) + "</text>\n";
        s += "<text x=\"" + f(L - 6) + "\" y=\"" + f(py(yv) + 4) + "\" text-anchor=\"end\">" +
             format_number(std::round(yv * 1e4) / 1e4) + "</text>\n";
    }
    s += "<text x=\"" + f((L + W - R) / 2) + "\" y=\"" + f(H - 12) + "\" text-anchor=\"middle\">" +
         std::string(xlabel) + "</text>\n";
    s += "<text x=\"16\" y=\"" + f((T + H - B) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         f((T + H - B) / 2) + ")\">" + std::string(ylabel) + "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = kColors[k % std::size(kColors)];
        std::string pts;
        for (std::size_t i = 0; i < x.size() && i < series[k].y.size(); ++i) {
            if (!std::isfinite(series[k].y[i])) continue;
            pts += f(px(x[i])) + "," + f(py(series[k].y[i])) + " ";
        }
        s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        const double ly = T + 16 + 18 * static_cast<double>(k);
        s += "<line x1=\"" + f(W - R + 12) + "\" y1=\"" + f(ly) + "\" x2=\"" + f(W - R + 36) + "\" y2=\"" + f(ly) +
             "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        s += "<text x=\"" + f(W - R + 42) + "\" y=\"" + f(ly + 4) + "\">" + series[k].name + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace polcascade
