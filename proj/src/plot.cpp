#include "vhsim/plot.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "vhsim/config.hpp"
#include "vhsim/errors.hpp"
#include "vhsim/output.hpp"

namespace vhsim {

namespace fs = std::filesystem;

namespace {

// viridis at eight stops
constexpr std::array<std::array<double, 3>, 8> kStops{{{68, 1, 84},
                                                       {70, 50, 127},
                                                       {54, 92, 141},
                                                       {39, 127, 142},
                                                       {31, 161, 135},
                                                       {74, 194, 109},
                                                       {159, 218, 58},
                                                       {253, 231, 37}}};

std::array<png_byte, 3> colormap(double x) {
    x = std::clamp(std::isfinite(x) ? x : 0.0, 0.0, 1.0) * static_cast<double>(kStops.size() - 1);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(x), kStops.size() - 2);
    const double f = x - static_cast<double>(i);
    std::array<png_byte, 3> rgb{};
    for (int c = 0; c < 3; ++c) {
        rgb[c] = static_cast<png_byte>(std::lround(kStops[i][c] * (1 - f) + kStops[i + 1][c] * f));
    }
    return rgb;
}

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};

}  // namespace

void write_heatmap_png(const fs::path& path, const std::vector<double>& values, std::size_t nx, std::size_t ny,
                       double vmax, std::size_t scale) {
    if (values.size() != nx * ny || nx == 0 || ny == 0 || scale == 0) throw IoError("heatmap: bad dimensions");
    std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.string().c_str(), "wb"));
    if (!file) throw IoError("cannot write " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng initialisation failed");
    }
    const std::size_t width = nx * scale;
    const std::size_t height = ny * scale;
    std::vector<png_byte> row(3 * width);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng failed writing " + path.string());
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const double inv = vmax > 0.0 ? 1.0 / vmax : 0.0;
    for (std::size_t py = 0; py < height; ++py) {
        const std::size_t j = ny - 1 - py / scale;  // image top is the largest y
        for (std::size_t i = 0; i < nx; ++i) {
            const auto rgb = colormap(values[j * nx + i] * inv);
            for (std::size_t s = 0; s < scale; ++s) {
                std::copy(rgb.begin(), rgb.end(), row.begin() + static_cast<std::ptrdiff_t>(3 * (i * scale + s)));
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

namespace {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> y;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

/// One panel of the time-series plot, placed at (x0, y0) with size w x h.
void panel(std::ostream& svg, double x0, double y0, double w, double h, const std::vector<double>& t,
           const std::vector<Series>& lines, const std::string& title) {
    const double tmax = std::max(t.back(), 1e-12);
    double ymax = 0.0;
    for (const auto& s : lines) {
        for (double v : s.y) ymax = std::max(ymax, v);
    }
    if (!(ymax > 0.0)) ymax = 1.0;
    ymax *= 1.05;
    auto px = [&](double tv) { return x0 + w * tv / tmax; };
    auto py = [&](double yv) { return y0 + h - h * yv / ymax; };

    svg << "<rect x='" << x0 << "' y='" << y0 << "' width='" << w << "' height='" << h
        << "' fill='none' stroke='#444'/>\n";
    svg << "<text x='" << x0 + w / 2 << "' y='" << y0 - 8 << "' text-anchor='middle'>" << title << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        const double yv = ymax * k / 4.0;
        svg << "<text x='" << x0 - 6 << "' y='" << py(yv) + 4 << "' text-anchor='end' font-size='11'>" << fmt(yv)
            << "</text>\n";
        const double tv = tmax * k / 4.0;
        svg << "<text x='" << px(tv) << "' y='" << y0 + h + 16 << "' text-anchor='middle' font-size='11'>" << fmt(tv)
            << "</text>\n";
    }
    svg << "<text x='" << x0 + w / 2 << "' y='" << y0 + h + 32 << "' text-anchor='middle' font-size='12'>t (months)</text>\n";
    double ly = y0 + 14;
    for (const auto& s : lines) {
        svg << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < t.size(); ++i) svg << px(t[i]) << "," << py(s.y[i]) << " ";
        svg << "'/>\n";
        svg << "<text x='" << x0 + w - 6 << "' y='" << ly << "' text-anchor='end' font-size='11' fill='" << s.color
            << "'>" << s.label << "</text>\n";
        ly += 14;
    }
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

void write_timeseries_svg(const fs::path& path, const DiagnosticsSeries& series) {
    std::vector<double> t;
    for (const auto& r : series) t.push_back(r.t);
    const std::size_t n_sites = series.front().sites.size();
    std::vector<Series> hosts;
    for (std::size_t j = 0; j < n_sites; ++j) {
        Series s{"S" + std::to_string(j + 1), kPalette[j % 6], {}};
        Series i{"I" + std::to_string(j + 1), kPalette[j % 6], {}};
        for (const auto& r : series) {
            s.y.push_back(r.sites[j].S);
            i.y.push_back(r.sites[j].I);
        }
        hosts.push_back(std::move(s));
        hosts.push_back(std::move(i));
    }
    std::vector<Series> infected;
    for (std::size_t j = 0; j < n_sites; ++j) infected.push_back(hosts[2 * j + 1]);
    Series vi{"Vi", "#000000", {}};
    for (const auto& r : series) vi.y.push_back(r.Vi_total);

    std::ofstream svg(path);
    if (!svg) throw IoError("cannot write " + path.string());
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='1260' height='360' font-family='sans-serif'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    std::vector<Series> susceptible;
    for (std::size_t j = 0; j < n_sites; ++j) susceptible.push_back(hosts[2 * j]);
    panel(svg, 70, 40, 330, 260, t, susceptible, "susceptible hosts S_j");
    panel(svg, 480, 40, 330, 260, t, infected, "infected hosts I_j");
    panel(svg, 890, 40, 330, 260, t, {vi}, "infected vectors V_i");
    svg << "</svg>\n";
    if (!svg) throw IoError("write failed: " + path.string());
}

}  // namespace

std::vector<fs::path> emit_plots(const fs::path& run_dir) {
    const auto csv = run_dir / "diagnostics.csv";
    const auto cfg_path = run_dir / "config.yaml";
    if (!fs::exists(csv)) throw IoError("missing artifact: " + csv.string());
    if (!fs::exists(cfg_path)) throw IoError("missing artifact: " + cfg_path.string());
    const DiagnosticsSeries series = read_diagnostics_csv(csv);
    if (series.empty()) throw IoError("empty diagnostics series in " + csv.string());
    const ScenarioConfig cfg = load_config(cfg_path.string());

    const auto out_dir = run_dir / "plots";
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string());
    std::vector<fs::path> written;
    written.push_back(out_dir / "timeseries.svg");
    write_timeseries_svg(written.back(), series);

    const auto snap_dir = run_dir / "snapshots";
    for (double t : cfg.solver.snapshot_times) {
        const auto vi_path = snap_dir / snapshot_filename("Vi", t);
        if (!fs::exists(vi_path)) throw IoError("missing artifact: " + vi_path.string());
        const Snapshot vi = read_snapshot(vi_path);
        const double vmax = *std::max_element(vi.values.begin(), vi.values.end());
        auto out = out_dir / ("heatmap_" + snapshot_filename("Vi", t));
        out.replace_extension(".png");
        write_heatmap_png(out, vi.values, vi.nx, vi.ny, vmax, 2);
        written.push_back(out);

        for (std::size_t j = 0; j < cfg.subregions.size(); ++j) {
            const std::string name = "S" + std::to_string(j + 1);
            const auto path = snap_dir / snapshot_filename(name, t);
            if (!fs::exists(path)) throw IoError("missing artifact: " + path.string());
            const Snapshot s = read_snapshot(path);
            // crop to the subregion's bounding square
            const auto& sub = cfg.subregions[j];
            const double r = sub.radius + 2.0 * s.h;
            auto clamp_index = [&](double x, double x0, std::size_t n) {
                const double v = std::floor((x - x0) / s.h);
                return static_cast<std::size_t>(std::clamp(v, 0.0, static_cast<double>(n - 1)));
            };
            const std::size_t i0 = clamp_index(sub.center.x - r, s.origin.x, s.nx);
            const std::size_t i1 = clamp_index(sub.center.x + r, s.origin.x, s.nx);
            const std::size_t j0 = clamp_index(sub.center.y - r, s.origin.y, s.ny);
            const std::size_t j1 = clamp_index(sub.center.y + r, s.origin.y, s.ny);
            const std::size_t w = i1 - i0 + 1;
            const std::size_t h = j1 - j0 + 1;
            std::vector<double> crop(w * h);
            for (std::size_t jj = 0; jj < h; ++jj) {
                for (std::size_t ii = 0; ii < w; ++ii) crop[jj * w + ii] = s.values[(j0 + jj) * s.nx + i0 + ii];
            }
            // common colour scale: the initial peak of this site
            const Snapshot s0 = read_snapshot(snap_dir / snapshot_filename(name, cfg.solver.snapshot_times.front()));
            const double smax = *std::max_element(s0.values.begin(), s0.values.end());
            auto out_s = out_dir / ("heatmap_" + snapshot_filename(name, t));
            out_s.replace_extension(".png");
            write_heatmap_png(out_s, crop, w, h, smax, 8);
            written.push_back(out_s);
        }
    }
    return written;
}

}  // namespace vhsim
