#pragma once

#include <filesystem>
#include <vector>

namespace vhsim {

/// Renders a run directory written by run_scenario into <run_dir>/plots/:
///   timeseries.svg              S_j, I_j and V_i totals against time
///   heatmap_<field>_t<t>.png    V_i on the full domain and S_j around
///                               site j, for every snapshot time
/// Returns the written paths. Throws IoError when diagnostics.csv or
/// config.yaml is missing, or when the series is empty.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& run_dir);

/// Writes an 8-bit RGB PNG of `values` (row 0 at the bottom) using a
/// perceptual colormap over [0, vmax], each cell drawn as scale x scale
/// pixels.
void write_heatmap_png(const std::filesystem::path& path, const std::vector<double>& values, std::size_t nx,
                       std::size_t ny, double vmax, std::size_t scale);

}  // namespace vhsim
