#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hornlab/horn.hpp"

namespace hornlab {

struct Viewport {
  cplx center = 0.0;
  double width = 1.0;
  double height = 1.0;
  int pixels_x = 1;
  int pixels_y = 1;

  // Extent aspect must match pixel aspect within one part in 1e3.
  void validate() const;
  // Row 0 is the top row. Centers are placed symmetrically about the center so
  // that mirrored pixels get exactly mirrored coordinates.
  cplx pixel_center(int column, int row) const;
};

struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // RGB, row-major, top row first
  std::string map_id;
  std::string config_hash;
  std::string palette;
};

struct Rgb {
  std::uint8_t r, g, b;
  bool operator==(const Rgb&) const = default;
};

inline constexpr Rgb kUnknownColor{255, 0, 255};
inline constexpr Rgb kCheckerEven{236, 214, 160};
inline constexpr Rgb kCheckerOdd{52, 92, 140};

Rgb pixel(const RasterImage& image, int column, int row);

struct RenderOptions {
  int threads = 0;
  std::string map_id;
  std::string config_hash;
  // Evaluate at f(z) instead of z (checkerboard translation check).
  bool pre_apply_map = false;
};

// Per-pixel outcome of the attracting Fatou coordinate (row-major).
std::vector<FatouOutcome> basin_samples(const ParabolicGerm& germ, const Viewport& viewport,
                                        const RenderOptions& options = {});

// Converged pixels: parity of floor(Re Phi) + floor(Im Phi). Escaped pixels:
// grey ramp in log step count. Unknown: magenta.
RasterImage render_basin(const ParabolicGerm& germ, const Viewport& viewport, const RenderOptions& options = {});

// Degenerate germs have no normalized coordinate; converged pixels are
// two-colored by the parity of the trap entry index instead.
RasterImage render_basin_exploratory(const MapSpec& map, const Viewport& viewport, const FatouConfig& cfg,
                                     const RenderOptions& options = {});

// Converged cells get a hue from Re h mod 1, escaped cells dark grey,
// unknown magenta.
RasterImage render_horn_domain(const HornDomainGrid& grid, const RenderOptions& options = {});

std::string encode_ppm(const RasterImage& image);

// Columns plus numeric rows; the CSV gets a trailing config_hash column.
struct SampleTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string encode_csv(const SampleTable& table, const std::string& config_hash);

// FNV-1a 64 of the compact dump, hex encoded. nlohmann::json keeps object
// keys sorted, so equal documents hash equally.
std::string config_hash(const nlohmann::json& canonical);

void write_file(const std::filesystem::path& path, const std::string& bytes);
void export_ppm(const RasterImage& image, const std::filesystem::path& path);
void export_json(const nlohmann::json& doc, const std::string& config_hash, const std::filesystem::path& path);
void export_csv(const SampleTable& table, const std::string& config_hash, const std::filesystem::path& path);

}  // namespace hornlab
