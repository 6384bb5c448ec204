#include "hornlab/render.hpp"

#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hornlab/parallel.hpp"

namespace hornlab {

void Viewport::validate() const {
  if (pixels_x < 1 || pixels_y < 1) throw InvalidArgument("viewport needs at least one pixel in each direction");
  if (!(width > 0.0) || !(height > 0.0)) throw InvalidArgument("viewport extent must be positive");
  const double extent = width / height;
  const double pixels = double(pixels_x) / pixels_y;
  if (std::abs(extent - pixels) > 1e-3 * pixels) {
    throw InvalidArgument("viewport aspect ratio does not match its pixel grid");
  }
}

cplx Viewport::pixel_center(int column, int row) const {
  const double x = center.real() + width * double(2 * column + 1 - pixels_x) / (2.0 * pixels_x);
  const double y = center.imag() - height * double(2 * row + 1 - pixels_y) / (2.0 * pixels_y);
  return {x, y};
}

Rgb pixel(const RasterImage& image, int column, int row) {
  const std::size_t i = 3 * (std::size_t(row) * image.width + column);
  return {image.pixels[i], image.pixels[i + 1], image.pixels[i + 2]};
}

namespace {

void put(RasterImage& image, int column, int row, Rgb c) {
  const std::size_t i = 3 * (std::size_t(row) * image.width + column);
  image.pixels[i] = c.r;
  image.pixels[i + 1] = c.g;
  image.pixels[i + 2] = c.b;
}

RasterImage blank(int width, int height, const RenderOptions& options, std::string palette) {
  RasterImage image;
  image.width = width;
  image.height = height;
  image.pixels.assign(3 * std::size_t(width) * height, 0);
  image.map_id = options.map_id;
  image.config_hash = options.config_hash;
  image.palette = std::move(palette);
  return image;
}

Rgb escape_shade(long steps, long max_iterations) {
  const double t = std::log1p(double(steps)) / std::log1p(double(std::max(1L, max_iterations)));
  const auto v = std::uint8_t(std::lround(24.0 + 200.0 * std::clamp(t, 0.0, 1.0)));
  return {v, v, std::uint8_t(std::min(255, v + 20))};
}

Rgb checker(cplx phi) {
  const double parity = std::floor(phi.real()) + std::floor(phi.imag());
  return std::fmod(parity, 2.0) == 0.0 ? kCheckerEven : kCheckerOdd;
}

// HSV with full saturation and value 0.9.
Rgb hue(double h) {
  h = (h - std::floor(h)) * 6.0;
  const int sector = std::min(5, int(h));
  const double f = h - sector;
  const double v = 0.9 * 255.0;
  const auto V = std::uint8_t(std::lround(v));
  const auto P = std::uint8_t(0);
  const auto Q = std::uint8_t(std::lround(v * (1.0 - f)));
  const auto T = std::uint8_t(std::lround(v * f));
  switch (sector) {
    case 0:
      return {V, T, P};
    case 1:
      return {Q, V, P};
    case 2:
      return {P, V, T};
    case 3:
      return {P, Q, V};
    case 4:
      return {T, P, V};
    default:
      return {V, P, Q};
  }
}

}  // namespace

std::vector<FatouOutcome> basin_samples(const ParabolicGerm& germ, const Viewport& viewport,
                                        const RenderOptions& options) {
  viewport.validate();
  std::vector<FatouOutcome> out(std::size_t(viewport.pixels_x) * viewport.pixels_y);
  const double radius = germ.map().evaluation_radius();
  for_each_row(viewport.pixels_y, options.threads, [&](int row) {
    for (int column = 0; column < viewport.pixels_x; ++column) {
      cplx z = viewport.pixel_center(column, row);
      FatouOutcome& slot = out[std::size_t(row) * viewport.pixels_x + column];
      if (options.pre_apply_map) {
        if (!(std::abs(z) <= radius)) {
          slot = {{BasinStatus::escaped, 0, 0, false}, std::nullopt};
          continue;
        }
        z = evaluate_jet(germ.map(), z).value;
      }
      slot = germ.attracting_outcome(z);
    }
  });
  return out;
}

RasterImage render_basin(const ParabolicGerm& germ, const Viewport& viewport, const RenderOptions& options) {
  const auto samples = basin_samples(germ, viewport, options);
  RasterImage image = blank(viewport.pixels_x, viewport.pixels_y, options, "fatou-checker");
  for (int row = 0; row < image.height; ++row) {
    for (int column = 0; column < image.width; ++column) {
      const FatouOutcome& s = samples[std::size_t(row) * image.width + column];
      Rgb c = kUnknownColor;
      if (s.verdict.status == BasinStatus::converged) c = s.value ? checker(*s.value) : kCheckerEven;
      else if (s.verdict.status == BasinStatus::escaped) c = escape_shade(s.verdict.index, germ.config().max_iterations);
      put(image, column, row, c);
    }
  }
  return image;
}

RasterImage render_basin_exploratory(const MapSpec& map, const Viewport& viewport, const FatouConfig& cfg,
                                     const RenderOptions& options) {
  viewport.validate();
  const GermData germ = germ_data(map);
  RasterImage image = blank(viewport.pixels_x, viewport.pixels_y, options, "trap-index");
  for_each_row(viewport.pixels_y, options.threads, [&](int row) {
    for (int column = 0; column < viewport.pixels_x; ++column) {
      const cplx z = viewport.pixel_center(column, row);
      const BasinVerdict v =
          z == 0.0 ? BasinVerdict{BasinStatus::converged, 0, 0, true}
                   : orbit_to_trap(map, germ.leading, germ.degeneracy_p, z, cfg).verdict;
      Rgb c = kUnknownColor;
      if (v.status == BasinStatus::converged) c = v.index % 2 == 0 ? kCheckerEven : kCheckerOdd;
      else if (v.status == BasinStatus::escaped) c = escape_shade(v.index, cfg.max_iterations);
      put(image, column, row, c);
    }
  });
  return image;
}

RasterImage render_horn_domain(const HornDomainGrid& grid, const RenderOptions& options) {
  RasterImage image = blank(grid.columns, grid.rows, options, "horn-hue");
  for (int row = 0; row < grid.rows; ++row) {
    for (int column = 0; column < grid.columns; ++column) {
      const std::size_t i = std::size_t(row) * grid.columns + column;
      Rgb c = kUnknownColor;
      if (grid.verdicts[i].status == BasinStatus::converged) c = grid.values[i] ? hue(grid.values[i]->real()) : kCheckerEven;
      else if (grid.verdicts[i].status == BasinStatus::escaped) c = {40, 40, 40};
      put(image, column, row, c);
    }
  }
  return image;
}

std::string encode_ppm(const RasterImage& image) {
  if (image.pixels.size() != 3 * std::size_t(image.width) * image.height) {
    throw InvalidArgument("pixel payload does not match the image dimensions");
  }
  std::string out = "P6\n# config " + (image.config_hash.empty() ? std::string("none") : image.config_hash) + "\n" +
                    std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
  return out;
}

std::string encode_csv(const SampleTable& table, const std::string& hash) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (const auto& name : table.columns) out << name << ',';
  out << "config_hash\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw InvalidArgument("CSV row width does not match the header");
    for (double v : row) out << v << ',';
    out << hash << '\n';
  }
  return out.str();
}

std::string config_hash(const nlohmann::json& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing: " + std::strerror(errno));
  out.write(bytes.data(), std::streamsize(bytes.size()));
  out.close();
  if (!out) throw IoError("write to " + path.string() + " failed: " + std::strerror(errno));
}

void export_ppm(const RasterImage& image, const std::filesystem::path& path) { write_file(path, encode_ppm(image)); }

void export_json(const nlohmann::json& doc, const std::string& hash, const std::filesystem::path& path) {
  if (!doc.is_object()) throw InvalidArgument("exported JSON documents must be objects");
  nlohmann::json out = doc;
  out["config_hash"] = hash;
  write_file(path, out.dump(2) + "\n");
}

void export_csv(const SampleTable& table, const std::string& hash, const std::filesystem::path& path) {
  write_file(path, encode_csv(table, hash));
}

}  // namespace hornlab
