#ifndef SKYRM_IO_HPP
#define SKYRM_IO_HPP

#include "skyrm/grid.hpp"
#include "skyrm/lg.hpp"
#include "skyrm/polarimetry.hpp"
#include "skyrm/topology.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace skyrm::io {

/// On-disk image encoding for measurement sets.
enum class ImageFormat { Csv, Pgm16 };

void write_image_csv(const std::filesystem::path& path, const Image& img);
Image read_image_csv(const std::filesystem::path& path);

/// Complex field as CSV with (re, im) column pairs, plus a JSON sidecar
/// carrying the grid and optional mode parameters.
void write_scalar_field(const std::filesystem::path& csv_path,
                        const ScalarField& field,
                        const std::optional<LGModeSpec>& mode = std::nullopt);
ScalarField read_scalar_field(const std::filesystem::path& csv_path);

/// Binary PGM (P5). maxval must be 2^bit_depth - 1 with bit_depth 8 or 16;
/// pixel values must already be integers in range.
void write_image_pgm(const std::filesystem::path& path, const Image& img,
                     int bit_depth);
Image read_image_pgm(const std::filesystem::path& path, int& bit_depth_out);

/// Measurement-set directory: Ix1.* ... Iz2.* plus meta.json.
void save_measurement_set(const std::filesystem::path& dir,
                          const MeasurementSet& ms,
                          ImageFormat format = ImageFormat::Csv);
MeasurementSet load_measurement_set(const std::filesystem::path& dir);

void write_analysis_result(const std::filesystem::path& path,
                           const AnalysisResult& result);

void write_density_csv(const std::filesystem::path& path,
                       const SkyrmionDensityField& sd);

} // namespace skyrm::io

#endif
