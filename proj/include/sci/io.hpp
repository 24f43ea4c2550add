#pragma once

#include <filesystem>
#include <string>

#include "sci/cube.hpp"
#include "sci/gmm.hpp"

namespace sci {

// SCIT tensor file: magic "SCIT", version 0x01, dtype byte (0x01 = f32,
// 0x02 = f64), ndim byte, ndim u32 LE dims ordered (nx, ny, nt), payload
// little-endian IEEE-754, frame-major, column-major within frame.
enum class ScitDtype : uint8_t { F32 = 0x01, F64 = 0x02 };

void write_scit(const std::filesystem::path& path, const DataCube& cube,
                ScitDtype dtype = ScitDtype::F64);
DataCube read_scit(const std::filesystem::path& path);

void write_scit_measurement(const std::filesystem::path& path, const Measurement& m,
                            ScitDtype dtype = ScitDtype::F64);
// Reads a 2D SCIT file; mode metadata comes from the sidecar, not the tensor.
Measurement read_scit_measurement(const std::filesystem::path& path);

// 8-bit grayscale PNG, value = round(255 * clamp(v, 0, 1)).
void write_png_frame(const std::filesystem::path& path, const DataCube& cube, int frame);
DataCube read_png_frame(const std::filesystem::path& path);

// GMM container: "SCIT" magic, version 0x01, kind byte 0x10, u32 K, u32 dim,
// then per component weight, mean, row-major covariance as f64 LE.
void write_gmm(const std::filesystem::path& path, const GmmModel& model);
GmmModel read_gmm(const std::filesystem::path& path);

// Write-then-rename so partially written outputs are never observed.
void atomic_write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace sci
