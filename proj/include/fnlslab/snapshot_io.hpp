#pragma once

#include <filesystem>

#include "fnlslab/field.hpp"

namespace fnls {

// Binary snapshot format, version 1, little-endian throughout:
//   bytes 0..3   magic "FNLS"
//   u32          format version (1)
//   u32          K (number of modes)
//   f64          L (period)
//   f64          t (sample time)
//   K pairs f64  coefficients (re, im) in FFT storage order
// Writes are bit-exact functions of the field; no timestamps or host state.
void write_snapshot(const std::filesystem::path& path, const SpectralField& field);
SpectralField read_snapshot(const std::filesystem::path& path);

} // namespace fnls
