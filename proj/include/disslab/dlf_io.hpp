#pragma once

#include <cstdint>
#include <string>

#include "disslab/field.hpp"

namespace disslab {

// DLF1 binary movie format, little-endian:
//   64-byte magic "DLF1" padded with spaces
//   u32 d, u32 n, u32 c, u32 nt, f64 L, f64 dt, f64 viscosity
//   u32 name length, UTF-8 name
//   payload: nt*c*n^d f64 (frame, component, row-major space)
//   u32 CRC-32 of the payload bytes
void write_dlf(const std::string& path, const SpaceTimeField& field);
SpaceTimeField read_dlf(const std::string& path);

std::uint32_t crc32_of(const void* data, std::size_t bytes);

}  // namespace disslab
