#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "vipr/image.hpp"

namespace vipr {

/// Decodes an 8- or 16-bit gray/RGB PNG (alpha ignored). RGB is reduced to
/// Rec. 601 luma. Malformed input raises kParse with libpng's message (which
/// names the failing chunk); other bit depths and palettes raise
/// kUnsupportedFormat.
GrayImage decode_png(std::span<const std::uint8_t> bytes);

/// 8-bit grayscale PNG; each value stored as round(p * 255).
std::vector<std::uint8_t> encode_png(const GrayImage& img);

/// 8-bit quantization used by the PNG boundary.
std::uint8_t quantize8(double p) noexcept;

GrayImage read_png_file(const std::filesystem::path& path);
void write_png_file(const std::filesystem::path& path, const GrayImage& img);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace vipr
