#include "vipr/png_codec.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "vipr/error.hpp"

namespace vipr {
namespace {

// libpng reports errors through longjmp, so each phase that may fail runs in
// a function whose locals are trivially destructible; C++ objects are only
// touched outside those frames.
struct ReadContext {
  const std::uint8_t* data = nullptr;
  std::size_t size = 0;
  std::size_t pos = 0;
  char message[256] = {};
};

void on_error(png_structp png, png_const_charp msg) {
  auto* ctx = static_cast<ReadContext*>(png_get_error_ptr(png));
  std::snprintf(ctx->message, sizeof(ctx->message), "%s", msg ? msg : "unknown libpng error");
  png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

void on_read(png_structp png, png_bytep out, png_size_t length) {
  auto* ctx = static_cast<ReadContext*>(png_get_io_ptr(png));
  if (ctx->size - ctx->pos < length) png_error(png, "truncated data: unexpected end of stream");
  std::memcpy(out, ctx->data + ctx->pos, length);
  ctx->pos += length;
}

struct Header {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
  int channels = 0;    // after alpha stripping
  std::size_t rowbytes = 0;
};

// Returns false on libpng error (message in ctx).
bool read_header(png_structp png, png_infop info, Header* hdr) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_info(png, info);
  hdr->width = png_get_image_width(png, info);
  hdr->height = png_get_image_height(png, info);
  hdr->bit_depth = png_get_bit_depth(png, info);
  hdr->color_type = png_get_color_type(png, info);
  if (hdr->color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  hdr->channels = png_get_channels(png, info);
  hdr->rowbytes = png_get_rowbytes(png, info);
  return true;
}

bool read_rows(png_structp png, png_infop info, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_image(png, rows);
  png_read_end(png, info);
  return true;
}

[[noreturn]] void raise_decode(const ReadContext& ctx) {
  fail(ErrorKind::kParse, std::string("png decode failed: ") + ctx.message);
}

struct WriteContext {
  std::vector<std::uint8_t>* out = nullptr;
  char message[256] = {};
};

void on_write_error(png_structp png, png_const_charp msg) {
  auto* ctx = static_cast<WriteContext*>(png_get_error_ptr(png));
  std::snprintf(ctx->message, sizeof(ctx->message), "%s", msg ? msg : "unknown libpng error");
  png_longjmp(png, 1);
}

void on_write(png_structp png, png_bytep data, png_size_t length) {
  auto* ctx = static_cast<WriteContext*>(png_get_io_ptr(png));
  ctx->out->insert(ctx->out->end(), data, data + length);
}

void on_flush(png_structp) {}

bool write_all(png_structp png, png_infop info, png_uint_32 w, png_uint_32 h, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_IHDR(png, info, w, h, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, info);
  return true;
}

}  // namespace

std::uint8_t quantize8(double p) noexcept {
  const double v = std::floor(p * 255.0 + 0.5);
  return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

GrayImage decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    fail(ErrorKind::kParse, "png decode failed: missing PNG signature");
  }
  ReadContext ctx;
  ctx.data = bytes.data();
  ctx.size = bytes.size();
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &ctx, on_error, on_warning);
  if (png == nullptr) fail(ErrorKind::kIo, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_read_struct(png, info, nullptr); }
  } guard{&png, &info};
  png_set_read_fn(png, &ctx, on_read);
  png_set_crc_action(png, PNG_CRC_ERROR_QUIT, PNG_CRC_ERROR_QUIT);

  Header hdr;
  if (!read_header(png, info, &hdr)) raise_decode(ctx);
  if (hdr.color_type == PNG_COLOR_TYPE_PALETTE) {
    fail(ErrorKind::kUnsupportedFormat, "png: palette images are not supported");
  }
  if (hdr.bit_depth != 8 && hdr.bit_depth != 16) {
    fail(ErrorKind::kUnsupportedFormat, "png: unsupported bit depth " + std::to_string(hdr.bit_depth));
  }
  if (hdr.channels != 1 && hdr.channels != 3) {
    fail(ErrorKind::kUnsupportedFormat, "png: unsupported channel count " + std::to_string(hdr.channels));
  }

  std::vector<std::uint8_t> raw(hdr.rowbytes * hdr.height);
  std::vector<png_bytep> rows(hdr.height);
  for (png_uint_32 y = 0; y < hdr.height; ++y) rows[y] = raw.data() + y * hdr.rowbytes;
  if (!read_rows(png, info, rows.data())) raise_decode(ctx);

  const int w = static_cast<int>(hdr.width);
  const int h = static_cast<int>(hdr.height);
  const bool wide = hdr.bit_depth == 16;
  const double max_value = wide ? 65535.0 : 255.0;
  const std::size_t bytes_per_sample = wide ? 2 : 1;
  auto sample = [&](const std::uint8_t* p) -> double {
    // PNG stores 16-bit samples big-endian.
    return wide ? static_cast<double>((p[0] << 8) | p[1]) : static_cast<double>(p[0]);
  };
  std::vector<double> pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* r = rows[static_cast<std::size_t>(y)];
    for (int x = 0; x < w; ++x) {
      double v;
      if (hdr.channels == 1) {
        v = sample(r + x * bytes_per_sample) / max_value;
      } else {
        const std::uint8_t* p = r + 3 * x * bytes_per_sample;
        v = (0.299 * sample(p) + 0.587 * sample(p + bytes_per_sample) + 0.114 * sample(p + 2 * bytes_per_sample)) /
            max_value;
      }
      pixels[static_cast<std::size_t>(y) * w + x] = std::clamp(v, 0.0, 1.0);
    }
  }
  return GrayImage(w, h, std::move(pixels));
}

std::vector<std::uint8_t> encode_png(const GrayImage& img) {
  std::vector<std::uint8_t> out;
  WriteContext ctx;
  ctx.out = &out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &ctx, on_write_error, on_warning);
  if (png == nullptr) fail(ErrorKind::kIo, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_write_struct(png, info); }
  } guard{&png, &info};
  png_set_write_fn(png, &ctx, on_write, on_flush);

  const int w = img.width();
  const int h = img.height();
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  std::transform(img.pixels().begin(), img.pixels().end(), raw.begin(), quantize8);
  std::vector<png_bytep> rows(static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y) rows[static_cast<std::size_t>(y)] = raw.data() + static_cast<std::size_t>(y) * w;
  if (!write_all(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), rows.data())) {
    fail(ErrorKind::kIo, std::string("png encode failed: ") + ctx.message);
  }
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::kIo, "short write to " + path.string());
}

GrayImage read_png_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_png(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.message());
  }
}

void write_png_file(const std::filesystem::path& path, const GrayImage& img) {
  write_file_bytes(path, encode_png(img));
}

}  // namespace vipr
