#include <sstream>

#include "vipr/error.hpp"
#include "vipr/pipeline.hpp"
#include "vipr/png_codec.hpp"

namespace vipr {
namespace {

constexpr std::size_t kMaxHeaderLine = 4096;

[[noreturn]] void y4m_fail(std::uint64_t offset, const std::string& what) {
  fail(ErrorKind::kParse, "y4m at byte " + std::to_string(offset) + ": " + what);
}

// Reads through the next '\n'; returns false on EOF before any byte.
bool read_line(std::istream& in, std::string& line, std::uint64_t& offset) {
  line.clear();
  char c;
  bool any = false;
  while (in.get(c)) {
    any = true;
    ++offset;
    if (c == '\n') return true;
    line.push_back(c);
    if (line.size() > kMaxHeaderLine) y4m_fail(offset, "header line too long");
  }
  if (any) y4m_fail(offset, "unterminated header line");
  return false;
}

int parse_dimension(std::string_view token, std::uint64_t offset) {
  int v = 0;
  try {
    std::size_t used = 0;
    v = std::stoi(std::string(token.substr(1)), &used);
    if (used != token.size() - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    y4m_fail(offset, "bad dimension token '" + std::string(token) + "'");
  }
  if (v < 1) y4m_fail(offset, "non-positive dimension token '" + std::string(token) + "'");
  return v;
}

std::string_view colorspace_tag(Y4mColorspace cs) {
  switch (cs) {
    case Y4mColorspace::k420: return "420jpeg";
    case Y4mColorspace::k422: return "422";
    case Y4mColorspace::k444: return "444";
    case Y4mColorspace::kMono: return "mono";
  }
  return "mono";
}

}  // namespace

std::size_t Y4mHeader::chroma_bytes() const noexcept {
  const std::size_t w = static_cast<std::size_t>(width);
  const std::size_t h = static_cast<std::size_t>(height);
  switch (colorspace) {
    case Y4mColorspace::k420: return 2 * ((w + 1) / 2) * ((h + 1) / 2);
    case Y4mColorspace::k422: return 2 * ((w + 1) / 2) * h;
    case Y4mColorspace::k444: return 2 * w * h;
    case Y4mColorspace::kMono: return 0;
  }
  return 0;
}

Y4mReader::Y4mReader(std::istream& in) : in_(in) {
  std::string line;
  if (!read_line(in_, line, offset_)) y4m_fail(0, "empty stream, missing YUV4MPEG2 magic");
  std::istringstream tokens(line);
  std::string tok;
  tokens >> tok;
  if (tok != "YUV4MPEG2") y4m_fail(0, "missing YUV4MPEG2 magic");
  bool have_w = false;
  bool have_h = false;
  while (tokens >> tok) {
    switch (tok[0]) {
      case 'W':
        header_.width = parse_dimension(tok, offset_);
        have_w = true;
        break;
      case 'H':
        header_.height = parse_dimension(tok, offset_);
        have_h = true;
        break;
      case 'F':
        header_.frame_rate = tok.substr(1);
        break;
      case 'C': {
        const std::string cs = tok.substr(1);
        if (cs == "420" || cs == "420jpeg" || cs == "420paldv" || cs == "420mpeg2") {
          header_.colorspace = Y4mColorspace::k420;
        } else if (cs == "422") {
          header_.colorspace = Y4mColorspace::k422;
        } else if (cs == "444") {
          header_.colorspace = Y4mColorspace::k444;
        } else if (cs == "mono") {
          header_.colorspace = Y4mColorspace::kMono;
        } else {
          fail(ErrorKind::kUnsupportedFormat, "y4m: unsupported colorspace token '" + tok + "'");
        }
        break;
      }
      default:  // I, A, X and unknown tags carry nothing we need.
        break;
    }
  }
  if (!have_w) y4m_fail(offset_, "header is missing the W token");
  if (!have_h) y4m_fail(offset_, "header is missing the H token");
  buffer_.resize(static_cast<std::size_t>(header_.width) * static_cast<std::size_t>(header_.height));
}

std::optional<GrayImage> Y4mReader::next() {
  std::string line;
  const std::uint64_t frame_start = offset_;
  if (!read_line(in_, line, offset_)) return std::nullopt;
  if (line.rfind("FRAME", 0) != 0) y4m_fail(frame_start, "expected FRAME marker, got '" + line.substr(0, 16) + "'");
  in_.read(reinterpret_cast<char*>(buffer_.data()), static_cast<std::streamsize>(buffer_.size()));
  const auto got = static_cast<std::size_t>(in_.gcount());
  offset_ += got;
  if (got != buffer_.size()) {
    y4m_fail(offset_, "truncated frame payload in frame " + std::to_string(frames_read_) + " (luma " +
                          std::to_string(got) + "/" + std::to_string(buffer_.size()) + " bytes)");
  }
  const std::size_t chroma = header_.chroma_bytes();
  if (chroma > 0) {
    in_.ignore(static_cast<std::streamsize>(chroma));
    const auto skipped = static_cast<std::size_t>(in_.gcount());
    offset_ += skipped;
    if (skipped != chroma) {
      y4m_fail(offset_, "truncated frame payload in frame " + std::to_string(frames_read_) + " (chroma)");
    }
  }
  std::vector<double> pixels(buffer_.size());
  for (std::size_t i = 0; i < buffer_.size(); ++i) pixels[i] = buffer_[i] / 255.0;
  ++frames_read_;
  return GrayImage(header_.width, header_.height, std::move(pixels));
}

std::vector<GrayImage> read_y4m_luma(std::istream& in) {
  Y4mReader reader(in);
  std::vector<GrayImage> frames;
  while (auto f = reader.next()) frames.push_back(std::move(*f));
  return frames;
}

std::vector<GrayImage> read_y4m_luma(std::string_view bytes) {
  std::istringstream in{std::string(bytes)};
  return read_y4m_luma(in);
}

void write_y4m(std::ostream& out, std::span<const GrayImage> frames, Y4mColorspace colorspace) {
  if (frames.empty()) fail(ErrorKind::kInvalidArgument, "write_y4m needs at least one frame for its dimensions");
  Y4mHeader hdr{frames.front().width(), frames.front().height(), colorspace, "25:1"};
  out << "YUV4MPEG2 W" << hdr.width << " H" << hdr.height << " F" << hdr.frame_rate << " Ip A1:1 C"
      << colorspace_tag(colorspace) << '\n';
  std::vector<char> luma(static_cast<std::size_t>(hdr.width) * static_cast<std::size_t>(hdr.height));
  const std::vector<char> chroma(hdr.chroma_bytes(), static_cast<char>(128));
  for (const GrayImage& f : frames) {
    if (f.width() != hdr.width || f.height() != hdr.height) {
      fail(ErrorKind::kInvalidArgument, "write_y4m: all frames must share dimensions");
    }
    for (std::size_t i = 0; i < luma.size(); ++i) luma[i] = static_cast<char>(quantize8(f.pixels()[i]));
    out << "FRAME\n";
    out.write(luma.data(), static_cast<std::streamsize>(luma.size()));
    out.write(chroma.data(), static_cast<std::streamsize>(chroma.size()));
  }
  if (!out) fail(ErrorKind::kIo, "write_y4m: stream write failed");
}

}  // namespace vipr
