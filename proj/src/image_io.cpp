#include "nslbp/image_io.hpp"

#include <cctype>
#include <fstream>

#include "nslbp/errors.hpp"

namespace nslbp {

namespace {

constexpr uint32_t kIdxImagesMagic = 0x00000803;
constexpr uint32_t kIdxLabelsMagic = 0x00000801;

uint32_t read_be32(std::istream& in, const std::string& what) {
  unsigned char buf[4];
  if (!in.read(reinterpret_cast<char*>(buf), 4))
    fail(Err::Truncated, "file ends inside " + what);
  return (uint32_t(buf[0]) << 24) | (uint32_t(buf[1]) << 16) | (uint32_t(buf[2]) << 8) |
         uint32_t(buf[3]);
}

void write_be32(std::ostream& out, uint32_t v) {
  unsigned char buf[4] = {static_cast<unsigned char>(v >> 24),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(buf), 4);
}

std::ifstream open_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::IoError, "cannot open " + path);
  return in;
}

uint32_t depth_for_maxval(uint32_t maxval) {
  uint32_t depth = 1;
  while ((1u << depth) - 1 < maxval) ++depth;
  return depth;
}

// Skips PGM whitespace and '#' comments, then parses one unsigned decimal.
uint32_t pgm_token(std::istream& in) {
  int c = in.get();
  while (c != EOF && (std::isspace(c) || c == '#')) {
    if (c == '#')
      while (c != EOF && c != '\n') c = in.get();
    c = in.get();
  }
  if (c == EOF || !std::isdigit(c)) fail(Err::UnsupportedFormat, "malformed PGM header");
  uint64_t value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    if (value > 0xffffffffull) fail(Err::UnsupportedFormat, "PGM header value too large");
    c = in.get();
  }
  return static_cast<uint32_t>(value);
}

}  // namespace

std::vector<RawImage> load_idx(const std::string& path) {
  std::ifstream in = open_binary(path);
  uint32_t magic = read_be32(in, "magic");
  if (magic != kIdxImagesMagic) fail(Err::BadMagic, "expected IDX image magic 0x00000803");
  uint32_t count = read_be32(in, "count");
  uint32_t rows = read_be32(in, "rows");
  uint32_t cols = read_be32(in, "cols");
  std::vector<RawImage> images(count);
  std::vector<unsigned char> buf(size_t(rows) * cols);
  for (uint32_t i = 0; i < count; ++i) {
    if (!in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size())))
      fail(Err::Truncated, "IDX pixel data ends early");
    RawImage& img = images[i];
    img.height = rows;
    img.width = cols;
    img.bit_depth = 8;
    img.samples.assign(buf.begin(), buf.end());
  }
  return images;
}

std::vector<uint8_t> load_idx_labels(const std::string& path) {
  std::ifstream in = open_binary(path);
  uint32_t magic = read_be32(in, "magic");
  if (magic != kIdxLabelsMagic) fail(Err::BadMagic, "expected IDX label magic 0x00000801");
  uint32_t count = read_be32(in, "count");
  std::vector<uint8_t> labels(count);
  if (count &&
      !in.read(reinterpret_cast<char*>(labels.data()), std::streamsize(labels.size())))
    fail(Err::Truncated, "IDX label data ends early");
  return labels;
}

void save_idx(const std::string& path, const std::vector<RawImage>& images) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::IoError, "cannot write " + path);
  uint32_t rows = images.empty() ? 0 : images.front().height;
  uint32_t cols = images.empty() ? 0 : images.front().width;
  write_be32(out, kIdxImagesMagic);
  write_be32(out, static_cast<uint32_t>(images.size()));
  write_be32(out, rows);
  write_be32(out, cols);
  for (const RawImage& img : images) {
    if (img.height != rows || img.width != cols)
      fail(Err::ShapeMismatch, "IDX container needs uniform image dimensions");
    for (uint16_t s : img.samples) {
      if (s > 0xff) fail(Err::UnsupportedFormat, "IDX stores 8-bit samples");
      out.put(static_cast<char>(s));
    }
  }
}

void save_idx_labels(const std::string& path, const std::vector<uint8_t>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::IoError, "cannot write " + path);
  write_be32(out, kIdxLabelsMagic);
  write_be32(out, static_cast<uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()), std::streamsize(labels.size()));
}

RawImage load_pgm(const std::string& path) {
  std::ifstream in = open_binary(path);
  char p = 0, five = 0;
  in.get(p).get(five);
  if (!in || p != 'P' || five != '5') fail(Err::UnsupportedFormat, "only binary PGM (P5) is supported");
  uint32_t width = pgm_token(in);
  uint32_t height = pgm_token(in);
  uint32_t maxval = pgm_token(in);
  if (maxval == 0 || maxval > 65535) fail(Err::UnsupportedFormat, "PGM maxval out of range");
  // Exactly one whitespace byte separates the header from the raster.
  RawImage img;
  img.height = height;
  img.width = width;
  img.bit_depth = depth_for_maxval(maxval);
  img.samples.resize(size_t(height) * width);
  if (maxval < 256) {
    std::vector<unsigned char> buf(img.samples.size());
    if (!in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size())))
      fail(Err::Truncated, "PGM raster ends early");
    for (size_t i = 0; i < buf.size(); ++i) img.samples[i] = buf[i];
  } else {
    std::vector<unsigned char> buf(img.samples.size() * 2);
    if (!in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size())))
      fail(Err::Truncated, "PGM raster ends early");
    for (size_t i = 0; i < img.samples.size(); ++i)
      img.samples[i] = static_cast<uint16_t>((buf[2 * i] << 8) | buf[2 * i + 1]);
  }
  return img;
}

void save_pgm(const std::string& path, const RawImage& img) {
  if (img.bit_depth == 0 || img.bit_depth > 16)
    fail(Err::UnsupportedFormat, "PGM supports depths 1-16");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::IoError, "cannot write " + path);
  uint32_t maxval = (1u << img.bit_depth) - 1;
  out << "P5\n" << img.width << " " << img.height << "\n" << maxval << "\n";
  if (maxval < 256) {
    for (uint16_t s : img.samples) out.put(static_cast<char>(s & 0xff));
  } else {
    for (uint16_t s : img.samples) {
      out.put(static_cast<char>(s >> 8));
      out.put(static_cast<char>(s & 0xff));
    }
  }
}

FeatureMap quantize_skip(const RawImage& img, uint32_t bits, uint32_t apx) {
  if (img.samples.size() != size_t(img.height) * img.width)
    fail(Err::ShapeMismatch, "sample count != height*width");
  if (bits == 0 || bits > 16) fail(Err::InvalidArgument, "target width must be in [1, 16]");
  if (apx >= bits) fail(Err::ApxOutOfRange, "apx must be < bits");
  FeatureMap fm(1, img.height, img.width, bits);
  uint32_t mask = ~((1u << apx) - 1);
  for (size_t i = 0; i < img.samples.size(); ++i) {
    uint32_t v = img.samples[i];
    if (img.bit_depth >= bits)
      v >>= (img.bit_depth - bits);  // truncation, not rounding
    else
      v <<= (bits - img.bit_depth);
    fm.data[i] = v & mask;
  }
  return fm;
}

}  // namespace nslbp
