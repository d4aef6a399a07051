#include "microseg/image_io.hpp"

#include <png.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace microseg {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct RawGray {
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  std::vector<uint32_t> samples;
};

RawGray read_png_gray(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw std::runtime_error("cannot open " + path);
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("libpng init failed for " + path);
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("failed to decode PNG " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  int color_type = png_get_color_type(png, info);
  int bit_depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE || (color_type & PNG_COLOR_MASK_COLOR) ||
      (color_type & PNG_COLOR_MASK_ALPHA)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error(path + ": expected a single-channel grayscale image");
  }
  if (bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
    bit_depth = 8;
  }
  png_set_swap(png);  // 16-bit PNG is big-endian on disk
  png_read_update_info(png, info);

  RawGray raw;
  raw.width = static_cast<int>(png_get_image_width(png, info));
  raw.height = static_cast<int>(png_get_image_height(png, info));
  raw.bit_depth = bit_depth;
  raw.samples.resize(static_cast<size_t>(raw.width) * raw.height);

  std::vector<uint8_t> rowbuf(png_get_rowbytes(png, info));
  for (int y = 0; y < raw.height; ++y) {
    png_read_row(png, rowbuf.data(), nullptr);
    for (int x = 0; x < raw.width; ++x) {
      if (bit_depth == 16) {
        raw.samples[static_cast<size_t>(y) * raw.width + x] =
            reinterpret_cast<const uint16_t*>(rowbuf.data())[x];
      } else {
        raw.samples[static_cast<size_t>(y) * raw.width + x] = rowbuf[x];
      }
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return raw;
}

RawGray read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P2" && magic != "P5") throw std::runtime_error(path + ": not a PGM file");
  auto next_token = [&]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw std::runtime_error(path + ": truncated PGM header");
  };
  int width = std::stoi(next_token());
  int height = std::stoi(next_token());
  int maxval = std::stoi(next_token());
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535)
    throw std::runtime_error(path + ": bad PGM header");

  RawGray raw;
  raw.width = width;
  raw.height = height;
  raw.bit_depth = maxval > 255 ? 16 : 8;
  raw.samples.resize(static_cast<size_t>(width) * height);
  if (magic == "P2") {
    for (auto& s : raw.samples) {
      long v;
      if (!(in >> v)) throw std::runtime_error(path + ": truncated PGM data");
      s = static_cast<uint32_t>(v);
    }
  } else {
    in.get();  // single whitespace after maxval
    int bytes = maxval > 255 ? 2 : 1;
    std::vector<uint8_t> buf(raw.samples.size() * bytes);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
      throw std::runtime_error(path + ": truncated PGM data");
    for (size_t i = 0; i < raw.samples.size(); ++i)
      raw.samples[i] = bytes == 2 ? (buf[2 * i] << 8) | buf[2 * i + 1] : buf[i];
  }
  return raw;
}

void write_png_rows(const std::string& path, int width, int height, int color_type,
                    const std::vector<std::vector<uint8_t>>& rows) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("libpng init failed for " + path);
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("failed to encode PNG " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (const auto& row : rows)
    png_write_row(png, const_cast<png_bytep>(row.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

LoadedImage load_image(const std::string& path) {
  RawGray raw = (has_suffix(path, ".pgm") || has_suffix(path, ".PGM")) ? read_pgm(path)
                                                                       : read_png_gray(path);
  LoadedImage out;
  out.bit_depth = raw.bit_depth;
  out.image = Image(raw.width, raw.height);
  uint32_t lo = raw.samples[0], hi = raw.samples[0];
  for (uint32_t s : raw.samples) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  out.source_min = lo;
  out.source_max = hi;
  if (raw.bit_depth > 8) {
    out.scale = hi > lo ? 255.0 / (hi - lo) : 1.0;
    for (size_t i = 0; i < raw.samples.size(); ++i)
      out.image.data[i] = (raw.samples[i] - static_cast<double>(lo)) * out.scale;
  } else {
    out.scale = 1.0;
    for (size_t i = 0; i < raw.samples.size(); ++i) out.image.data[i] = raw.samples[i];
  }
  return out;
}

void save_image_png(const std::string& path, const Image& img) {
  std::vector<std::vector<uint8_t>> rows(img.height, std::vector<uint8_t>(img.width));
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      rows[y][x] = static_cast<uint8_t>(std::clamp(std::lround(img.at(x, y)), 0L, 255L));
  write_png_rows(path, img.width, img.height, PNG_COLOR_TYPE_GRAY, rows);
}

namespace {

constexpr std::array<std::array<uint8_t, 3>, 10> kPalette = {{{31, 119, 180},
                                                              {255, 127, 14},
                                                              {44, 160, 44},
                                                              {214, 39, 40},
                                                              {148, 103, 189},
                                                              {140, 86, 75},
                                                              {227, 119, 194},
                                                              {127, 127, 127},
                                                              {188, 189, 34},
                                                              {23, 190, 207}}};

}  // namespace

void save_label_map(const std::string& path, const LabelMap& labels, PaletteMode mode) {
  if (mode == PaletteMode::Raw) {
    std::vector<std::vector<uint8_t>> rows(labels.height, std::vector<uint8_t>(labels.width));
    for (int y = 0; y < labels.height; ++y)
      for (int x = 0; x < labels.width; ++x) {
        int l = labels.at(x, y);
        if (l < 0 || l > 255) throw std::runtime_error("save_label_map: label out of byte range");
        rows[y][x] = static_cast<uint8_t>(l);
      }
    write_png_rows(path, labels.width, labels.height, PNG_COLOR_TYPE_GRAY, rows);
    return;
  }
  std::vector<std::vector<uint8_t>> rows(labels.height, std::vector<uint8_t>(labels.width * 3));
  for (int y = 0; y < labels.height; ++y)
    for (int x = 0; x < labels.width; ++x) {
      const auto& c = kPalette[static_cast<size_t>(labels.at(x, y)) % kPalette.size()];
      rows[y][3 * x] = c[0];
      rows[y][3 * x + 1] = c[1];
      rows[y][3 * x + 2] = c[2];
    }
  write_png_rows(path, labels.width, labels.height, PNG_COLOR_TYPE_RGB, rows);
}

LabelMap load_label_map(const std::string& path) {
  LoadedImage img = load_image(path);
  if (img.bit_depth != 8) throw std::runtime_error(path + ": label maps must be 8-bit");
  LabelMap labels(img.image.width, img.image.height);
  for (size_t i = 0; i < img.image.size(); ++i)
    labels.labels[i] = static_cast<int>(std::lround(img.image.data[i]));
  return labels;
}

}  // namespace microseg
