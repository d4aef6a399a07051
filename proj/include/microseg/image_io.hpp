#pragma once

#include <string>

#include "microseg/image.hpp"

namespace microseg {

/// Image plus the rescale bookkeeping for the JSON sidecar.
struct LoadedImage {
  Image image;
  int bit_depth = 8;
  double source_min = 0.0;
  double source_max = 0.0;
  double scale = 1.0;  // applied factor: stored = (raw - source_min) * scale
};

/// Single-channel PNG or PGM (by extension); 16-bit inputs are rescaled to
/// [0,255]. Multi-channel or unreadable files raise a runtime error with a
/// diagnostic.
LoadedImage load_image(const std::string& path);

/// 8-bit grayscale PNG; values clamped to [0,255] and rounded.
void save_image_png(const std::string& path, const Image& img);

enum class PaletteMode { Raw, Colorized };

/// Raw mode stores label integers as gray values (lossless round trip);
/// colorized mode writes an RGB rendering with a fixed palette.
void save_label_map(const std::string& path, const LabelMap& labels, PaletteMode mode);

LabelMap load_label_map(const std::string& path);

}  // namespace microseg
