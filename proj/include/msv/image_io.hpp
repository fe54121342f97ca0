#pragma once

// Image files and the pictures written next to explanations.

#include <filesystem>
#include <string>

#include "msv/definitions.hpp"
#include "msv/tensor.hpp"

namespace msv {

// Decodes PNG/JPEG into an RGB (or single-channel for gray files) tensor
// with values in [0, 1]. Throws InputError when the file cannot be read.
InputTensor load_image(const std::filesystem::path& path);

// Writes an 8-bit PNG; values are clamped to [0, 1] and rounded. Creates
// missing parent directories. Throws InputError on failure.
void save_png(const std::filesystem::path& path, const InputTensor& image);

// Fixed 10-color cycle, as 8-bit RGB.
struct Rgb8 {
  unsigned char r, g, b;
};
Rgb8 palette_color(std::size_t view_index);

struct OverlayOptions {
  // 0 picks the smallest integer factor that makes the long side >= 256 px.
  int scale = 0;
  float alpha = 0.55f;  // weight of the view color over the image
  int caption_height = 28;
};

// The input upscaled by an integer factor, each view tinted with its palette
// color in discovery order, and a caption strip reading "#MSVs: N".
InputTensor render_overlay(const InputTensor& x, const MsvSet& set, const OverlayOptions& opt = {});

}  // namespace msv
