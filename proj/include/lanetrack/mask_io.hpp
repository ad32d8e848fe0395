// Per-frame lane mask loading (PGM P5/P2), ROI filtering, and conversion of
// mask rasters to point sets for hull extraction.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lanetrack/errors.hpp"
#include "lanetrack/geometry.hpp"

namespace lanetrack {

long long frame_timestamp_ms(int frame_index, double fps);

// Binary lane raster: 1 = lane region, 0 = background. Loaded from 8-bit
// grayscale PGM where any pixel value > 0 maps to 1.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major, width * height
    int frame_index = 0;

    std::uint8_t at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
    void set(int x, int y, std::uint8_t v) { pixels[static_cast<size_t>(y) * width + x] = v; }

    std::size_t lane_pixel_count() const;
    bool empty_lane() const { return lane_pixel_count() == 0; }
    long long timestamp_ms(double fps) const { return frame_timestamp_ms(frame_index, fps); }

    static Mask zeros(int width, int height, int frame_index = 0);
};

// Same raster shape; 1 = keep, 0 = conceal.
using RoiMask = Mask;

// Frame listing for one clip. File format: header line "fps,width,height"
// followed by CSV lines "frame_index,relative_path".
struct SequenceManifest {
    double fps = 25.0;
    int width = 0;
    int height = 0;
    struct Entry {
        int frame_index = 0;
        std::string path;  // relative to the manifest's directory
    };
    std::vector<Entry> entries;
};

// Reads a PGM mask (P5 binary or P2 ASCII, maxval <= 255). Throws IoError
// when the file cannot be opened, FormatError on malformed contents.
Mask load_mask(const std::filesystem::path& path);

// Writes an 8-bit PGM; lane pixels as 255. binary = false emits P2 ASCII.
void save_mask(const std::filesystem::path& path, const Mask& mask, bool binary = true);

// Pixelwise AND of mask and roi. Throws DimensionMismatch.
Mask apply_roi(const Mask& mask, const RoiMask& roi);

// Horizontal flip: pixel (x, y) -> (width-1-x, y). Frame metadata preserved.
Mask flip_horizontal(const Mask& mask);

// Lane pixel coordinates for hull extraction. When the lane pixel count
// exceeds max_points the set is thinned by striding the row-major pixel
// enumeration from both ends (stride ceil(2n/max_points) from the front and
// from the back). The selected index set is symmetric under enumeration
// reversal, so horizontally mirrored masks yield exactly mirrored point
// sets. Throws EmptyMask when the mask has no lane pixels.
std::vector<Point2D> mask_to_points(const Mask& mask, int max_points = 4096);

SequenceManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const SequenceManifest& manifest);

}  // namespace lanetrack
