#include "lanetrack/mask_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace lanetrack {

long long frame_timestamp_ms(int frame_index, double fps) {
    return std::llround(frame_index * 1000.0 / fps);
}

std::size_t Mask::lane_pixel_count() const {
    return static_cast<std::size_t>(
        std::count_if(pixels.begin(), pixels.end(), [](std::uint8_t v) { return v != 0; }));
}

Mask Mask::zeros(int width, int height, int frame_index) {
    Mask m;
    m.width = width;
    m.height = height;
    m.frame_index = frame_index;
    m.pixels.assign(static_cast<std::size_t>(width) * height, 0);
    return m;
}

namespace {

// Reads the next PNM header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    return tok;
}

int parse_positive_int(const std::string& tok, const char* what) {
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(),
                                    [](unsigned char c) { return std::isdigit(c); }))
        throw FormatError(std::string("pgm: bad ") + what + " '" + tok + "'");
    long v = std::strtol(tok.c_str(), nullptr, 10);
    if (v <= 0 || v > 1 << 20) throw FormatError(std::string("pgm: out-of-range ") + what);
    return static_cast<int>(v);
}

}  // namespace

Mask load_mask(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open mask file: " + path.string());

    std::string magic = next_token(in);
    if (magic != "P5" && magic != "P2")
        throw FormatError("pgm: unsupported magic '" + magic + "' in " + path.string());

    int width = parse_positive_int(next_token(in), "width");
    int height = parse_positive_int(next_token(in), "height");
    int maxval = parse_positive_int(next_token(in), "maxval");
    if (maxval > 255) throw FormatError("pgm: maxval > 255 not supported");

    Mask m = Mask::zeros(width, height);
    const std::size_t n = m.pixels.size();

    if (magic == "P5") {
        std::vector<char> raw(n);
        in.read(raw.data(), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n)
            throw FormatError("pgm: truncated raster in " + path.string());
        for (std::size_t i = 0; i < n; ++i)
            m.pixels[i] = static_cast<unsigned char>(raw[i]) > 0 ? 1 : 0;
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            long v;
            if (!(in >> v)) throw FormatError("pgm: truncated raster in " + path.string());
            if (v < 0 || v > maxval) throw FormatError("pgm: sample out of range");
            m.pixels[i] = v > 0 ? 1 : 0;
        }
    }
    return m;
}

void save_mask(const std::filesystem::path& path, const Mask& mask, bool binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write mask file: " + path.string());

    if (binary) {
        out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
        std::vector<char> raw(mask.pixels.size());
        for (std::size_t i = 0; i < raw.size(); ++i)
            raw[i] = mask.pixels[i] ? static_cast<char>(255) : 0;
        out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
    } else {
        out << "P2\n" << mask.width << " " << mask.height << "\n255\n";
        for (int y = 0; y < mask.height; ++y) {
            for (int x = 0; x < mask.width; ++x)
                out << (mask.at(x, y) ? 255 : 0) << (x + 1 == mask.width ? '\n' : ' ');
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

Mask apply_roi(const Mask& mask, const RoiMask& roi) {
    if (mask.width != roi.width || mask.height != roi.height)
        throw DimensionMismatch("apply_roi: mask and ROI dimensions differ");
    Mask out = mask;
    for (std::size_t i = 0; i < out.pixels.size(); ++i)
        out.pixels[i] = (mask.pixels[i] && roi.pixels[i]) ? 1 : 0;
    return out;
}

Mask flip_horizontal(const Mask& mask) {
    Mask out = mask;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) out.set(mask.width - 1 - x, y, mask.at(x, y));
    return out;
}

namespace {

// Offsets selected for a row of c lane pixels at stride k: every k-th index
// scanning from the left plus every k-th scanning from the right. The set is
// symmetric under j -> c-1-j and always contains both row endpoints.
std::size_t row_selection_count(std::size_t c, std::size_t k) {
    std::size_t per_end = (c - 1) / k + 1;
    return (c - 1) % k == 0 ? per_end : 2 * per_end;
}

}  // namespace

std::vector<Point2D> mask_to_points(const Mask& mask, int max_points) {
    std::vector<std::pair<int, std::vector<int>>> rows;  // (y, ascending lane x's)
    std::size_t n = 0;
    for (int y = 0; y < mask.height; ++y) {
        std::vector<int> xs;
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(x, y)) xs.push_back(x);
        if (!xs.empty()) {
            n += xs.size();
            rows.emplace_back(y, std::move(xs));
        }
    }
    if (n == 0) throw EmptyMask("mask_to_points: no lane pixels");

    const std::size_t budget = static_cast<std::size_t>(std::max(1, max_points));
    std::vector<Point2D> out;

    if (n <= budget) {
        out.reserve(n);
        for (const auto& [y, xs] : rows)
            for (int x : xs) out.push_back({static_cast<double>(x), static_cast<double>(y)});
        return out;
    }

    // Thinning must commute with horizontal mirroring (which reverses the
    // pixel order within each row), so the per-row selection is a two-ended
    // stride: reversal-symmetric and endpoint-preserving. Keeping each row's
    // extreme pixels also keeps the hull of a row-convex mask exact.
    const std::size_t row_count = rows.size();
    if (budget >= 2 * row_count) {
        std::size_t k = std::max<std::size_t>(1, (2 * n + budget - 1) / budget);
        auto total = [&](std::size_t stride) {
            std::size_t sum = 0;
            for (const auto& [y, xs] : rows) sum += row_selection_count(xs.size(), stride);
            return sum;
        };
        while (total(k) > budget) ++k;

        for (const auto& [y, xs] : rows) {
            const std::size_t c = xs.size();
            std::vector<bool> take(c, false);
            for (std::size_t j = 0; j < c; j += k) {
                take[j] = true;
                take[c - 1 - j] = true;
            }
            for (std::size_t j = 0; j < c; ++j)
                if (take[j])
                    out.push_back({static_cast<double>(xs[j]), static_cast<double>(y)});
        }
    } else {
        // Budget below two points per row: thin rows and keep endpoints only.
        std::size_t row_stride = (2 * row_count + budget - 1) / budget;
        for (std::size_t r = 0; r < row_count; r += row_stride) {
            const auto& [y, xs] = rows[r];
            out.push_back({static_cast<double>(xs.front()), static_cast<double>(y)});
            if (xs.size() > 1)
                out.push_back({static_cast<double>(xs.back()), static_cast<double>(y)});
        }
    }
    return out;
}

SequenceManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest: " + path.string());

    SequenceManifest manifest;
    std::string line;
    if (!std::getline(in, line)) throw FormatError("manifest: empty file " + path.string());

    {
        std::istringstream header(line);
        char c1 = 0, c2 = 0;
        if (!(header >> manifest.fps >> c1 >> manifest.width >> c2 >> manifest.height) ||
            c1 != ',' || c2 != ',')
            throw FormatError("manifest: bad header '" + line + "'");
        if (manifest.fps <= 0 || manifest.width <= 0 || manifest.height <= 0)
            throw FormatError("manifest: non-positive fps or dimensions");
    }

    int prev_index = -1;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw FormatError("manifest: bad entry at line " + std::to_string(line_no));
        SequenceManifest::Entry entry;
        try {
            entry.frame_index = std::stoi(line.substr(0, comma));
        } catch (const std::exception&) {
            throw FormatError("manifest: bad frame index at line " + std::to_string(line_no));
        }
        entry.path = line.substr(comma + 1);
        if (entry.frame_index < 0 || entry.frame_index <= prev_index)
            throw FormatError("manifest: frame indices must be strictly increasing");
        if (entry.path.empty())
            throw FormatError("manifest: empty path at line " + std::to_string(line_no));
        prev_index = entry.frame_index;
        manifest.entries.push_back(std::move(entry));
    }
    return manifest;
}

void save_manifest(const std::filesystem::path& path, const SequenceManifest& manifest) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest: " + path.string());
    out << manifest.fps << "," << manifest.width << "," << manifest.height << "\n";
    for (const auto& entry : manifest.entries)
        out << entry.frame_index << "," << entry.path << "\n";
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace lanetrack
