#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "thermoscan/errors.hpp"

namespace thermoscan {

/// 8-bit single-channel raster. Row-major, origin top-left, x = column, y = row.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, std::uint8_t fill = 0);
    GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return pixels_.empty(); }

    std::uint8_t at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
    std::uint8_t& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

    std::span<const std::uint8_t> pixels() const { return pixels_; }
    std::span<std::uint8_t> pixels() { return pixels_; }
    std::span<const std::uint8_t> row(int y) const
    {
        return std::span<const std::uint8_t>(pixels_).subspan(static_cast<std::size_t>(y) * width_, width_);
    }

    bool sameSize(const GrayImage& other) const { return width_ == other.width_ && height_ == other.height_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

struct Point {
    int x = 0;
    int y = 0;
    friend bool operator==(const Point&, const Point&) = default;
};

struct BoundingBox {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    int right() const { return x + w; }
    int bottom() const { return y + h; }
    long long area() const { return static_cast<long long>(w) * h; }
    bool valid() const { return w > 0 && h > 0; }
    bool insideImage(int imgW, int imgH) const { return x >= 0 && y >= 0 && right() <= imgW && bottom() <= imgH; }
    bool contains(const BoundingBox& inner) const
    {
        return inner.x >= x && inner.y >= y && inner.right() <= right() && inner.bottom() <= bottom();
    }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Parse "x,y,w,h".
BoundingBox parseBox(const std::string& text);
std::string formatBox(const BoundingBox& box);

/// Intersection-over-union; 0 for disjoint boxes.
double iou(const BoundingBox& a, const BoundingBox& b);
long long intersectionArea(const BoundingBox& a, const BoundingBox& b);

GrayImage crop(const GrayImage& img, const BoundingBox& box);

enum class Resample { Nearest, Bilinear };

/// Resize to (w, h). Nearest-neighbour samples floor((i + 0.5) * src / dst).
GrayImage resize(const GrayImage& img, int w, int h, Resample method = Resample::Nearest);

// ---- PGM (binary P5) ----

enum class PgmErrorKind { BadMagic, BadHeader, ZeroDimension, MaxvalTooLarge, TruncatedRaster };

class PgmError : public FormatError {
public:
    PgmError(PgmErrorKind kind, const std::string& what) : FormatError(what), kind_(kind) {}
    PgmErrorKind kind() const { return kind_; }

private:
    PgmErrorKind kind_;
};

GrayImage loadPgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> savePgm(const GrayImage& img);

GrayImage readPgmFile(const std::string& path);
void writePgmFile(const std::string& path, const GrayImage& img);

// ---- sequences ----

/// Ordered frames of identical size, each with an identifier (zero-padded index by default).
class FrameSequence {
public:
    FrameSequence(std::vector<GrayImage> frames, std::vector<std::string> ids);
    explicit FrameSequence(std::vector<GrayImage> frames);

    std::size_t size() const { return frames_.size(); }
    const GrayImage& frame(std::size_t i) const { return frames_.at(i); }
    const std::string& id(std::size_t i) const { return ids_.at(i); }
    const std::vector<GrayImage>& frames() const { return frames_; }
    const std::vector<std::string>& ids() const { return ids_; }
    int width() const { return frames_.front().width(); }
    int height() const { return frames_.front().height(); }

private:
    std::vector<GrayImage> frames_;
    std::vector<std::string> ids_;
};

std::string frameId(std::size_t index);

/// Loads every "frame_<digits>.pgm" in dir, sorted by numeric index.
FrameSequence loadSequence(const std::string& dir);

/// Writes bytes to path via a temporary file and rename.
void writeFileAtomic(const std::string& path, std::span<const std::uint8_t> bytes);
void writeFileAtomic(const std::string& path, const std::string& text);
std::vector<std::uint8_t> readFileBytes(const std::string& path);

}  // namespace thermoscan
