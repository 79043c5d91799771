#include "thermoscan/imaging.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace thermoscan {

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : GrayImage(width, height, std::vector<std::uint8_t>(
                                   width > 0 && height > 0 ? static_cast<std::size_t>(width) * height : 0, fill))
{
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels))
{
    if (width <= 0 || height <= 0)
        throw ContractError("GrayImage: dimensions must be positive, got " + std::to_string(width) + "x" +
                            std::to_string(height));
    if (pixels_.size() != static_cast<std::size_t>(width) * height)
        throw ContractError("GrayImage: pixel count does not match " + std::to_string(width) + "x" +
                            std::to_string(height));
}

BoundingBox parseBox(const std::string& text)
{
    BoundingBox box;
    char c1 = 0, c2 = 0, c3 = 0;
    std::istringstream in(text);
    if (!(in >> box.x >> c1 >> box.y >> c2 >> box.w >> c3 >> box.h) || c1 != ',' || c2 != ',' || c3 != ',')
        throw FormatError("bad box \"" + text + "\", expected x,y,w,h");
    in >> std::ws;
    if (!in.eof())
        throw FormatError("trailing characters in box \"" + text + "\"");
    if (!box.valid())
        throw FormatError("box \"" + text + "\" must have positive width and height");
    return box;
}

std::string formatBox(const BoundingBox& box)
{
    return std::to_string(box.x) + "," + std::to_string(box.y) + "," + std::to_string(box.w) + "," +
           std::to_string(box.h);
}

long long intersectionArea(const BoundingBox& a, const BoundingBox& b)
{
    const long long iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
    const long long ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
    if (iw <= 0 || ih <= 0)
        return 0;
    return iw * ih;
}

double iou(const BoundingBox& a, const BoundingBox& b)
{
    const long long inter = intersectionArea(a, b);
    if (inter == 0)
        return 0.0;
    const long long uni = a.area() + b.area() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

GrayImage crop(const GrayImage& img, const BoundingBox& box)
{
    if (!box.valid() || !box.insideImage(img.width(), img.height()))
        throw ContractError("crop: box " + formatBox(box) + " is not inside " + std::to_string(img.width()) + "x" +
                            std::to_string(img.height()) + " image");
    GrayImage out(box.w, box.h);
    for (int y = 0; y < box.h; ++y) {
        const auto src = img.row(box.y + y).subspan(box.x, box.w);
        std::copy(src.begin(), src.end(), out.pixels().begin() + static_cast<std::ptrdiff_t>(y) * box.w);
    }
    return out;
}

GrayImage resize(const GrayImage& img, int w, int h, Resample method)
{
    if (w <= 0 || h <= 0)
        throw ContractError("resize: target dimensions must be positive");
    if (w == img.width() && h == img.height())
        return img;
    GrayImage out(w, h);
    const double sx = static_cast<double>(img.width()) / w;
    const double sy = static_cast<double>(img.height()) / h;
    if (method == Resample::Nearest) {
        std::vector<int> xs(w);
        for (int x = 0; x < w; ++x)
            xs[x] = std::min(img.width() - 1, static_cast<int>((x + 0.5) * sx));
        for (int y = 0; y < h; ++y) {
            const int srcY = std::min(img.height() - 1, static_cast<int>((y + 0.5) * sy));
            for (int x = 0; x < w; ++x)
                out.at(x, y) = img.at(xs[x], srcY);
        }
        return out;
    }
    for (int y = 0; y < h; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(img.height() - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height() - 1);
        const double wy = fy - y0;
        for (int x = 0; x < w; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(img.width() - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width() - 1);
            const double wx = fx - x0;
            const double top = img.at(x0, y0) * (1 - wx) + img.at(x1, y0) * wx;
            const double bot = img.at(x0, y1) * (1 - wx) + img.at(x1, y1) * wx;
            out.at(x, y) = static_cast<std::uint8_t>(std::lround(std::clamp(top * (1 - wy) + bot * wy, 0.0, 255.0)));
        }
    }
    return out;
}

// ---- PGM ----

namespace {

class HeaderReader {
public:
    explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    // Skips whitespace and '#' comments, then reads a decimal token.
    long long readNumber(const char* field)
    {
        skipSpaceAndComments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_]))
            throw PgmError(PgmErrorKind::BadHeader, std::string("PGM: expected ") + field);
        long long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > (1LL << 31))
                throw PgmError(PgmErrorKind::BadHeader, std::string("PGM: ") + field + " out of range");
            ++pos_;
        }
        return value;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    void consumeSingleWhitespace()
    {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
            throw PgmError(PgmErrorKind::BadHeader, "PGM: missing whitespace after maxval");
        ++pos_;
    }

    std::size_t position() const { return pos_; }

private:
    void skipSpaceAndComments()
    {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r')
                    ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 2;
};

}  // namespace

GrayImage loadPgm(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
        throw PgmError(PgmErrorKind::BadMagic, "PGM: bad magic, expected P5");
    HeaderReader reader(bytes);
    const long long width = reader.readNumber("width");
    const long long height = reader.readNumber("height");
    const long long maxval = reader.readNumber("maxval");
    if (width == 0 || height == 0)
        throw PgmError(PgmErrorKind::ZeroDimension, "PGM: zero dimension");
    if (maxval > 255)
        throw PgmError(PgmErrorKind::MaxvalTooLarge, "PGM: maxval " + std::to_string(maxval) + " exceeds 255");
    if (maxval == 0)
        throw PgmError(PgmErrorKind::BadHeader, "PGM: maxval must be positive");
    reader.consumeSingleWhitespace();
    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    const std::size_t offset = reader.position();
    if (bytes.size() - offset < count)
        throw PgmError(PgmErrorKind::TruncatedRaster, "PGM: truncated raster, expected " + std::to_string(count) +
                                                          " bytes, found " + std::to_string(bytes.size() - offset));
    std::vector<std::uint8_t> pixels(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                                     bytes.begin() + static_cast<std::ptrdiff_t>(offset + count));
    return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

std::vector<std::uint8_t> savePgm(const GrayImage& img)
{
    const std::string header =
        "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels().begin(), img.pixels().end());
    return out;
}

GrayImage readPgmFile(const std::string& path)
{
    const auto bytes = readFileBytes(path);
    try {
        return loadPgm(bytes);
    } catch (const PgmError& e) {
        throw PgmError(e.kind(), path + ": " + e.what());
    }
}

void writePgmFile(const std::string& path, const GrayImage& img)
{
    writeFileAtomic(path, savePgm(img));
}

}  // namespace thermoscan
